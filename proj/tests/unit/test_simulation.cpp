#include <doctest.h>

#include <cmath>
#include <random>

#include "monlab/error.hpp"
#include "monlab/simulation.hpp"

using namespace monlab;

namespace {

SimPlan base_plan() {
  SimPlan p;
  p.agent_count = 20;
  p.poll_interval = 1.0;
  p.duration = 60.0;
  p.delay = DistributionSpec::weibull(0.7, 1.0);
  p.process = RateCounter{1.0};
  p.seed = 5;
  return p;
}

}  // namespace

TEST_CASE("plan validation") {
  auto p = base_plan();
  p.agent_count = 0;
  CHECK_THROWS_AS(simulate(p), InputError);
  p = base_plan();
  p.poll_interval = 0;
  CHECK_THROWS_AS(simulate(p), InputError);
  p = base_plan();
  p.duration = 9.0;
  CHECK_THROWS_AS(simulate(p), InputError);
  p = base_plan();
  p.manager_service = -1;
  CHECK_THROWS_AS(simulate(p), InputError);
}

TEST_CASE("trace shape invariants") {
  const auto t = simulate(base_plan());
  REQUIRE(t.times.size() == 60);  // poll instants 0, 1, ..., 59
  CHECK(t.real_aggregate.size() == t.times.size());
  CHECK(t.observed_aggregate.size() == t.times.size());
  CHECK(t.per_point_error.size() == t.times.size());
  CHECK(t.staleness.size() == t.times.size());
  CHECK(t.warmup_points == 3);
  for (std::size_t i = 0; i < t.times.size(); ++i)
    CHECK(t.per_point_error[i] == t.observed_aggregate[i] - t.real_aggregate[i]);
  // Rate counters: A(t) = N * rate * t.
  CHECK(t.real_aggregate[10] == doctest::Approx(20.0 * 10.0));
}

TEST_CASE("zero delay identity") {
  auto p = base_plan();
  p.delay = ConstantDelay{0.0};
  const auto t = simulate(p);
  for (std::size_t i = 0; i < t.times.size(); ++i) CHECK(t.per_point_error[i] == 0.0);
  CHECK(t.summary.rmse == 0.0);
  CHECK(t.summary.mean_abs_rel_error == 0.0);
}

TEST_CASE("static values are never stale") {
  auto p = base_plan();
  p.process = RandomWalk{0.0, 5.0};
  const auto t = simulate(p);
  std::size_t settled = 0;
  for (std::size_t i = 0; i < t.times.size(); ++i) {
    if (t.staleness[i] < t.times[i]) {  // every agent has delivered once
      CHECK(t.per_point_error[i] == 0.0);
      ++settled;
    }
  }
  CHECK(settled > 50);
}

TEST_CASE("determinism") {
  const auto a = simulate(base_plan());
  const auto b = simulate(base_plan());
  CHECK(a.observed_aggregate == b.observed_aggregate);
  CHECK(a.summary.rmse == b.summary.rmse);
  CHECK(a.summary.mean_abs_rel_error == b.summary.mean_abs_rel_error);
  auto other = base_plan();
  other.seed = 6;
  CHECK(simulate(other).observed_aggregate != a.observed_aggregate);
}

TEST_CASE("existing agents keep their streams when agents are added") {
  auto small = base_plan();
  small.agent_count = 1;
  auto big = small;
  big.agent_count = 2;
  const auto a = simulate(small), b = simulate(big);
  // Rate-counter errors are never positive, so adding agent 1 can only push
  // the summed error further down if agent 0 behaves exactly as before.
  std::size_t strictly_lower = 0;
  for (std::size_t i = 0; i < a.times.size(); ++i) {
    CHECK(a.per_point_error[i] <= 0.0);
    CHECK(b.per_point_error[i] <= a.per_point_error[i]);
    if (b.per_point_error[i] < a.per_point_error[i]) ++strictly_lower;
  }
  CHECK(strictly_lower > 0);
}

TEST_CASE("larger delays never reduce the error of a rate counter") {
  for (double c : {1.5, 2.0, 5.0}) {
    auto p = base_plan();
    auto q = base_plan();
    q.delay = DistributionSpec::weibull(0.7, c);
    const auto a = simulate(p), b = simulate(q);
    for (std::size_t i = 0; i < a.times.size(); ++i)
      CHECK(std::fabs(b.per_point_error[i]) >= std::fabs(a.per_point_error[i]));
  }
}

TEST_CASE("sum equals agent count times mean") {
  auto s = base_plan();
  s.process = RandomWalk{0.5, 3.0};
  auto m = s;
  m.aggregation = Aggregation::mean;
  const auto a = simulate(s), b = simulate(m);
  for (std::size_t i = 0; i < a.times.size(); ++i) {
    CHECK(a.real_aggregate[i] == doctest::Approx(20.0 * b.real_aggregate[i]));
    CHECK(a.observed_aggregate[i] == doctest::Approx(20.0 * b.observed_aggregate[i]));
  }
}

TEST_CASE("manager service time adds queueing staleness") {
  auto p = base_plan();
  p.delay = ConstantDelay{0.0};
  p.manager_service = 0.01;
  const auto t = simulate(p);
  // Twenty responses queue behind each other: the last is held 0.2 s.
  CHECK(t.summary.rmse > 0.0);
  CHECK(t.summary.max_staleness_s >= 0.2 - 1e-9);
}

TEST_CASE("spatial error summary") {
  DistortionTrace zero;
  for (int i = 0; i < 10; ++i) {
    zero.times.push_back(i);
    zero.real_aggregate.push_back(10);
    zero.observed_aggregate.push_back(10);
    zero.per_point_error.push_back(0);
    zero.staleness.push_back(0);
  }
  auto z = spatial_error_summary(zero);
  CHECK(z.rmse == 0.0);
  CHECK(z.mean_abs_rel_error == 0.0);

  auto plus_one = zero;
  for (int i = 0; i < 10; ++i) {
    plus_one.observed_aggregate[i] = 11;
    plus_one.per_point_error[i] = 1;
  }
  const auto o = spatial_error_summary(plus_one);
  CHECK(o.rmse == doctest::Approx(1.0));
  CHECK(o.mean_abs_rel_error == doctest::Approx(0.1));

  // Random trace against a loop-based recomputation.
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g(0.0, 5.0);
  DistortionTrace r;
  r.warmup_points = 4;
  for (int i = 0; i < 200; ++i) {
    const double real = g(rng), obs = g(rng);
    r.times.push_back(i);
    r.real_aggregate.push_back(i == 50 ? 0.0 : real);
    r.observed_aggregate.push_back(obs);
    r.per_point_error.push_back(obs - (i == 50 ? 0.0 : real));
    r.staleness.push_back(std::fabs(g(rng)));
  }
  double sq = 0, rel = 0, stale = 0;
  int n = 0;
  for (std::size_t i = r.warmup_points; i < r.times.size(); ++i, ++n) {
    sq += r.per_point_error[i] * r.per_point_error[i];
    rel += std::fabs(r.per_point_error[i]) / std::max(std::fabs(r.real_aggregate[i]), 1e-9);
    stale = std::max(stale, r.staleness[i]);
  }
  const auto s = spatial_error_summary(r);
  CHECK(s.rmse == doctest::Approx(std::sqrt(sq / n)).epsilon(1e-12));
  CHECK(s.mean_abs_rel_error == doctest::Approx(rel / n).epsilon(1e-12));
  CHECK(s.max_staleness_s == stale);

  DistortionTrace empty;
  CHECK_THROWS_AS(spatial_error_summary(empty), InputError);
}

TEST_CASE("value process and aggregation text") {
  CHECK(std::get<RateCounter>(parse_value_process("rate:2.5")).rate == 2.5);
  const auto w = std::get<RandomWalk>(parse_value_process("walk:0.5,3"));
  CHECK(w.step == 0.5);
  CHECK(w.start == 3.0);
  CHECK(std::get<RandomWalk>(parse_value_process("walk:1")).start == 0.0);
  CHECK(to_string(parse_value_process("walk:0.5,3")) == "walk:0.5,3");
  CHECK_THROWS_AS(parse_value_process("walk:-1"), InputError);
  CHECK_THROWS_AS(parse_value_process("poisson:1"), InputError);
  CHECK(parse_aggregation("mean") == Aggregation::mean);
  CHECK_THROWS_AS(parse_aggregation("max"), InputError);
}
