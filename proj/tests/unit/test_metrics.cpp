#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "monlab/error.hpp"
#include "monlab/metrics.hpp"
#include "monlab/metrics_csv.hpp"

using namespace monlab;
using monlab::testing::failed_sample;
using monlab::testing::ok_sample;
using monlab::testing::resource;

namespace {

// Independent sort-and-index percentile: walk the ranks instead of
// computing the interpolation position directly.
double brute_percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double target = q * static_cast<double>(v.size() - 1);
  std::size_t lo = 0;
  while (lo + 1 < v.size() && static_cast<double>(lo + 1) <= target) ++lo;
  if (lo + 1 == v.size()) return v.back();
  const double frac = target - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[lo + 1] * frac;
}

MetricSeries series_of(std::vector<MetricSample> samples, double duration,
                       Qualifier q = Qualifier::one_to_many) {
  MetricSeries s(q, "agent_count", 1.0, duration);
  for (auto& x : samples) s.record(std::move(x));
  return s;
}

}  // namespace

TEST_CASE("record appends and enforces ordering and qualifier") {
  MetricSeries one(Qualifier::one_to_one, "poll_rate", 1.0, 10.0);
  one.record(ok_sample(0.0, "A", 0.1));
  CHECK(one.samples().size() == 1);
  CHECK_THROWS_AS(one.record(ok_sample(1.0, "B", 0.1)), InputError);
  CHECK_THROWS_AS(one.record(ok_sample(-1.0, "A", 0.1)), InputError);
  CHECK(one.samples().size() == 1);

  MetricSeries many(Qualifier::one_to_many, "agent_count", 2.0, 10.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> step(0.0, 0.01);
  double t = 0.0;
  for (int i = 0; i < 1000; ++i) {
    many.record(ok_sample(t, "agent-" + std::to_string(i % 7), 0.01));
    t += step(rng);
  }
  CHECK(many.samples().size() == 1000);
  CHECK(std::is_sorted(many.samples().begin(), many.samples().end(),
                       [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; }));
  CHECK(many.distinct_agents() == 7);
  CHECK_NOTHROW(many.validate());

  MetricSeries lonely(Qualifier::one_to_many, "agent_count", 1.0, 10.0);
  lonely.record(ok_sample(0.0, "A", 0.1));
  CHECK_THROWS_AS(lonely.validate(), InputError);
}

TEST_CASE("sample invariants") {
  auto s = ok_sample(0.0, "A", -0.1);
  CHECK_THROWS_AS(validate(s), InputError);
  s = ok_sample(0.0, "A", 0.1, 0);
  CHECK_THROWS_AS(validate(s), InputError);
  s = ok_sample(0.0, "A", 0.1, 1, 0, 10);
  CHECK_THROWS_AS(validate(s), InputError);
  s = failed_sample(0.0, "A", SampleStatus::timeout);
  s.delay = 0.5;
  CHECK_THROWS_AS(validate(s), InputError);
  CHECK_THROWS_AS(validate(resource(0.0, Entity::agent, 1.5, 0)), InputError);
  CHECK_THROWS_AS(validate(resource(0.0, Entity::agent, -0.1, 0)), InputError);
  CHECK_NOTHROW(validate(resource(0.0, Entity::agent, 0.5, 100)));
}

TEST_CASE("percentiles against brute-force oracle") {
  CHECK(percentile_sorted(std::vector<double>{1, 2, 3, 4}, 0.5) == doctest::Approx(2.5));
  CHECK(percentile_sorted(std::vector<double>{1, 2, 3, 4}, 0.0) == 1.0);
  CHECK(percentile_sorted(std::vector<double>{1, 2, 3, 4}, 1.0) == 4.0);
  CHECK(percentile_sorted(std::vector<double>{7}, 0.95) == 7.0);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(1 + rng() % 50);
    for (auto& x : v) x = u(rng);
    auto sorted = v;
    std::sort(sorted.begin(), sorted.end());
    for (double q : {0.0, 0.1, 0.5, 0.95, 0.99, 1.0, u(rng) / 10.0})
      CHECK(percentile_sorted(sorted, q) == doctest::Approx(brute_percentile(v, q)).epsilon(1e-12));
  }
}

TEST_CASE("speed summary") {
  std::vector<MetricSample> samples;
  for (int i = 0; i < 100; ++i) samples.push_back(ok_sample(i * 0.1, "agent-" + std::to_string(i % 2), 0.2));
  const auto s = speed_summary(series_of(samples, 10.0));
  CHECK(s.throughput_attrs_per_sec == doctest::Approx(10.0));
  CHECK(*s.delay_p50 == doctest::Approx(0.2));
  CHECK(*s.delay_p95 == doctest::Approx(0.2));
  CHECK(*s.delay_p99 == doctest::Approx(0.2));
  CHECK(*s.delay_max == doctest::Approx(0.2));

  std::vector<MetricSample> tenths;
  for (int i = 1; i <= 10; ++i) tenths.push_back(ok_sample(i, "agent-" + std::to_string(i % 2), 0.1 * i));
  const auto t = speed_summary(series_of(tenths, 10.0));
  std::vector<double> delays;
  for (int i = 1; i <= 10; ++i) delays.push_back(0.1 * i);
  CHECK(*t.delay_p50 == doctest::Approx(brute_percentile(delays, 0.5)));
  CHECK(*t.delay_p50 == doctest::Approx(0.55));
  CHECK(*t.delay_p95 == doctest::Approx(brute_percentile(delays, 0.95)));
  CHECK(*t.delay_p50 <= *t.delay_p95);
  CHECK(*t.delay_p95 <= *t.delay_p99);
  CHECK(*t.delay_p99 <= *t.delay_max);

  std::vector<MetricSample> failed = {failed_sample(0, "A", SampleStatus::timeout),
                                      failed_sample(1, "B", SampleStatus::error)};
  const auto f = speed_summary(series_of(failed, 5.0));
  CHECK(f.throughput_attrs_per_sec == 0.0);
  CHECK_FALSE(f.delay_mean.has_value());
  CHECK_FALSE(f.delay_p50.has_value());
  CHECK(f.timeout_count == 1);
  CHECK(f.error_count == 1);
  CHECK(f.ok_count + f.timeout_count + f.error_count == 2);
}

TEST_CASE("cost summary") {
  std::vector<MetricSample> samples;
  for (int i = 0; i < 10; ++i) samples.push_back(ok_sample(i, "agent-" + std::to_string(i % 2), 0.1, 1, 100, 400));
  auto series = series_of(samples, 5.0);
  for (int i = 0; i < 4; ++i) series.record(resource(i, Entity::manager, 0.25, 1000 + i));
  const auto c = cost_summary(series);
  CHECK(*c.network_bytes_per_sec == doctest::Approx(1000.0));
  CHECK(*c.manager_cpu_mean == doctest::Approx(0.25));
  CHECK(*c.manager_mem_peak == doctest::Approx(1003.0));
  CHECK_FALSE(c.agent_cpu_mean.has_value());
  CHECK_FALSE(c.agent_mem_peak.has_value());
  CHECK_FALSE(c.workload_cpu_mean.has_value());

  // Mixed streams against an independent summation.
  std::mt19937_64 rng(3);
  MetricSeries mixed(Qualifier::one_to_many, "agent_count", 3.0, 7.0);
  double bytes = 0.0, cpu_sum = 0.0;
  int cpu_n = 0;
  std::uint64_t mem_max = 0;
  for (int i = 0; i < 300; ++i) {
    const std::uint64_t req = 1 + rng() % 100, resp = 1 + rng() % 1000;
    if (rng() % 4 == 0) {
      mixed.record(failed_sample(i, "a" + std::to_string(i % 3), SampleStatus::timeout, req));
      bytes += static_cast<double>(req);
    } else {
      mixed.record(ok_sample(i, "a" + std::to_string(i % 3), 0.01, 1, req, resp));
      bytes += static_cast<double>(req + resp);
    }
    if (i % 10 == 0) {
      const double cpu = static_cast<double>(rng() % 1000) / 1000.0;
      const std::uint64_t mem = rng() % 100000;
      mixed.record(resource(i, Entity::agent, cpu, mem));
      cpu_sum += cpu;
      ++cpu_n;
      mem_max = std::max(mem_max, mem);
    }
  }
  const auto m = cost_summary(mixed);
  CHECK(*m.network_bytes_per_sec == doctest::Approx(bytes / 7.0).epsilon(1e-12));
  CHECK(*m.agent_cpu_mean == doctest::Approx(cpu_sum / cpu_n).epsilon(1e-12));
  CHECK(*m.agent_mem_peak == doctest::Approx(static_cast<double>(mem_max)));
}

TEST_CASE("quality summary") {
  std::vector<MetricSample> fast;
  for (int i = 0; i < 10; ++i) fast.push_back(ok_sample(i, "a" + std::to_string(i % 2), 0.1));
  const auto q = quality_summary(series_of(fast, 10.0), 1.0);
  CHECK(q.timeliness == 1.0);
  CHECK(q.temporal_error_mean == 0.0);

  std::vector<MetricSample> split;
  for (int i = 0; i < 10; ++i) split.push_back(ok_sample(i, "a" + std::to_string(i % 2), i % 2 ? 1.5 : 0.5));
  const auto h = quality_summary(series_of(split, 10.0), 1.0);
  CHECK(h.timeliness == doctest::Approx(0.5));
  CHECK(h.temporal_error_mean == doctest::Approx(0.5));

  std::vector<MetricSample> with_failures = {ok_sample(0, "A", 0.1), failed_sample(1, "B", SampleStatus::timeout),
                                             ok_sample(2, "A", 0.1), failed_sample(3, "B", SampleStatus::error)};
  CHECK(quality_summary(series_of(with_failures, 4.0), 1.0).timeliness == doctest::Approx(0.5));

  CHECK_THROWS(quality_summary(series_of(fast, 10.0), 0.0));
}

TEST_CASE("timeliness is monotone in the tolerance") {
  std::mt19937_64 rng(17);
  std::exponential_distribution<double> e(3.0);
  std::vector<MetricSample> samples;
  for (int i = 0; i < 500; ++i) samples.push_back(ok_sample(i, "a" + std::to_string(i % 5), e(rng)));
  const auto series = series_of(samples, 500.0);
  double prev = 0.0;
  for (double tau = 0.01; tau < 3.0; tau *= 1.3) {
    const double t = quality_summary(series, tau).timeliness;
    CHECK(t >= prev);
    prev = t;
  }
}

TEST_CASE("summaries are permutation invariant within equal timestamps") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<MetricSample> samples;
  for (int t = 0; t < 20; ++t)
    for (int a = 0; a < 5; ++a) samples.push_back(ok_sample(t, "a" + std::to_string(a), u(rng), 1 + a));
  auto shuffled = samples;
  for (std::size_t i = 0; i < shuffled.size(); i += 5)
    std::shuffle(shuffled.begin() + static_cast<long>(i), shuffled.begin() + static_cast<long>(i + 5), rng);
  const auto a = series_of(samples, 20.0), b = series_of(shuffled, 20.0);
  CHECK(speed_summary(a).delay_mean == speed_summary(b).delay_mean);
  CHECK(speed_summary(a).throughput_attrs_per_sec == speed_summary(b).throughput_attrs_per_sec);
  CHECK(quality_summary(a, 0.5).timeliness == quality_summary(b, 0.5).timeliness);
  CHECK(quality_summary(a, 0.5).temporal_error_mean == quality_summary(b, 0.5).temporal_error_mean);

  // Concatenation of two halves equals the merged list.
  std::vector<MetricSample> first(samples.begin(), samples.begin() + 50);
  std::vector<MetricSample> second(samples.begin() + 50, samples.end());
  std::vector<MetricSample> merged = first;
  merged.insert(merged.end(), second.begin(), second.end());
  CHECK(speed_summary(series_of(merged, 20.0)).delay_p95 == speed_summary(a).delay_p95);
}

TEST_CASE("sample csv round trip") {
  std::vector<MetricSample> samples = {ok_sample(0.5, "agent-0", 0.000123456789, 3, 13, 43),
                                       failed_sample(1.0, "agent-1", SampleStatus::timeout, 13),
                                       failed_sample(1.5, "agent-1", SampleStatus::error, 0)};
  std::ostringstream out;
  write_samples_csv(out, "run-1", samples);
  const auto text = out.str();
  CHECK(text.rfind(std::string(kSampleCsvHeader) + "\n", 0) == 0);
  std::istringstream in(text);
  const auto table = read_samples_csv(in);
  CHECK(table.run_id == "run-1");
  REQUIRE(table.samples.size() == 3);
  CHECK(*table.samples[0].delay == 0.000123456789);
  CHECK(table.samples[0].attribute_count == 3);
  CHECK(table.samples[1].status == SampleStatus::timeout);
  CHECK_FALSE(table.samples[1].delay.has_value());
  CHECK(table.samples[2].status == SampleStatus::error);

  std::vector<ResourceSample> res = {resource(1.0, Entity::manager, 0.125, 2048),
                                     resource(1.0, Entity::workload, 0.5, 0)};
  std::ostringstream rout;
  write_resources_csv(rout, "run-1", res);
  std::istringstream rin(rout.str());
  const auto rtable = read_resources_csv(rin);
  REQUIRE(rtable.resources.size() == 2);
  CHECK(rtable.resources[0].cpu_fraction == 0.125);
  CHECK(rtable.resources[1].entity == Entity::workload);
}

TEST_CASE("csv readers reject malformed input with line numbers") {
  std::istringstream bad_header("run,timestamp\n");
  CHECK_THROWS_AS(read_samples_csv(bad_header), InputError);

  std::istringstream bad_row(std::string(kSampleCsvHeader) + "\nr,0.5,a,poll,1,abc,1,1,ok\n");
  try {
    read_samples_csv(bad_row);
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }

  std::istringstream mixed(std::string(kSampleCsvHeader) +
                           "\nr1,0.5,a,poll,1,0.1,1,1,ok\nr2,0.6,a,poll,1,0.1,1,1,ok\n");
  CHECK_THROWS_AS(read_samples_csv(mixed), InputError);
}
