#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "monlab/distributions.hpp"
#include "monlab/error.hpp"
#include "monlab/fitting.hpp"

using namespace monlab;

namespace {

std::vector<DistributionSpec> assorted_specs() {
  return {DistributionSpec::normal(0.0, 1.0),     DistributionSpec::normal(0.3, 0.05),
          DistributionSpec::lognormal(-1.0, 0.5), DistributionSpec::lognormal(2.0, 1.5),
          DistributionSpec::weibull(0.7, 1.0),    DistributionSpec::weibull(1.5, 0.8),
          DistributionSpec::weibull(5.0, 0.01)};
}

}  // namespace

TEST_CASE("constructors reject invalid parameters") {
  CHECK_THROWS_AS(DistributionSpec::normal(0, 0), DomainError);
  CHECK_THROWS_AS(DistributionSpec::lognormal(0, -1), DomainError);
  CHECK_THROWS_AS(DistributionSpec::weibull(0, 1), DomainError);
  CHECK_THROWS_AS(DistributionSpec::weibull(1, 0), DomainError);
  CHECK_THROWS_AS(DistributionSpec::normal(NAN, 1), DomainError);
}

TEST_CASE("cdf reference points") {
  for (double k : {0.3, 0.7, 1.0, 2.5, 10.0})
    CHECK(cdf(DistributionSpec::weibull(k, 1.7), 1.7) ==
          doctest::Approx(0.6321205588285577).epsilon(1e-12));
  CHECK(cdf(DistributionSpec::lognormal(-1.3, 0.4), std::exp(-1.3)) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(cdf(DistributionSpec::normal(0.25, 3.0), 0.25) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(cdf(DistributionSpec::weibull(1, 1), -1.0) == 0.0);
  CHECK(cdf(DistributionSpec::lognormal(0, 1), 0.0) == 0.0);
  CHECK(cdf(DistributionSpec::weibull(0.7, 1.0), 1e9) == doctest::Approx(1.0));
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-14));
}

TEST_CASE("quantile reference points") {
  CHECK(quantile(DistributionSpec::normal(0, 1), 0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0));
  CHECK(normal_quantile(1e-10) == doctest::Approx(-6.361340902404056).epsilon(1e-10));
  CHECK(quantile(DistributionSpec::weibull(0.7, 2.5), 1.0 - std::exp(-1.0)) ==
        doctest::Approx(2.5).epsilon(1e-12));
  CHECK_THROWS_AS(quantile(DistributionSpec::normal(0, 1), 0.0), DomainError);
  CHECK_THROWS_AS(quantile(DistributionSpec::normal(0, 1), 1.0), DomainError);
  CHECK_THROWS_AS(quantile(DistributionSpec::normal(0, 1), -0.2), DomainError);
}

TEST_CASE("cdf and quantile round trip on interior points") {
  for (const auto& spec : assorted_specs()) {
    double prev = -INFINITY;
    for (int i = 1; i <= 99; ++i) {
      const double p = i / 100.0;
      const double x = quantile(spec, p);
      CHECK(x > prev);
      prev = x;
      CHECK(std::fabs(cdf(spec, x) - p) <= 1e-9 * p);
      CHECK(quantile(spec, cdf(spec, x)) == doctest::Approx(x).epsilon(1e-9));
    }
  }
}

TEST_CASE("sampling is deterministic and in support") {
  const auto spec = DistributionSpec::weibull(0.7, 1.0);
  CHECK(sample(spec, 1, 42) == sample(spec, 1, 42));
  CHECK(sample(spec, 100, 42) == sample(spec, 100, 42));
  CHECK(sample(spec, 100, 42) != sample(spec, 100, 43));
  for (double x : sample(DistributionSpec::lognormal(0, 2), 10000, 7)) CHECK(x > 0.0);
  for (double x : sample(spec, 10000, 8)) CHECK(x > 0.0);
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}

TEST_CASE("uniform stream stays strictly inside the unit interval") {
  UniformStream u(0);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double x = u.next();
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
  CHECK(lo < 1e-3);
  CHECK(hi > 1.0 - 1e-3);
}

TEST_CASE("exponential special case mean") {
  const auto xs = sample(DistributionSpec::weibull(1.0, 2.0), 100000, 99);
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  // Exponential: sd = mean = 2, standard error = 2 / sqrt(n).
  CHECK(std::fabs(mean - 2.0) < 3.0 * 2.0 / std::sqrt(100000.0));
}

TEST_CASE("KS self consistency over seeds") {
  for (const auto& spec : assorted_specs()) {
    int pass = 0;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      const auto xs = sample(spec, 10000, 1000 + seed);
      if (ks_statistic(xs, spec) <= ks_critical_0_05(xs.size())) ++pass;
    }
    CHECK(pass >= 38);
  }
}

TEST_CASE("delay model parsing") {
  const auto c = parse_delay_model("const:0.005");
  REQUIRE(std::holds_alternative<ConstantDelay>(c));
  CHECK(std::get<ConstantDelay>(c).seconds == 0.005);
  CHECK(delay_at(c, 0.3) == 0.005);
  const auto w = parse_delay_model("weibull:0.7,1.0");
  CHECK(std::get<DistributionSpec>(w) == DistributionSpec::weibull(0.7, 1.0));
  CHECK(to_string(w) == "weibull:0.7,1");
  CHECK(parse_delay_model(to_string(w)) == w);
  CHECK(delay_at(parse_delay_model("normal:0,1"), 0.01) == 0.0);
  CHECK_THROWS_AS(parse_delay_model("weibull:0.7"), InputError);
  CHECK_THROWS_AS(parse_delay_model("gamma:1,2"), InputError);
  CHECK_THROWS_AS(parse_delay_model("const:-1"), InputError);
  CHECK_THROWS_AS(parse_delay_model("weibull:0,1"), InputError);
  CHECK_THROWS_AS(parse_delay_model(""), InputError);
}
