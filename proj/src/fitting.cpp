#include "monlab/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>

#include "monlab/error.hpp"

namespace monlab {

namespace {

struct MeanStd {
  double mean;
  double std;
};

MeanStd mean_std(std::span<const double> v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / n)};
}

bool all_equal(std::span<const double> v) {
  return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end();
}

// Profile-likelihood shape equation for the Weibull MLE, on logs shifted by
// their maximum so x^k never overflows. Returns g(k) and g'(k).
struct Profile {
  std::span<const double> y;  // ln x - max ln x, all <= 0
  double mean_y;

  std::pair<double, double> operator()(double k) const {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (double yi : y) {
      const double w = std::exp(k * yi);
      s0 += w;
      s1 += w * yi;
      s2 += w * yi * yi;
    }
    const double ratio = s1 / s0;
    const double g = ratio - 1.0 / k - mean_y;
    const double dg = (s2 / s0 - ratio * ratio) + 1.0 / (k * k);
    return {g, dg};
  }
};

DistributionSpec fit_weibull(std::span<const double> x) {
  std::vector<double> y(x.size());
  std::transform(x.begin(), x.end(), y.begin(), [](double v) { return std::log(v); });
  const double max_log = *std::max_element(y.begin(), y.end());
  for (auto& v : y) v -= max_log;
  const double mean_y = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  const Profile g{y, mean_y};

  double lo = kWeibullShapeMin;
  double hi = kWeibullShapeMax;
  if (g(lo).first > 0.0 || g(hi).first < 0.0)
    throw FitError("weibull fit: shape root outside [0.05, 50]");

  // g is increasing in k; Newton steps that leave the bracket fall back to bisection.
  double k = 1.0;
  for (int iter = 0; iter < 200; ++iter) {
    const auto [val, deriv] = g(k);
    if (val > 0.0)
      hi = k;
    else
      lo = k;
    double next = k - val / deriv;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - k) < 1e-10) {
      k = next;
      double mean_w = 0.0;
      for (double yi : y) mean_w += std::exp(k * yi);
      mean_w /= static_cast<double>(y.size());
      const double scale = std::exp(max_log) * std::pow(mean_w, 1.0 / k);
      return DistributionSpec::weibull(k, scale);
    }
    k = next;
  }
  throw FitError("weibull fit: shape did not converge in 200 iterations");
}

}  // namespace

FitReport fit_mle(std::span<const double> delays, Family family) {
  if (delays.size() < kMinFitSamples)
    throw InputError("fit needs at least 10 samples, got " + std::to_string(delays.size()));
  for (double d : delays) {
    if (!std::isfinite(d)) throw InputError("fit: non-finite delay");
    if (family != Family::normal && !(d > 0.0))
      throw InputError(std::string("fit: non-positive delay for ") +
                       std::string(to_string(family)));
  }
  if (all_equal(delays)) throw FitError("fit: degenerate sample (zero variance)");

  auto spec = [&]() -> DistributionSpec {
    switch (family) {
      case Family::normal: {
        const auto m = mean_std(delays);
        return DistributionSpec::normal(m.mean, m.std);
      }
      case Family::lognormal: {
        std::vector<double> logs(delays.size());
        std::transform(delays.begin(), delays.end(), logs.begin(),
                       [](double v) { return std::log(v); });
        const auto m = mean_std(logs);
        if (!(m.std > 0.0)) throw FitError("fit: degenerate sample (zero log variance)");
        return DistributionSpec::lognormal(m.mean, m.std);
      }
      case Family::weibull:
        return fit_weibull(delays);
    }
    throw FitError("fit: unknown family");
  }();

  FitReport report{spec, delays.size(), ks_statistic(delays, spec), false};
  report.ks_pass_at_0_05 = report.ks_statistic <= ks_critical_0_05(delays.size());
  return report;
}

double ks_statistic(std::span<const double> delays, const DistributionSpec& spec) {
  if (delays.size() < kMinFitSamples) throw InputError("ks statistic needs at least 10 samples");
  std::vector<double> sorted(delays.begin(), delays.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(spec, sorted[i]);
    const double upper = static_cast<double>(i + 1) / n;
    const double lower = static_cast<double>(i) / n;
    d = std::max({d, std::abs(upper - f), std::abs(lower - f)});
  }
  return d;
}

double ks_critical_0_05(std::size_t n) { return 1.36 / std::sqrt(static_cast<double>(n)); }

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InputError("two-sample ks needs nonempty samples");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size()), m = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  return d;
}

double ks_two_sample_critical(std::size_t n, std::size_t m, double alpha) {
  double c;
  if (alpha >= 0.10)
    c = 1.22;
  else if (alpha >= 0.05)
    c = 1.36;
  else if (alpha >= 0.01)
    c = 1.63;
  else
    c = 1.95;
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  return c * std::sqrt((nn + mm) / (nn * mm));
}

FitReport select_model(std::span<const double> delays, std::span<const Family> families_in) {
  if (families_in.empty()) throw InputError("select_model: no families requested");
  if (delays.size() < kMinFitSamples)
    throw InputError("fit needs at least 10 samples, got " + std::to_string(delays.size()));
  std::vector<Family> families(families_in.begin(), families_in.end());
  std::sort(families.begin(), families.end());
  families.erase(std::unique(families.begin(), families.end()), families.end());

  std::optional<FitReport> best;
  std::string causes;
  for (Family f : families) {
    try {
      auto report = fit_mle(delays, f);
      if (!best || report.ks_statistic < best->ks_statistic) best = report;
    } catch (const std::exception& e) {
      if (!causes.empty()) causes += "; ";
      causes += std::string(to_string(f)) + ": " + e.what();
    }
  }
  if (!best) throw FitError("no family could be fitted (" + causes + ")");
  return *best;
}

double predict_timeliness(const DistributionSpec& spec, double tolerance) {
  if (!(tolerance > 0.0)) throw DomainError("predict_timeliness: tolerance must be > 0");
  return cdf(spec, tolerance);
}

}  // namespace monlab
