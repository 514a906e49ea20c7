#pragma once

#include <span>
#include <vector>

#include "monlab/distributions.hpp"

namespace monlab {

struct FitReport {
  DistributionSpec spec;
  std::size_t sample_count = 0;
  double ks_statistic = 1.0;
  bool ks_pass_at_0_05 = false;
};

inline constexpr std::size_t kMinFitSamples = 10;

// Shape bracket for the Weibull profile-likelihood root.
inline constexpr double kWeibullShapeMin = 0.05;
inline constexpr double kWeibullShapeMax = 50.0;

/// Maximum-likelihood fit of a two-parameter family.
///
/// Normal and lognormal use the closed forms (1/n variance). Weibull solves
/// the profile equation
///   sum(x^k ln x) / sum(x^k) - 1/k - mean(ln x) = 0
/// for the shape k by safeguarded Newton inside [0.05, 50], then
/// scale = (mean(x^k))^(1/k).
///
/// Throws InputError for fewer than 10 samples or values outside the
/// family's support, FitError for zero-variance data or non-convergence.
FitReport fit_mle(std::span<const double> delays, Family family);

// One-sample Kolmogorov-Smirnov D against a fully specified distribution.
double ks_statistic(std::span<const double> delays, const DistributionSpec& spec);

// Asymptotic alpha = 0.05 critical value, 1.36 / sqrt(n).
double ks_critical_0_05(std::size_t n);

// Two-sample KS D statistic and its asymptotic critical value at level alpha
// (alpha in {0.10, 0.05, 0.01, 0.001}).
double ks_two_sample(std::span<const double> a, std::span<const double> b);
double ks_two_sample_critical(std::size_t n, std::size_t m, double alpha);

/// Fits every requested family and keeps the smallest KS statistic; ties go
/// to the simpler family (normal < lognormal < weibull). Families that fail
/// to fit are skipped; FitError lists every cause when all of them fail.
FitReport select_model(std::span<const double> delays, std::span<const Family> families);

// Model-predicted fraction of responses faster than `tolerance`.
double predict_timeliness(const DistributionSpec& spec, double tolerance);

}  // namespace monlab
