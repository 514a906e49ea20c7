#pragma once

// Two-parameter delay distributions (normal, lognormal, weibull): CDF,
// quantile and seeded inverse-transform sampling.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace monlab {

enum class Family { normal, lognormal, weibull };

std::string_view to_string(Family f);
std::optional<Family> parse_family(std::string_view text);

/// A delay distribution. Parameter meaning depends on the family:
///   normal    first = mu,     second = sigma       (seconds)
///   lognormal first = mu_log, second = sigma_log   (log-seconds)
///   weibull   first = shape,  second = scale       (scale in seconds)
class DistributionSpec {
 public:
  static DistributionSpec normal(double mu, double sigma);
  static DistributionSpec lognormal(double mu_log, double sigma_log);
  static DistributionSpec weibull(double shape, double scale);

  Family family() const { return family_; }
  double first() const { return first_; }
  double second() const { return second_; }

  // Parameter names as used in reports, e.g. {"shape", "scale"}.
  std::pair<std::string_view, std::string_view> param_names() const;

  bool operator==(const DistributionSpec&) const = default;

 private:
  DistributionSpec(Family f, double a, double b) : family_(f), first_(a), second_(b) {}
  Family family_;
  double first_;
  double second_;
};

double cdf(const DistributionSpec& spec, double x);
// Throws DomainError unless 0 < p < 1.
double quantile(const DistributionSpec& spec, double p);

// Standard normal helpers.
double normal_cdf(double z);
double normal_quantile(double p);

/// Seedable 64-bit stream producing uniforms strictly inside (0, 1).
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed);
  double next();

 private:
  std::uint64_t state_;
};

// Mixes a base seed with a stream index (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Inverse-transform sampling; deterministic for a given (spec, n, seed).
std::vector<double> sample(const DistributionSpec& spec, std::size_t n, std::uint64_t seed);

/// Delay injected by harness agents or drawn by the simulator: either a fixed
/// value or a distribution (normal draws are clamped at zero).
struct ConstantDelay {
  double seconds = 0.0;
  bool operator==(const ConstantDelay&) const = default;
};
using DelayModel = std::variant<ConstantDelay, DistributionSpec>;

// Delay for uniform u in (0,1).
double delay_at(const DelayModel& model, double u);

// "const:0.005", "weibull:0.7,1.0", "lognormal:-1,0.5", "normal:0.1,0.02".
// Throws InputError on malformed text or invalid parameters.
DelayModel parse_delay_model(std::string_view text);
std::string to_string(const DelayModel& model);

}  // namespace monlab
