#include "monlab/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "monlab/error.hpp"
#include "monlab/format.hpp"

namespace monlab {

std::string_view to_string(Family f) {
  switch (f) {
    case Family::normal: return "normal";
    case Family::lognormal: return "lognormal";
    case Family::weibull: return "weibull";
  }
  return "normal";
}

std::optional<Family> parse_family(std::string_view text) {
  if (text == "normal") return Family::normal;
  if (text == "lognormal") return Family::lognormal;
  if (text == "weibull") return Family::weibull;
  return std::nullopt;
}

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be > 0");
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string(what) + " must be finite");
}

}  // namespace

DistributionSpec DistributionSpec::normal(double mu, double sigma) {
  require_finite(mu, "normal mu");
  require_positive(sigma, "normal sigma");
  return {Family::normal, mu, sigma};
}

DistributionSpec DistributionSpec::lognormal(double mu_log, double sigma_log) {
  require_finite(mu_log, "lognormal mu_log");
  require_positive(sigma_log, "lognormal sigma_log");
  return {Family::lognormal, mu_log, sigma_log};
}

DistributionSpec DistributionSpec::weibull(double shape, double scale) {
  require_positive(shape, "weibull shape");
  require_positive(scale, "weibull scale");
  return {Family::weibull, shape, scale};
}

std::pair<std::string_view, std::string_view> DistributionSpec::param_names() const {
  switch (family_) {
    case Family::normal: return {"mu", "sigma"};
    case Family::lognormal: return {"mu_log", "sigma_log"};
    case Family::weibull: return {"shape", "scale"};
  }
  return {"", ""};
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Acklam's rational approximation (relative error ~1e-9) followed by one
// Halley step against erfc, which brings it to full double precision.
double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile: p must be in (0,1)");
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Refine in whichever tail keeps the residual well conditioned.
  const double e = (p < 0.5) ? normal_cdf(x) - p
                             : (1.0 - p) - 0.5 * std::erfc(x / std::numbers::sqrt2);
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

double cdf(const DistributionSpec& spec, double x) {
  switch (spec.family()) {
    case Family::normal:
      return normal_cdf((x - spec.first()) / spec.second());
    case Family::lognormal:
      if (x <= 0.0) return 0.0;
      return normal_cdf((std::log(x) - spec.first()) / spec.second());
    case Family::weibull:
      if (x <= 0.0) return 0.0;
      return -std::expm1(-std::pow(x / spec.second(), spec.first()));
  }
  return 0.0;
}

double quantile(const DistributionSpec& spec, double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile: p must be in (0,1)");
  switch (spec.family()) {
    case Family::normal:
      return spec.first() + spec.second() * normal_quantile(p);
    case Family::lognormal:
      return std::exp(spec.first() + spec.second() * normal_quantile(p));
    case Family::weibull:
      return spec.second() * std::pow(-std::log1p(-p), 1.0 / spec.first());
  }
  return 0.0;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

UniformStream::UniformStream(std::uint64_t seed) : state_(seed) {}

double UniformStream::next() {
  // splitmix64; the top 53 bits plus a half-ulp offset never hit 0 or 1.
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return (static_cast<double>(z >> 11) + 0.5) * 0x1.0p-53;
}

std::vector<double> sample(const DistributionSpec& spec, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw DomainError("sample: n must be >= 1");
  UniformStream u(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = quantile(spec, u.next());
  return out;
}

double delay_at(const DelayModel& model, double u) {
  if (const auto* c = std::get_if<ConstantDelay>(&model)) return c->seconds;
  return std::max(0.0, quantile(std::get<DistributionSpec>(model), u));
}

DelayModel parse_delay_model(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw InputError("delay model '" + std::string(text) + "' needs the form family:params");
  const auto name = trim(text.substr(0, colon));
  const auto args = text.substr(colon + 1);
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= args.size()) {
    const auto comma = args.find(',', start);
    const auto token = args.substr(start, comma == std::string_view::npos ? args.npos : comma - start);
    auto v = parse_double(token);
    if (!v) throw InputError("delay model '" + std::string(text) + "': bad number");
    values.push_back(*v);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  try {
    if (name == "const" || name == "constant") {
      if (values.size() != 1 || !(values[0] >= 0.0))
        throw InputError("const delay takes one non-negative value");
      return ConstantDelay{values[0]};
    }
    auto family = parse_family(name);
    if (!family) throw InputError("unknown delay family '" + std::string(name) + "'");
    if (values.size() != 2) throw InputError("delay family takes two parameters");
    switch (*family) {
      case Family::normal: return DistributionSpec::normal(values[0], values[1]);
      case Family::lognormal: return DistributionSpec::lognormal(values[0], values[1]);
      case Family::weibull: return DistributionSpec::weibull(values[0], values[1]);
    }
  } catch (const DomainError& e) {
    throw InputError(e.what());
  }
  throw InputError("unreachable delay model");
}

std::string to_string(const DelayModel& model) {
  if (const auto* c = std::get_if<ConstantDelay>(&model))
    return "const:" + format_double(c->seconds);
  const auto& s = std::get<DistributionSpec>(model);
  return std::string(to_string(s.family())) + ":" + format_double(s.first()) + "," +
         format_double(s.second());
}

}  // namespace monlab
