#include "monlab/derived.hpp"

#include <cmath>

#include "monlab/error.hpp"

namespace monlab {

CostWeights CostWeights::monitoring() {
  CostWeights w;
  w.workload_cpu = 0.0;
  w.workload_mem = 0.0;
  return w;
}

CostWeights CostWeights::functional() {
  return CostWeights{0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0};
}

double normalize_cost(const CostSummary& cost, const CostSummary& baseline,
                      const CostWeights& weights) {
  double weighted = 0.0;
  double weight_total = 0.0;
  auto add = [&](const std::optional<double>& c, const std::optional<double>& b, double w) {
    if (w <= 0.0 || !c || !b || !(*b > 0.0)) return;
    weighted += w * (*c / *b);
    weight_total += w;
  };
  add(cost.network_bytes_per_sec, baseline.network_bytes_per_sec, weights.network);
  add(cost.manager_cpu_mean, baseline.manager_cpu_mean, weights.manager_cpu);
  add(cost.agent_cpu_mean, baseline.agent_cpu_mean, weights.agent_cpu);
  add(cost.workload_cpu_mean, baseline.workload_cpu_mean, weights.workload_cpu);
  add(cost.manager_mem_peak, baseline.manager_mem_peak, weights.manager_mem);
  add(cost.agent_mem_peak, baseline.agent_mem_peak, weights.agent_mem);
  add(cost.workload_mem_peak, baseline.workload_mem_peak, weights.workload_mem);
  if (weight_total == 0.0) throw DomainError("incomparable cost vectors");
  return weighted / weight_total;
}

EfficiencyPoint efficiency(double R, double C, double Q, double factor_value) {
  if (!(C > 0.0)) throw DomainError("efficiency: cost C must be > 0");
  if (!(Q >= 0.0 && Q <= 1.0)) throw DomainError("efficiency: quality Q must be in [0,1]");
  if (!(R >= 0.0)) throw DomainError("efficiency: speed R must be >= 0");
  return {factor_value, R, C, Q, (R / C) * Q};
}

ProductivityPoint productivity(double F, double G, double factor_value) {
  if (!(F >= 0.0) || !(G >= 0.0)) throw DomainError("productivity: F and G must be >= 0");
  if (!(F + G > 0.0)) throw DomainError("productivity: no activity (F = G = 0)");
  return {factor_value, F, G, F / (F + G)};
}

ImpactResult management_impact(double E_baseline, double E_k, double k0, double k) {
  if (!(E_baseline > 0.0)) throw DomainError("management impact: E(k0) must be > 0");
  if (!(E_k >= 0.0)) throw DomainError("management impact: E(k) must be >= 0");
  const double mim = 1.0 - E_k / E_baseline;
  return {k0, k, mim, mim < 0.0};
}

ScalabilityResult scalability_degree(double G_k1, double G_k2, double k1, double k2) {
  if (!(G_k1 > 0.0)) throw DomainError("scalability degree: G(k1) must be > 0");
  if (!(G_k2 >= 0.0)) throw DomainError("scalability degree: G(k2) must be >= 0");
  return {k1, k2, G_k2 / G_k1};
}

std::vector<ScalabilityResult> scalability_curve(std::span<const EfficiencyPoint> points,
                                                 double baseline_k) {
  const EfficiencyPoint* base = nullptr;
  for (const auto& p : points)
    if (p.factor_value == baseline_k) {
      base = &p;
      break;
    }
  if (!base) throw InputError("scalability curve: no point at baseline k");
  std::vector<ScalabilityResult> out;
  out.reserve(points.size());
  for (const auto& p : points)
    out.push_back(scalability_degree(base->efficiency_G, p.efficiency_G, baseline_k,
                                     p.factor_value));
  return out;
}

EfficiencyPoint series_efficiency(const MetricSeries& series, const MetricSeries& baseline,
                                  double tolerance, const CostWeights& weights) {
  const auto speed = speed_summary(series);
  const double C = normalize_cost(cost_summary(series), cost_summary(baseline), weights);
  const auto quality = quality_summary(series, tolerance);
  return efficiency(speed.throughput_attrs_per_sec, C, quality.timeliness,
                    series.factor_value());
}

}  // namespace monlab
