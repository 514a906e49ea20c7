#pragma once

// Derived metrics: efficiency, productivity, management impact and
// scalability degree, all computed from primary metric summaries.

#include <span>
#include <string>
#include <vector>

#include "monlab/metrics.hpp"

namespace monlab {

// G = (R / C) * Q
struct EfficiencyPoint {
  double factor_value = 0.0;
  double speed_R = 0.0;
  double cost_C = 1.0;
  double quality_Q = 1.0;
  double efficiency_G = 0.0;
};

// E = F / (F + G)
struct ProductivityPoint {
  double factor_value = 0.0;
  double functional_F = 0.0;
  double management_G = 0.0;
  double productivity_E = 1.0;
};

// mim = 1 - E(k) / E(k0). Reported raw; out_of_range marks mim < 0.
struct ImpactResult {
  double baseline_k0 = 0.0;
  double factor_k = 0.0;
  double mim = 0.0;
  bool out_of_range = false;
};

// psi = G(k2) / G(k1)
struct ScalabilityResult {
  double k1 = 0.0;
  double k2 = 0.0;
  double psi = 1.0;
};

/// Per-dimension weights used when a cost vector is reduced to a scalar.
/// A zero weight drops the dimension.
struct CostWeights {
  double network = 1.0;
  double manager_cpu = 1.0;
  double agent_cpu = 1.0;
  double workload_cpu = 1.0;
  double manager_mem = 1.0;
  double agent_mem = 1.0;
  double workload_mem = 1.0;

  // Monitoring plane only (network, manager and agent resources).
  static CostWeights monitoring();
  // Functional plane only (workload resources).
  static CostWeights functional();
};

/// Weighted mean of baseline-relative ratios over the dimensions present in
/// both vectors. Dimensions whose baseline is absent or zero are skipped.
/// Throws DomainError("incomparable cost vectors") when nothing is left.
double normalize_cost(const CostSummary& cost, const CostSummary& baseline,
                      const CostWeights& weights = {});

EfficiencyPoint efficiency(double R, double C, double Q, double factor_value = 0.0);
ProductivityPoint productivity(double F, double G, double factor_value = 0.0);
ImpactResult management_impact(double E_baseline, double E_k, double k0 = 0.0,
                               double k = 0.0);
ScalabilityResult scalability_degree(double G_k1, double G_k2, double k1 = 0.0,
                                     double k2 = 0.0);

// One result per point, relative to the point whose factor_value equals
// baseline_k. Throws InputError when the baseline point is missing.
std::vector<ScalabilityResult> scalability_curve(std::span<const EfficiencyPoint> points,
                                                 double baseline_k);

/// Efficiency of a measured series against a baseline series: R is the ok
/// throughput, C the cost normalized to the baseline under `weights`, Q the
/// timeliness at `tolerance`.
EfficiencyPoint series_efficiency(const MetricSeries& series, const MetricSeries& baseline,
                                  double tolerance, const CostWeights& weights);

struct DerivedReport {
  std::string run_id;
  std::string factor_name;
  std::vector<EfficiencyPoint> points;
  std::vector<ProductivityPoint> productivity;
  std::vector<ImpactResult> impact;
  std::vector<ScalabilityResult> scalability;
};

}  // namespace monlab
