#pragma once

// Derived metrics over a set of measured runs sharing one factor.

#include <span>
#include <string>

#include "monlab/derived.hpp"
#include "monlab/metrics.hpp"

namespace monlab {

struct RunView {
  std::string run_id;
  double k = 0.0;
  const MetricSeries* monitoring = nullptr;
  const MetricSeries* workload = nullptr;  // optional
  double delay_tolerance = 1.0;
  double task_deadline = 1.0;
};

/// Efficiency points for every run (cost normalized to the baseline run, the
/// first run whose k equals baseline_k), the scalability curve, and when the
/// baseline carries a workload, productivity and impact for every run that
/// does too. Throws InputError when no run sits at baseline_k.
DerivedReport derive_runs(std::span<const RunView> runs, double baseline_k,
                          std::string factor_name, std::string report_id);

// Functional efficiency F(k) of a workload series against the baseline's.
EfficiencyPoint functional_efficiency(const MetricSeries& workload,
                                      const MetricSeries& baseline_workload, double task_deadline);

}  // namespace monlab
