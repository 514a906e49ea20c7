#include "monlab/analysis.hpp"

#include "monlab/error.hpp"

namespace monlab {

EfficiencyPoint functional_efficiency(const MetricSeries& workload,
                                      const MetricSeries& baseline_workload, double task_deadline) {
  return series_efficiency(workload, baseline_workload, task_deadline, CostWeights::functional());
}

DerivedReport derive_runs(std::span<const RunView> runs, double baseline_k,
                          std::string factor_name, std::string report_id) {
  const RunView* base = nullptr;
  for (const auto& r : runs)
    if (r.k == baseline_k) {
      base = &r;
      break;
    }
  if (!base) throw InputError("no run at baseline k = " + std::to_string(baseline_k));

  DerivedReport report;
  report.run_id = std::move(report_id);
  report.factor_name = std::move(factor_name);
  for (const auto& r : runs)
    report.points.push_back(series_efficiency(*r.monitoring, *base->monitoring, r.delay_tolerance,
                                              CostWeights::monitoring()));
  report.scalability = scalability_curve(report.points, baseline_k);

  if (base->workload) {
    const std::size_t base_index = static_cast<std::size_t>(base - runs.data());
    const auto F0 = functional_efficiency(*base->workload, *base->workload, base->task_deadline);
    const auto E0 = productivity(F0.efficiency_G, report.points[base_index].efficiency_G, baseline_k);
    for (std::size_t i = 0; i < runs.size(); ++i) {
      if (!runs[i].workload) continue;
      const auto F = functional_efficiency(*runs[i].workload, *base->workload, runs[i].task_deadline);
      const auto E = productivity(F.efficiency_G, report.points[i].efficiency_G, runs[i].k);
      report.productivity.push_back(E);
      report.impact.push_back(
          management_impact(E0.productivity_E, E.productivity_E, baseline_k, runs[i].k));
    }
  }
  return report;
}

}  // namespace monlab
