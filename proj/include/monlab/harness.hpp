#pragma once

// Benchmark runs: N synthetic agents, an optional functional workload, and a
// manager polling them in rounds at a fixed rate.

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "monlab/agent.hpp"
#include "monlab/derived.hpp"
#include "monlab/metrics.hpp"
#include "monlab/workload.hpp"

namespace monlab::bench {

struct BenchPlan {
  std::size_t agent_count = 1;
  double poll_rate = 1.0;  // rounds per second
  std::uint32_t attributes_per_poll = 1;
  double duration = 10.0;
  double delay_tolerance = 1.0;
  double round_timeout = 1.0;
  std::optional<WorkloadConfig> workload;
  std::uint64_t seed = 1;
  ValueModel value_model;
  std::optional<DelayModel> service_delay;

  // Throws InputError on invalid values.
  void validate() const;
  // Non-fatal advice, e.g. a round timeout longer than the poll interval.
  std::vector<std::string> warnings() const;
  double poll_interval() const { return 1.0 / poll_rate; }
};

/// Flat `key = value` plan text. Blank lines and lines starting with '#' are
/// ignored. Required keys: agent_count, poll_rate, attributes_per_poll,
/// duration_s, delay_tolerance_s, round_timeout_s, seed. The workload.* keys
/// (task_rate, task_size, task_deadline_s, colocated) come as a complete set
/// or not at all. Optional: agent.value_model, agent.service_delay.
/// Throws InputError naming the offending key.
BenchPlan parse_plan(std::istream& in);
std::string format_plan(const BenchPlan& plan);

struct BenchOptions {
  std::string run_id;            // empty: derived from the plan
  std::uint16_t port_base = 0;   // 0: ephemeral ports, else port_base + agent index
  double resource_interval = 1.0;
  std::string factor_name = "agent_count";
  std::size_t max_backlog_rounds = 10;
};

std::string default_run_id(const BenchPlan& plan);
double factor_value(const BenchPlan& plan, const std::string& factor_name);

struct RunRecord {
  std::string run_id;
  BenchPlan plan;
  MetricSeries monitoring;
  std::optional<MetricSeries> workload;
  std::string started_at;   // UTC, ISO 8601
  std::string finished_at;
  std::size_t rounds = 0;
  double elapsed = 0.0;     // seconds from first scheduled round to end of run
  double achieved_round_rate = 0.0;
  bool aborted = false;     // partial data: the manager fell too far behind
  std::string abort_reason;
};

/// Executes the plan. Spawn failures throw RunAborted (nothing to report);
/// an overloaded manager (backlog above max_backlog_rounds) stops the run
/// early and returns the partial record flagged `aborted`.
RunRecord run_bench(const BenchPlan& plan, const BenchOptions& options = {});

struct ImpactPoint {
  double rate = 0.0;
  std::string run_id;
  bool valid = true;
  std::string invalid_reason;
  EfficiencyPoint monitoring;  // G(k)
  EfficiencyPoint functional;  // F(k)
  double E_baseline = 0.0;
  double E_k = 0.0;
  std::optional<RunRecord> record;  // absent when the run could not start
};

/// One run per monitor rate; the lowest rate is the baseline k0. F and G are
/// both normalized against the baseline run. An aborted run invalidates its
/// own point only; an invalid baseline throws RunAborted.
std::vector<ImpactPoint> impact_experiment(const BenchPlan& plan_with_workload,
                                           std::span<const double> monitor_rates,
                                           const BenchOptions& options = {});

}  // namespace monlab::bench
