#pragma once

#include <atomic>
#include <cstdint>
#include <mutex>
#include <vector>

#include "monlab/metrics.hpp"
#include "monlab/resources.hpp"

namespace monlab::bench {

struct WorkloadConfig {
  double task_rate = 50.0;       // tasks per second, periodic arrivals
  double task_size = 1.0;        // work units, ~1 ms of CPU each
  double task_deadline = 0.005;  // seconds, arrival to completion
  bool colocated = false;        // run on agent 0's thread instead of its own

  void validate() const;  // throws InputError unless all values are positive
};

// Fixed-iteration arithmetic loop, calibrated once per process against the
// thread CPU clock to about one millisecond per unit.
void run_work_units(double units);
double kernel_iterations_per_unit();

/// Synthetic functional service. Tasks arrive every 1/task_rate seconds from
/// start() until the run duration ends and are executed by whichever thread
/// calls run_due(): a dedicated thread (isolated) or an agent (colocated).
class Workload {
 public:
  Workload(WorkloadConfig config, double duration_s, ResourceLedger* ledger);

  void start(Clock::time_point epoch);

  // Executes every task whose arrival time has passed and returns the next
  // arrival, or Clock::time_point::max() when not started or exhausted.
  // Must always be called from the same thread.
  Clock::time_point run_due();

  // Tasks that arrived but never ran are recorded as timeouts. Call after the
  // executing thread has stopped.
  void finish();

  const WorkloadConfig& config() const { return config_; }
  std::vector<MetricSample> take_samples();

 private:
  WorkloadConfig config_;
  double duration_;
  ResourceLedger* ledger_;
  std::size_t total_tasks_;
  std::atomic<bool> started_{false};
  Clock::time_point epoch_{};
  std::size_t next_task_ = 0;
  std::mutex samples_mutex_;
  std::vector<MetricSample> samples_;
};

}  // namespace monlab::bench
