#include "monlab/workload.hpp"

#include <algorithm>
#include <cmath>

#include "monlab/error.hpp"

namespace monlab::bench {

void WorkloadConfig::validate() const {
  if (!(task_rate > 0.0) || !(task_size > 0.0) || !(task_deadline > 0.0))
    throw InputError("workload task_rate, task_size and task_deadline must be > 0");
}

namespace {

double spin(std::uint64_t iterations) {
  volatile double acc = 1.0;
  for (std::uint64_t i = 0; i < iterations; ++i) acc = acc * 1.0000001 + 1e-9;
  return acc;
}

double calibrate() {
  constexpr std::uint64_t probe = 2'000'000;
  spin(probe / 10);  // warm up
  std::int64_t best = INT64_MAX;
  for (int i = 0; i < 3; ++i) {
    const auto t0 = thread_cpu_ns();
    spin(probe);
    best = std::min(best, thread_cpu_ns() - t0);
  }
  return static_cast<double>(probe) * 1e6 / static_cast<double>(std::max<std::int64_t>(best, 1));
}

constexpr std::uint64_t kTaskRecordBytes = sizeof(MetricSample);

}  // namespace

double kernel_iterations_per_unit() {
  static const double per_unit = calibrate();
  return per_unit;
}

void run_work_units(double units) {
  spin(static_cast<std::uint64_t>(std::llround(units * kernel_iterations_per_unit())));
}

Workload::Workload(WorkloadConfig config, double duration_s, ResourceLedger* ledger)
    : config_(config),
      duration_(duration_s),
      ledger_(ledger),
      total_tasks_(static_cast<std::size_t>(std::ceil(duration_s * config.task_rate - 1e-9))) {
  config_.validate();
  kernel_iterations_per_unit();
  if (ledger_) ledger_->set_memory(Entity::workload, sizeof(Workload));
}

void Workload::start(Clock::time_point epoch) {
  epoch_ = epoch;
  started_.store(true, std::memory_order_release);
}

Clock::time_point Workload::run_due() {
  if (!started_.load(std::memory_order_acquire)) return Clock::time_point::max();
  const double period = 1.0 / config_.task_rate;
  auto arrival_of = [&](std::size_t i) {
    return epoch_ + std::chrono::duration_cast<Clock::duration>(
                        std::chrono::duration<double>(static_cast<double>(i) * period));
  };
  ThreadCpuMeter meter;
  while (next_task_ < total_tasks_) {
    const auto arrival = arrival_of(next_task_);
    const auto now = Clock::now();
    if (arrival > now) break;
    if (ledger_) {
      // Backlog of arrived-but-unserved tasks is the service's stored state.
      std::size_t backlog = 0;
      while (next_task_ + backlog < total_tasks_ && arrival_of(next_task_ + backlog) <= now) ++backlog;
      ledger_->set_memory(Entity::workload, sizeof(Workload) + backlog * kTaskRecordBytes);
    }
    run_work_units(config_.task_size);
    const auto done = Clock::now();
    MetricSample s;
    s.timestamp = std::chrono::duration<double>(arrival - epoch_).count();
    s.agent_id = "workload";
    s.activity = Activity::task;
    s.attribute_count = 1;
    s.delay = std::chrono::duration<double>(done - arrival).count();
    s.status = SampleStatus::ok;
    {
      std::lock_guard lock(samples_mutex_);
      samples_.push_back(std::move(s));
    }
    ++next_task_;
  }
  if (ledger_) meter.charge(*ledger_, Entity::workload);
  if (next_task_ >= total_tasks_) return Clock::time_point::max();
  return arrival_of(next_task_);
}

void Workload::finish() {
  if (!started_.load(std::memory_order_acquire)) return;
  const double period = 1.0 / config_.task_rate;
  std::lock_guard lock(samples_mutex_);
  for (; next_task_ < total_tasks_; ++next_task_) {
    const double t = static_cast<double>(next_task_) * period;
    if (t >= duration_) break;
    MetricSample s;
    s.timestamp = t;
    s.agent_id = "workload";
    s.activity = Activity::task;
    s.status = SampleStatus::timeout;
    samples_.push_back(std::move(s));
  }
}

std::vector<MetricSample> Workload::take_samples() {
  std::lock_guard lock(samples_mutex_);
  return std::move(samples_);
}

}  // namespace monlab::bench
