#pragma once

// Per-entity resource accounting for the in-process harness.
//
// Manager, agents and workload share one process, so OS process counters
// cannot tell them apart. Each thread instead reads its own CPU clock and
// charges the delta to the entity it was working for. Memory is the amount of
// management data an entity stores (connection state, attribute tables, task
// backlog), reported as a gauge.

#include <array>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <thread>
#include <vector>

#include "monlab/metrics.hpp"

namespace monlab::bench {

using Clock = std::chrono::steady_clock;

class ResourceLedger {
 public:
  void add_cpu(Entity e, std::int64_t nanoseconds);
  std::int64_t cpu_ns(Entity e) const;

  void set_memory(Entity e, std::uint64_t bytes);
  void add_memory(Entity e, std::int64_t delta);
  std::uint64_t memory(Entity e) const;

  // Whether anything has ever been charged to the entity.
  bool active(Entity e) const;

 private:
  std::array<std::atomic<std::int64_t>, 3> cpu_{};
  std::array<std::atomic<std::int64_t>, 3> mem_{};
  std::array<std::atomic<bool>, 3> active_{};
};

// Reads the calling thread's CPU clock. Must be used on one thread only.
class ThreadCpuMeter {
 public:
  ThreadCpuMeter();
  // Charges CPU time used since the previous charge (or construction).
  void charge(ResourceLedger& ledger, Entity e);
  // Drops CPU time used since the previous charge (already charged elsewhere).
  void skip();

 private:
  std::int64_t last_ns_;
};

std::int64_t thread_cpu_ns();

// CPUs this process may run on (affinity mask), at least 1.
unsigned usable_cpus();

/// Background sampler turning ledger counters into ResourceSamples at a fixed
/// cadence. cpu_fraction = cpu delta / (wall delta * usable cpus).
class ResourceSampler {
 public:
  ResourceSampler(ResourceLedger& ledger, Clock::time_point epoch, double interval_s,
                  std::vector<Entity> entities);
  ~ResourceSampler();
  ResourceSampler(const ResourceSampler&) = delete;
  ResourceSampler& operator=(const ResourceSampler&) = delete;

  // Stops the thread, takes a final partial-interval sample and returns all
  // samples in time order.
  std::vector<ResourceSample> stop();

 private:
  void loop();
  void take_sample(Clock::time_point now);

  ResourceLedger& ledger_;
  Clock::time_point epoch_;
  std::chrono::nanoseconds interval_;
  std::vector<Entity> entities_;
  std::array<std::int64_t, 3> last_cpu_{};
  Clock::time_point last_time_;
  std::vector<ResourceSample> samples_;
  std::mutex mutex_;
  std::condition_variable cv_;
  bool stopping_ = false;
  std::thread thread_;
};

}  // namespace monlab::bench
