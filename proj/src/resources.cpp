#include "monlab/resources.hpp"

#include <sched.h>
#include <time.h>

#include <algorithm>

namespace monlab::bench {

namespace {
std::size_t idx(Entity e) { return static_cast<std::size_t>(e); }
}  // namespace

void ResourceLedger::add_cpu(Entity e, std::int64_t ns) {
  cpu_[idx(e)].fetch_add(ns, std::memory_order_relaxed);
  active_[idx(e)].store(true, std::memory_order_relaxed);
}

std::int64_t ResourceLedger::cpu_ns(Entity e) const {
  return cpu_[idx(e)].load(std::memory_order_relaxed);
}

void ResourceLedger::set_memory(Entity e, std::uint64_t bytes) {
  mem_[idx(e)].store(static_cast<std::int64_t>(bytes), std::memory_order_relaxed);
  active_[idx(e)].store(true, std::memory_order_relaxed);
}

void ResourceLedger::add_memory(Entity e, std::int64_t delta) {
  mem_[idx(e)].fetch_add(delta, std::memory_order_relaxed);
  active_[idx(e)].store(true, std::memory_order_relaxed);
}

std::uint64_t ResourceLedger::memory(Entity e) const {
  return static_cast<std::uint64_t>(std::max<std::int64_t>(0, mem_[idx(e)].load(std::memory_order_relaxed)));
}

bool ResourceLedger::active(Entity e) const {
  return active_[idx(e)].load(std::memory_order_relaxed);
}

std::int64_t thread_cpu_ns() {
  timespec ts{};
  clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return static_cast<std::int64_t>(ts.tv_sec) * 1'000'000'000 + ts.tv_nsec;
}

ThreadCpuMeter::ThreadCpuMeter() : last_ns_(thread_cpu_ns()) {}

void ThreadCpuMeter::charge(ResourceLedger& ledger, Entity e) {
  const auto now = thread_cpu_ns();
  ledger.add_cpu(e, now - last_ns_);
  last_ns_ = now;
}

void ThreadCpuMeter::skip() { last_ns_ = thread_cpu_ns(); }

unsigned usable_cpus() {
  cpu_set_t set;
  CPU_ZERO(&set);
  if (sched_getaffinity(0, sizeof(set), &set) == 0) {
    const int n = CPU_COUNT(&set);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ResourceSampler::ResourceSampler(ResourceLedger& ledger, Clock::time_point epoch,
                                 double interval_s, std::vector<Entity> entities)
    : ledger_(ledger),
      epoch_(epoch),
      interval_(std::chrono::nanoseconds(static_cast<std::int64_t>(interval_s * 1e9))),
      entities_(std::move(entities)),
      last_time_(epoch) {
  for (Entity e : entities_) last_cpu_[idx(e)] = ledger_.cpu_ns(e);
  thread_ = std::thread([this] { loop(); });
}

ResourceSampler::~ResourceSampler() {
  if (thread_.joinable()) stop();
}

void ResourceSampler::loop() {
  std::unique_lock lock(mutex_);
  auto next = epoch_ + interval_;
  while (!stopping_) {
    if (cv_.wait_until(lock, next, [this] { return stopping_; })) break;
    take_sample(Clock::now());
    next += interval_;
  }
}

void ResourceSampler::take_sample(Clock::time_point now) {
  const double wall_ns =
      static_cast<double>(std::chrono::duration_cast<std::chrono::nanoseconds>(now - last_time_).count());
  if (wall_ns <= 0.0) return;
  const double capacity = wall_ns * static_cast<double>(usable_cpus());
  const double t = std::chrono::duration<double>(now - epoch_).count();
  for (Entity e : entities_) {
    const auto cpu = ledger_.cpu_ns(e);
    const double used = static_cast<double>(cpu - last_cpu_[idx(e)]);
    last_cpu_[idx(e)] = cpu;
    samples_.push_back({t, e, std::clamp(used / capacity, 0.0, 1.0), ledger_.memory(e)});
  }
  last_time_ = now;
}

std::vector<ResourceSample> ResourceSampler::stop() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  cv_.notify_all();
  if (thread_.joinable()) thread_.join();
  // The final partial interval only counts when it is long enough to say
  // something; a sliver would be dominated by timer jitter.
  const auto now = Clock::now();
  if (samples_.empty() || now - last_time_ >= interval_ / 4) take_sample(now);
  return std::move(samples_);
}

}  // namespace monlab::bench
