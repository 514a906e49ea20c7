#pragma once

// Deterministic Monte Carlo model of a centralized aggregating monitor:
// every poll instant the manager asks all agents for their current value,
// responses come back after a random delay, and the manager aggregates the
// freshest value it has received from each agent.

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "monlab/distributions.hpp"

namespace monlab {

// Monotone event counter: value(t) = rate * t.
struct RateCounter {
  double rate = 1.0;
};

// +/- step at every poll instant, starting from `start`.
struct RandomWalk {
  double step = 1.0;
  double start = 0.0;
};

using ValueProcess = std::variant<RateCounter, RandomWalk>;

// "rate:R" or "walk:step[,start]". Throws InputError.
ValueProcess parse_value_process(std::string_view text);
std::string to_string(const ValueProcess& process);

enum class Aggregation { sum, mean };

Aggregation parse_aggregation(std::string_view text);
std::string_view to_string(Aggregation a);

struct SimPlan {
  std::size_t agent_count = 1;
  double poll_interval = 1.0;
  double duration = 100.0;
  DelayModel delay = DistributionSpec::weibull(0.7, 1.0);
  ValueProcess process = RateCounter{};
  Aggregation aggregation = Aggregation::sum;
  // Time the manager spends ingesting one response. Responses are served
  // first-come first-served by a single manager; 0 means infinitely fast.
  double manager_service = 0.0;
  std::uint64_t seed = 1;
  // Leading poll intervals excluded from the summary statistics.
  std::size_t warmup_intervals = 3;

  // Throws InputError when agent_count < 1, poll_interval <= 0,
  // duration < 10 * poll_interval or manager_service < 0.
  void validate() const;
};

struct DistortionSummary {
  double rmse = 0.0;
  double mean_abs_rel_error = 0.0;
  double max_staleness_s = 0.0;
};

struct DistortionTrace {
  std::vector<double> times;               // poll instants
  std::vector<double> real_aggregate;      // A(t) from true agent values
  std::vector<double> observed_aggregate;  // manager view from last received values
  std::vector<double> per_point_error;     // observed - real
  std::vector<double> staleness;           // max over agents of t - arrival of held value
  std::size_t warmup_points = 0;
  DistortionSummary summary;
};

DistortionTrace simulate(const SimPlan& plan);

// rmse, mean |error| / max(|A|, 1e-9) and max staleness over the points after
// warm-up. Throws InputError on an empty or inconsistent trace.
DistortionSummary spatial_error_summary(const DistortionTrace& trace);

}  // namespace monlab
