#include "monlab/simulation.hpp"

#include <algorithm>
#include <cmath>

#include "monlab/error.hpp"
#include "monlab/format.hpp"

namespace monlab {

ValueProcess parse_value_process(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw InputError("value process '" + std::string(text) + "': expected rate:R or walk:step[,start]");
  const auto kind = text.substr(0, colon);
  const auto args = text.substr(colon + 1);
  if (kind == "rate") {
    const auto rate = parse_double(args);
    if (!rate || !std::isfinite(*rate)) throw InputError("value process: bad rate '" + std::string(args) + "'");
    return RateCounter{*rate};
  }
  if (kind == "walk") {
    const auto comma = args.find(',');
    const auto step = parse_double(args.substr(0, comma));
    if (!step || !std::isfinite(*step) || *step < 0.0)
      throw InputError("value process: bad walk step '" + std::string(args) + "'");
    RandomWalk walk{*step, 0.0};
    if (comma != std::string_view::npos) {
      const auto start = parse_double(args.substr(comma + 1));
      if (!start || !std::isfinite(*start))
        throw InputError("value process: bad walk start '" + std::string(args) + "'");
      walk.start = *start;
    }
    return walk;
  }
  throw InputError("value process: unknown kind '" + std::string(kind) + "'");
}

std::string to_string(const ValueProcess& process) {
  if (const auto* r = std::get_if<RateCounter>(&process)) return "rate:" + format_double(r->rate);
  const auto& w = std::get<RandomWalk>(process);
  return "walk:" + format_double(w.step) + "," + format_double(w.start);
}

Aggregation parse_aggregation(std::string_view text) {
  if (text == "sum") return Aggregation::sum;
  if (text == "mean") return Aggregation::mean;
  throw InputError("aggregation must be sum or mean, got '" + std::string(text) + "'");
}

std::string_view to_string(Aggregation a) { return a == Aggregation::sum ? "sum" : "mean"; }

void SimPlan::validate() const {
  if (agent_count < 1) throw InputError("simulation needs at least one agent");
  if (!(poll_interval > 0.0)) throw InputError("poll interval must be > 0");
  if (!(duration >= 10.0 * poll_interval))
    throw InputError("duration must cover at least 10 poll intervals");
  if (!(manager_service >= 0.0)) throw InputError("manager service time must be >= 0");
}

namespace {

struct Arrival {
  double time;
  std::uint32_t agent;
  std::uint32_t generation;  // poll index whose value the response carries
};

bool earlier(const Arrival& a, const Arrival& b) {
  if (a.time != b.time) return a.time < b.time;
  if (a.agent != b.agent) return a.agent < b.agent;
  return a.generation < b.generation;
}

}  // namespace

DistortionTrace simulate(const SimPlan& plan) {
  plan.validate();
  const std::size_t agents = plan.agent_count;
  const auto polls = static_cast<std::size_t>(std::floor(plan.duration / plan.poll_interval + 1e-9));

  std::vector<double> times(polls);
  for (std::size_t j = 0; j < polls; ++j) times[j] = static_cast<double>(j) * plan.poll_interval;

  // values[a * polls + j]: agent a's true value at poll j.
  std::vector<double> values(agents * polls);
  std::vector<Arrival> arrivals;
  arrivals.reserve(agents * polls);
  for (std::size_t a = 0; a < agents; ++a) {
    UniformStream delay_stream(derive_seed(plan.seed, 2 * a));
    UniformStream value_stream(derive_seed(plan.seed, 2 * a + 1));
    double walk = 0.0;
    if (const auto* w = std::get_if<RandomWalk>(&plan.process)) walk = w->start;
    for (std::size_t j = 0; j < polls; ++j) {
      double v;
      if (const auto* rc = std::get_if<RateCounter>(&plan.process)) {
        v = rc->rate * times[j];
      } else {
        const auto& w = std::get<RandomWalk>(plan.process);
        if (j > 0) walk += value_stream.next() < 0.5 ? -w.step : w.step;
        v = walk;
      }
      values[a * polls + j] = v;
      const double d = delay_at(plan.delay, delay_stream.next());
      arrivals.push_back({times[j] + d, static_cast<std::uint32_t>(a),
                          static_cast<std::uint32_t>(j)});
    }
  }
  std::sort(arrivals.begin(), arrivals.end(), earlier);
  if (plan.manager_service > 0.0) {
    double busy_until = 0.0;
    for (auto& ev : arrivals) {
      busy_until = std::max(busy_until, ev.time) + plan.manager_service;
      ev.time = busy_until;
    }
  }

  constexpr std::uint32_t kNone = UINT32_MAX;
  std::vector<std::uint32_t> held(agents, kNone);
  std::vector<double> held_arrival(agents, 0.0);

  DistortionTrace trace;
  trace.times = times;
  trace.real_aggregate.resize(polls);
  trace.observed_aggregate.resize(polls);
  trace.per_point_error.resize(polls);
  trace.staleness.resize(polls);
  trace.warmup_points = std::min(plan.warmup_intervals, polls);

  const double scale = plan.aggregation == Aggregation::mean ? 1.0 / static_cast<double>(agents) : 1.0;
  std::size_t next = 0;
  for (std::size_t j = 0; j < polls; ++j) {
    const double t = times[j];
    for (; next < arrivals.size() && arrivals[next].time <= t; ++next) {
      const auto& ev = arrivals[next];
      // Out-of-order responses never overwrite a fresher value.
      if (held[ev.agent] == kNone || ev.generation > held[ev.agent]) {
        held[ev.agent] = ev.generation;
        held_arrival[ev.agent] = ev.time;
      }
    }
    double real = 0.0, observed = 0.0, stale = 0.0;
    for (std::size_t a = 0; a < agents; ++a) {
      real += values[a * polls + j];
      if (held[a] != kNone) {
        observed += values[a * polls + held[a]];
        stale = std::max(stale, t - held_arrival[a]);
      } else {
        stale = std::max(stale, t);
      }
    }
    trace.real_aggregate[j] = real * scale;
    trace.observed_aggregate[j] = observed * scale;
    trace.per_point_error[j] = trace.observed_aggregate[j] - trace.real_aggregate[j];
    trace.staleness[j] = stale;
  }
  trace.summary = spatial_error_summary(trace);
  return trace;
}

DistortionSummary spatial_error_summary(const DistortionTrace& trace) {
  const auto n = trace.times.size();
  if (n == 0) throw InputError("empty distortion trace");
  if (trace.real_aggregate.size() != n || trace.observed_aggregate.size() != n ||
      trace.per_point_error.size() != n)
    throw InputError("distortion trace lists differ in length");
  if (trace.warmup_points >= n) throw InputError("distortion trace has no points after warm-up");
  constexpr double eps = 1e-9;
  double sq = 0.0, rel = 0.0, stale = 0.0;
  for (std::size_t i = trace.warmup_points; i < n; ++i) {
    const double e = trace.per_point_error[i];
    sq += e * e;
    rel += std::abs(e) / std::max(std::abs(trace.real_aggregate[i]), eps);
    if (i < trace.staleness.size()) stale = std::max(stale, trace.staleness[i]);
  }
  const double count = static_cast<double>(n - trace.warmup_points);
  return {std::sqrt(sq / count), rel / count, stale};
}

}  // namespace monlab
