#include "monlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "monlab/error.hpp"

namespace monlab {

std::string_view to_string(Activity a) {
  switch (a) {
    case Activity::poll: return "poll";
    case Activity::task: return "task";
  }
  return "poll";
}

std::string_view to_string(SampleStatus s) {
  switch (s) {
    case SampleStatus::ok: return "ok";
    case SampleStatus::timeout: return "timeout";
    case SampleStatus::error: return "error";
  }
  return "error";
}

std::string_view to_string(Entity e) {
  switch (e) {
    case Entity::manager: return "manager";
    case Entity::agent: return "agent";
    case Entity::workload: return "workload";
  }
  return "manager";
}

std::string_view to_string(Qualifier q) {
  return q == Qualifier::one_to_one ? "one_to_one" : "one_to_many";
}

std::optional<Activity> parse_activity(std::string_view text) {
  if (text == "poll") return Activity::poll;
  if (text == "task") return Activity::task;
  return std::nullopt;
}

std::optional<SampleStatus> parse_status(std::string_view text) {
  if (text == "ok") return SampleStatus::ok;
  if (text == "timeout") return SampleStatus::timeout;
  if (text == "error") return SampleStatus::error;
  return std::nullopt;
}

std::optional<Entity> parse_entity(std::string_view text) {
  if (text == "manager") return Entity::manager;
  if (text == "agent") return Entity::agent;
  if (text == "workload") return Entity::workload;
  return std::nullopt;
}

void validate(const MetricSample& s) {
  if (!std::isfinite(s.timestamp)) throw InputError("sample timestamp is not finite");
  if (s.status == SampleStatus::ok) {
    if (!s.delay || !(*s.delay >= 0.0) || !std::isfinite(*s.delay))
      throw InputError("ok sample needs a finite non-negative delay");
    if (s.attribute_count < 1) throw InputError("ok sample carries no attributes");
    // Workload tasks do not travel over the wire.
    if (s.activity == Activity::poll && (s.request_bytes == 0 || s.response_bytes == 0))
      throw InputError("ok poll sample needs request and response bytes");
  } else if (s.delay) {
    throw InputError("delay is undefined for non-ok samples");
  }
}

void validate(const ResourceSample& s) {
  if (!(s.cpu_fraction >= 0.0 && s.cpu_fraction <= 1.0))
    throw InputError("cpu_fraction outside [0,1]");
}

MetricSeries::MetricSeries(Qualifier qualifier, std::string factor_name,
                           double factor_value, double duration_s)
    : qualifier_(qualifier),
      factor_name_(std::move(factor_name)),
      factor_value_(factor_value),
      duration_(duration_s) {}

void MetricSeries::record(MetricSample sample) {
  monlab::validate(sample);
  if (!samples_.empty() && sample.timestamp < samples_.back().timestamp)
    throw InputError("sample timestamp goes backwards");
  auto it = std::lower_bound(agents_.begin(), agents_.end(), sample.agent_id);
  const bool known = it != agents_.end() && *it == sample.agent_id;
  if (!known) {
    if (qualifier_ == Qualifier::one_to_one && !agents_.empty())
      throw InputError("one_to_one series already bound to agent '" + agents_.front() +
                       "', got '" + sample.agent_id + "'");
    agents_.insert(it, sample.agent_id);
  }
  samples_.push_back(std::move(sample));
}

void MetricSeries::record(ResourceSample sample) {
  monlab::validate(sample);
  resources_.push_back(sample);
}

void MetricSeries::validate() const {
  if (qualifier_ == Qualifier::one_to_many && agents_.size() < 2)
    throw InputError("one_to_many series references fewer than two agents");
  for (std::size_t i = 1; i < samples_.size(); ++i)
    if (samples_[i].timestamp < samples_[i - 1].timestamp)
      throw InputError("series timestamps are not nondecreasing");
}

double percentile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw InputError("percentile of empty range");
  const double pos = static_cast<double>(sorted.size() - 1) * std::clamp(q, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

namespace {

// Sums ascending-sorted values so the result does not depend on input order.
double ordered_sum(std::vector<double>& values) {
  std::sort(values.begin(), values.end());
  return std::accumulate(values.begin(), values.end(), 0.0);
}

}  // namespace

SpeedSummary speed_summary(std::span<const MetricSample> samples, double duration) {
  if (!(duration > 0.0)) throw DomainError("speed summary needs duration > 0");
  SpeedSummary out;
  std::uint64_t attrs = 0;
  std::vector<double> delays;
  for (const auto& s : samples) {
    switch (s.status) {
      case SampleStatus::ok:
        ++out.ok_count;
        attrs += s.attribute_count;
        delays.push_back(*s.delay);
        break;
      case SampleStatus::timeout: ++out.timeout_count; break;
      case SampleStatus::error: ++out.error_count; break;
    }
  }
  out.throughput_attrs_per_sec = static_cast<double>(attrs) / duration;
  if (delays.empty()) return out;
  const double total = ordered_sum(delays);
  out.delay_mean = total / static_cast<double>(delays.size());
  out.delay_p50 = percentile_sorted(delays, 0.50);
  out.delay_p95 = percentile_sorted(delays, 0.95);
  out.delay_p99 = percentile_sorted(delays, 0.99);
  out.delay_max = delays.back();
  return out;
}

SpeedSummary speed_summary(const MetricSeries& series) {
  return speed_summary(series.samples(), series.duration());
}

CostSummary cost_summary(const MetricSeries& series) {
  if (!(series.duration() > 0.0)) throw DomainError("cost summary needs duration > 0");
  CostSummary out;
  std::uint64_t bytes = 0;
  bool any_wire = false;
  for (const auto& s : series.samples()) {
    if (s.activity != Activity::poll) continue;
    any_wire = true;
    bytes += s.request_bytes + s.response_bytes;
  }
  if (any_wire) out.network_bytes_per_sec = static_cast<double>(bytes) / series.duration();

  struct Acc {
    std::vector<double> cpu;
    std::optional<double> mem_peak;
  };
  Acc acc[3];
  for (const auto& r : series.resources()) {
    auto& a = acc[static_cast<int>(r.entity)];
    a.cpu.push_back(r.cpu_fraction);
    const auto mem = static_cast<double>(r.memory_bytes);
    a.mem_peak = a.mem_peak ? std::max(*a.mem_peak, mem) : mem;
  }
  auto mean = [](std::vector<double>& v) -> std::optional<double> {
    if (v.empty()) return std::nullopt;
    return ordered_sum(v) / static_cast<double>(v.size());
  };
  out.manager_cpu_mean = mean(acc[0].cpu);
  out.agent_cpu_mean = mean(acc[1].cpu);
  out.workload_cpu_mean = mean(acc[2].cpu);
  out.manager_mem_peak = acc[0].mem_peak;
  out.agent_mem_peak = acc[1].mem_peak;
  out.workload_mem_peak = acc[2].mem_peak;
  return out;
}

QualitySummary quality_summary(std::span<const MetricSample> samples,
                               double delay_tolerance) {
  if (!(delay_tolerance > 0.0)) throw DomainError("delay tolerance must be > 0");
  QualitySummary out;
  out.delay_tolerance = delay_tolerance;
  if (samples.empty()) return out;
  std::size_t timely = 0;
  std::vector<double> excess;
  for (const auto& s : samples) {
    if (s.status != SampleStatus::ok) continue;  // timeouts and errors are late
    if (*s.delay < delay_tolerance)
      ++timely;
    else
      excess.push_back(*s.delay - delay_tolerance);
  }
  out.timeliness = static_cast<double>(timely) / static_cast<double>(samples.size());
  if (!excess.empty())
    out.temporal_error_mean = ordered_sum(excess) / static_cast<double>(excess.size());
  return out;
}

QualitySummary quality_summary(const MetricSeries& series, double delay_tolerance) {
  return quality_summary(series.samples(), delay_tolerance);
}

std::vector<double> ok_delays(const MetricSeries& series) {
  std::vector<double> out;
  for (const auto& s : series.samples())
    if (s.status == SampleStatus::ok) out.push_back(*s.delay);
  return out;
}

}  // namespace monlab
