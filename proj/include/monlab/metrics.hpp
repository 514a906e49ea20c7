#pragma once

// Primary metrics: raw measurement records and the speed / cost / quality
// summaries computed over them.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace monlab {

enum class Activity { poll, task };
enum class SampleStatus { ok, timeout, error };
enum class Entity { manager, agent, workload };
enum class Qualifier { one_to_one, one_to_many };

std::string_view to_string(Activity a);
std::string_view to_string(SampleStatus s);
std::string_view to_string(Entity e);
std::string_view to_string(Qualifier q);
std::optional<Activity> parse_activity(std::string_view text);
std::optional<SampleStatus> parse_status(std::string_view text);
std::optional<Entity> parse_entity(std::string_view text);

/// One timestamped measurement of a monitoring operation.
///
/// `delay` is measured at the manager from the first request byte sent to the
/// last response byte received. It is only present for `ok` samples.
struct MetricSample {
  double timestamp = 0.0;  // seconds since run start, monotonic clock
  std::string agent_id;
  Activity activity = Activity::poll;
  std::uint32_t attribute_count = 1;
  std::optional<double> delay;
  std::uint64_t request_bytes = 0;
  std::uint64_t response_bytes = 0;
  SampleStatus status = SampleStatus::ok;
};

struct ResourceSample {
  double timestamp = 0.0;
  Entity entity = Entity::manager;
  double cpu_fraction = 0.0;  // share of total host CPU capacity, [0,1]
  std::uint64_t memory_bytes = 0;
};

// Throws InputError when a sample breaks the record-level invariants.
void validate(const MetricSample& sample);
void validate(const ResourceSample& sample);

/// A tagged collection of samples measured under one factor value.
///
/// Appends are single-writer; a finished series is shared read-only.
class MetricSeries {
 public:
  MetricSeries() = default;
  MetricSeries(Qualifier qualifier, std::string factor_name, double factor_value,
               double duration_s);

  // Appends a sample. Throws InputError on an invalid sample, on a timestamp
  // earlier than the last one, or on a second agent in a one_to_one series.
  void record(MetricSample sample);
  void record(ResourceSample sample);

  // Whole-series invariants that can only be checked once recording is done
  // (one_to_many needs at least two distinct agents).
  void validate() const;

  Qualifier qualifier() const { return qualifier_; }
  const std::string& factor_name() const { return factor_name_; }
  double factor_value() const { return factor_value_; }
  double duration() const { return duration_; }
  void set_duration(double seconds) { duration_ = seconds; }

  std::span<const MetricSample> samples() const { return samples_; }
  std::span<const ResourceSample> resources() const { return resources_; }
  std::size_t distinct_agents() const { return agents_.size(); }

 private:
  Qualifier qualifier_ = Qualifier::one_to_many;
  std::string factor_name_;
  double factor_value_ = 0.0;
  double duration_ = 0.0;
  std::vector<MetricSample> samples_;
  std::vector<ResourceSample> resources_;
  std::vector<std::string> agents_;  // sorted, distinct
};

struct SpeedSummary {
  double throughput_attrs_per_sec = 0.0;
  std::optional<double> delay_mean;
  std::optional<double> delay_p50;
  std::optional<double> delay_p95;
  std::optional<double> delay_p99;
  std::optional<double> delay_max;
  std::size_t ok_count = 0;
  std::size_t timeout_count = 0;
  std::size_t error_count = 0;
};

// Absent fields mean "no resource samples for that entity", never zero cost.
struct CostSummary {
  std::optional<double> network_bytes_per_sec;
  std::optional<double> manager_cpu_mean;
  std::optional<double> agent_cpu_mean;
  std::optional<double> workload_cpu_mean;
  std::optional<double> manager_mem_peak;
  std::optional<double> agent_mem_peak;
  std::optional<double> workload_mem_peak;
};

struct QualitySummary {
  double delay_tolerance = 0.0;
  double timeliness = 0.0;
  double temporal_error_mean = 0.0;
};

// Percentile of an ascending-sorted range by linear interpolation between
// closest ranks: position (n - 1) * q, q in [0, 1].
double percentile_sorted(std::span<const double> sorted, double q);

SpeedSummary speed_summary(const MetricSeries& series);
CostSummary cost_summary(const MetricSeries& series);
QualitySummary quality_summary(const MetricSeries& series, double delay_tolerance);

// Raw sample lists, for callers holding samples outside a series.
SpeedSummary speed_summary(std::span<const MetricSample> samples, double duration);
QualitySummary quality_summary(std::span<const MetricSample> samples,
                               double delay_tolerance);

// Ok-sample delays in recording order.
std::vector<double> ok_delays(const MetricSeries& series);

}  // namespace monlab
