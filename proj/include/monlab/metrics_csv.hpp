#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "monlab/metrics.hpp"

namespace monlab {

inline constexpr const char* kSampleCsvHeader =
    "run_id,timestamp_s,agent_id,activity,attr_count,delay_s,req_bytes,resp_bytes,status";
inline constexpr const char* kResourceCsvHeader =
    "run_id,timestamp_s,entity,cpu_fraction,mem_bytes";

void write_samples_csv(std::ostream& out, const std::string& run_id,
                       std::span<const MetricSample> samples);
void write_resources_csv(std::ostream& out, const std::string& run_id,
                         std::span<const ResourceSample> resources);

struct SampleTable {
  std::string run_id;
  std::vector<MetricSample> samples;
};

struct ResourceTable {
  std::string run_id;
  std::vector<ResourceSample> resources;
};

// Both readers require the exact header row and throw InputError naming the
// offending line otherwise.
SampleTable read_samples_csv(std::istream& in);
ResourceTable read_resources_csv(std::istream& in);

}  // namespace monlab
