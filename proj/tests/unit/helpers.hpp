#pragma once

#include <cmath>
#include <string>

#include "monlab/metrics.hpp"

namespace monlab::testing {

inline MetricSample ok_sample(double t, const std::string& agent, double delay,
                              std::uint32_t attrs = 1, std::uint64_t req = 10,
                              std::uint64_t resp = 20) {
  MetricSample s;
  s.timestamp = t;
  s.agent_id = agent;
  s.attribute_count = attrs;
  s.delay = delay;
  s.request_bytes = req;
  s.response_bytes = resp;
  s.status = SampleStatus::ok;
  return s;
}

inline MetricSample failed_sample(double t, const std::string& agent, SampleStatus status,
                                  std::uint64_t req = 10) {
  MetricSample s;
  s.timestamp = t;
  s.agent_id = agent;
  s.request_bytes = req;
  s.status = status;
  return s;
}

inline ResourceSample resource(double t, Entity e, double cpu, std::uint64_t mem) {
  return ResourceSample{t, e, cpu, mem};
}

inline bool rel_close(double a, double b, double rel) {
  return std::fabs(a - b) <= rel * std::max(std::fabs(a), std::fabs(b));
}

}  // namespace monlab::testing
