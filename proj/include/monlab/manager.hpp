#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "monlab/agent.hpp"
#include "monlab/metrics.hpp"
#include "monlab/resources.hpp"

namespace monlab::bench {

/// Polling manager holding one persistent connection per agent.
///
/// A round sends one GET to every agent back to back, then collects replies
/// until all have answered or the round timeout expires. Agents that miss the
/// timeout yield `timeout` samples and their connection is dropped, so a late
/// reply can never be mistaken for the next round's answer; the connection is
/// re-established at the start of the following round.
class Manager {
 public:
  Manager(std::vector<Endpoint> endpoints, Clock::time_point epoch,
          ResourceLedger* ledger = nullptr);
  ~Manager();
  Manager(const Manager&) = delete;
  Manager& operator=(const Manager&) = delete;

  // Samples come back in agent order; timestamps are send times relative to
  // the epoch. Exactly one sample per agent.
  std::vector<MetricSample> poll_round(std::size_t attributes_per_poll, double timeout_s);

  std::size_t agent_count() const;

  // Management data stored at the manager for n agents polled for k attributes.
  static std::uint64_t storage_bytes(std::size_t agents, std::size_t attributes_per_poll);

 private:
  struct Conn;
  std::vector<Conn> conns_;
  Clock::time_point epoch_;
  ResourceLedger* ledger_;
  std::size_t storage_attrs_ = 0;
};

}  // namespace monlab::bench
