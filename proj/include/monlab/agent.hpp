#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "monlab/distributions.hpp"
#include "monlab/resources.hpp"
#include "monlab/workload.hpp"

namespace monlab::bench {

struct ValueModel {
  enum class Kind { constant, random_walk, rate_counter };
  Kind kind = Kind::constant;
  // constant: the value; random_walk: step per request; rate_counter: events/s.
  double param = 42.0;
};

// "constant:42", "random_walk:0.5", "rate_counter:100". Throws InputError.
ValueModel parse_value_model(std::string_view text);
std::string to_string(const ValueModel& model);

struct AgentConfig {
  std::string agent_id;
  std::uint16_t listen_port = 0;  // 0 picks an ephemeral port
  std::uint32_t attribute_count = 1;
  ValueModel value_model;
  // Artificial per-request processing time, slept on the agent's thread.
  std::optional<DelayModel> service_delay;
  bool colocated_workload = false;
  std::uint64_t seed = 0;
};

struct Endpoint {
  std::string agent_id;
  std::uint16_t port = 0;
};

// Raised when one or more agents could not bind; every agent that did start
// has already been shut down.
class SpawnError : public std::runtime_error {
 public:
  SpawnError(const std::string& what, std::vector<std::string> failed)
      : std::runtime_error(what), failed_agents(std::move(failed)) {}
  std::vector<std::string> failed_agents;
};

struct FleetOptions {
  ResourceLedger* ledger = nullptr;
  // Executed on the thread of the agent(s) configured with colocated_workload.
  Workload* colocated_workload = nullptr;
};

/// A set of running synthetic agents, one thread and one listening socket
/// each. Every agent serves a single connection at a time and handles its
/// requests serially. Destruction stops and joins all agents.
class AgentFleet {
 public:
  static AgentFleet spawn(const std::vector<AgentConfig>& configs, FleetOptions options = {});

  AgentFleet(AgentFleet&&) noexcept;
  AgentFleet& operator=(AgentFleet&&) noexcept;
  ~AgentFleet();

  const std::vector<Endpoint>& endpoints() const { return endpoints_; }
  std::size_t size() const { return endpoints_.size(); }
  void stop();

  // Storage held by one agent: attribute table plus connection buffer.
  static std::uint64_t storage_bytes(const AgentConfig& config);

 private:
  struct Agent;
  AgentFleet() = default;
  std::vector<std::unique_ptr<Agent>> agents_;
  std::vector<Endpoint> endpoints_;
};

}  // namespace monlab::bench
