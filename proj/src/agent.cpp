#include "monlab/agent.hpp"

#include <poll.h>
#include <sys/eventfd.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cmath>
#include <system_error>
#include <thread>

#include "monlab/error.hpp"
#include "monlab/format.hpp"
#include "monlab/wire.hpp"
#include "net.hpp"

namespace monlab::bench {

ValueModel parse_value_model(std::string_view text) {
  const auto colon = text.find(':');
  const auto name = trim(text.substr(0, colon));
  ValueModel model;
  if (name == "constant")
    model.kind = ValueModel::Kind::constant;
  else if (name == "random_walk")
    model.kind = ValueModel::Kind::random_walk;
  else if (name == "rate_counter")
    model.kind = ValueModel::Kind::rate_counter;
  else
    throw InputError("unknown value model '" + std::string(text) + "'");
  if (colon != std::string_view::npos) {
    auto v = parse_double(text.substr(colon + 1));
    if (!v) throw InputError("value model '" + std::string(text) + "': bad parameter");
    model.param = *v;
  } else if (model.kind != ValueModel::Kind::constant) {
    throw InputError("value model '" + std::string(text) + "' needs a parameter");
  }
  return model;
}

std::string to_string(const ValueModel& model) {
  const char* name = model.kind == ValueModel::Kind::constant      ? "constant"
                     : model.kind == ValueModel::Kind::random_walk ? "random_walk"
                                                                   : "rate_counter";
  return std::string(name) + ":" + format_double(model.param);
}

namespace {
constexpr std::size_t kReadChunk = 4096;
}

std::uint64_t AgentFleet::storage_bytes(const AgentConfig& config) {
  return config.attribute_count * (sizeof(double) + sizeof(std::string)) + kReadChunk;
}

struct AgentFleet::Agent {
  AgentConfig config;
  net::UniqueFd listener;
  net::UniqueFd wake;
  ResourceLedger* ledger = nullptr;
  Workload* workload = nullptr;
  std::thread thread;

  void request_stop() {
    const std::uint64_t one = 1;
    [[maybe_unused]] auto n = ::write(wake.get(), &one, sizeof(one));
  }

  void run();
  std::string respond(std::string_view line, double& walk_value, UniformStream& walk,
                      Clock::time_point start);
};

std::string AgentFleet::Agent::respond(std::string_view line, double& walk_value,
                                       UniformStream& walk, Clock::time_point start) {
  wire::GetRequest req;
  try {
    req = wire::parse_request(line);
  } catch (const InputError& e) {
    return wire::encode_error(e.what());
  }
  double value = config.value_model.param;
  switch (config.value_model.kind) {
    case ValueModel::Kind::constant: break;
    case ValueModel::Kind::random_walk:
      walk_value += walk.next() < 0.5 ? -config.value_model.param : config.value_model.param;
      value = walk_value;
      break;
    case ValueModel::Kind::rate_counter:
      value = std::floor(config.value_model.param *
                         std::chrono::duration<double>(Clock::now() - start).count());
      break;
  }
  std::vector<std::pair<std::string, double>> values;
  values.reserve(req.attribute_ids.size());
  for (auto& id : req.attribute_ids) {
    const auto index = id.size() > 1 && id[0] == 'a' ? parse_integer(std::string_view(id).substr(1))
                                                     : std::nullopt;
    if (!index || *index < 0 || *index >= static_cast<long long>(config.attribute_count))
      return wire::encode_error("unknown attribute " + id);
    values.emplace_back(std::move(id), value);
  }
  return wire::encode_values(values);
}

void AgentFleet::Agent::run() {
  ThreadCpuMeter meter;
  UniformStream service(derive_seed(config.seed, 0));
  UniformStream walk(derive_seed(config.seed, 1));
  double walk_value = 0.0;
  const auto start = Clock::now();
  net::UniqueFd conn;
  std::string inbuf;
  char chunk[kReadChunk];

  while (true) {
    timespec wait{};
    timespec* wait_ptr = nullptr;
    if (workload) {
      if (ledger) meter.charge(*ledger, Entity::agent);
      const auto next = workload->run_due();
      meter.skip();
      if (next != Clock::time_point::max()) {
        const auto ns = std::max<std::int64_t>(
            0, std::chrono::duration_cast<std::chrono::nanoseconds>(next - Clock::now()).count());
        wait.tv_sec = ns / 1'000'000'000;
        wait.tv_nsec = ns % 1'000'000'000;
        wait_ptr = &wait;
      }
    }
    pollfd fds[2] = {{wake.get(), POLLIN, 0}, {conn.valid() ? conn.get() : listener.get(), POLLIN, 0}};
    const int rc = ::ppoll(fds, 2, wait_ptr, nullptr);
    if (rc < 0 && errno != EINTR) break;
    if (fds[0].revents) break;
    if (fds[1].revents) {
      if (!conn.valid()) {
        conn = net::UniqueFd(::accept4(listener.get(), nullptr, nullptr, SOCK_CLOEXEC));
        if (conn.valid()) net::set_nodelay(conn.get());
      } else {
        const auto n = ::recv(conn.get(), chunk, sizeof(chunk), 0);
        if (n <= 0) {
          conn.reset();
          inbuf.clear();
        } else {
          inbuf.append(chunk, static_cast<std::size_t>(n));
          std::size_t pos;
          while (conn.valid() && (pos = inbuf.find('\n')) != std::string::npos) {
            const std::string line = inbuf.substr(0, pos);
            inbuf.erase(0, pos + 1);
            auto reply = respond(line, walk_value, walk, start);
            if (config.service_delay) {
              const double d = delay_at(*config.service_delay, service.next());
              if (d > 0.0) std::this_thread::sleep_for(std::chrono::duration<double>(d));
            }
            if (!net::send_all(conn.get(), reply)) {
              conn.reset();
              inbuf.clear();
            }
          }
        }
      }
    }
    if (ledger) meter.charge(*ledger, Entity::agent);
  }
}

AgentFleet AgentFleet::spawn(const std::vector<AgentConfig>& configs, FleetOptions options) {
  std::vector<net::UniqueFd> listeners;
  std::vector<std::string> failed;
  std::string reasons;
  for (const auto& c : configs) {
    try {
      listeners.push_back(net::listen_loopback(c.listen_port));
    } catch (const std::system_error& e) {
      listeners.emplace_back();
      failed.push_back(c.agent_id);
      reasons += (reasons.empty() ? "" : "; ") + c.agent_id + ": " + e.what();
    }
  }
  if (!failed.empty()) throw SpawnError("agent spawn failed (" + reasons + ")", std::move(failed));

  AgentFleet fleet;
  std::uint64_t storage = 0;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    auto agent = std::make_unique<Agent>();
    agent->config = configs[i];
    agent->listener = std::move(listeners[i]);
    agent->wake = net::UniqueFd(::eventfd(0, EFD_CLOEXEC));
    agent->ledger = options.ledger;
    agent->workload = configs[i].colocated_workload ? options.colocated_workload : nullptr;
    fleet.endpoints_.push_back({configs[i].agent_id, net::local_port(agent->listener.get())});
    storage += storage_bytes(configs[i]);
    fleet.agents_.push_back(std::move(agent));
  }
  if (options.ledger) options.ledger->set_memory(Entity::agent, storage);
  for (auto& agent : fleet.agents_) {
    Agent* raw = agent.get();
    raw->thread = std::thread([raw] { raw->run(); });
  }
  return fleet;
}

AgentFleet::AgentFleet(AgentFleet&&) noexcept = default;

AgentFleet& AgentFleet::operator=(AgentFleet&& other) noexcept {
  if (this != &other) {
    stop();
    agents_ = std::move(other.agents_);
    endpoints_ = std::move(other.endpoints_);
  }
  return *this;
}

AgentFleet::~AgentFleet() { stop(); }

void AgentFleet::stop() {
  for (auto& a : agents_) a->request_stop();
  for (auto& a : agents_)
    if (a->thread.joinable()) a->thread.join();
  agents_.clear();
}

}  // namespace monlab::bench
