#include "monlab/manager.hpp"

#include <poll.h>
#include <sys/socket.h>

#include <algorithm>
#include <cerrno>

#include "monlab/error.hpp"
#include "monlab/wire.hpp"
#include "net.hpp"

namespace monlab::bench {

namespace {
constexpr std::size_t kConnBufferBytes = 4096;
}

struct Manager::Conn {
  Endpoint endpoint;
  net::UniqueFd fd;
  std::string inbuf;
  // Per-round state.
  Clock::time_point sent_at{};
  bool pending = false;
  MetricSample sample;
};

Manager::Manager(std::vector<Endpoint> endpoints, Clock::time_point epoch, ResourceLedger* ledger)
    : epoch_(epoch), ledger_(ledger) {
  conns_.reserve(endpoints.size());
  for (auto& ep : endpoints) {
    Conn c;
    c.endpoint = std::move(ep);
    c.fd = net::connect_loopback(c.endpoint.port);
    c.inbuf.reserve(kConnBufferBytes);
    conns_.push_back(std::move(c));
  }
}

Manager::~Manager() = default;

std::size_t Manager::agent_count() const { return conns_.size(); }

std::uint64_t Manager::storage_bytes(std::size_t agents, std::size_t attributes_per_poll) {
  return agents * (sizeof(Conn) + kConnBufferBytes + attributes_per_poll * sizeof(double));
}

std::vector<MetricSample> Manager::poll_round(std::size_t attributes_per_poll, double timeout_s) {
  if (conns_.empty()) return {};
  if (attributes_per_poll < 1) throw InputError("poll round needs at least one attribute");
  ThreadCpuMeter meter;
  if (ledger_ && storage_attrs_ != attributes_per_poll) {
    storage_attrs_ = attributes_per_poll;
    ledger_->set_memory(Entity::manager, storage_bytes(conns_.size(), attributes_per_poll));
  }

  std::vector<std::string> ids;
  for (std::size_t i = 0; i < attributes_per_poll; ++i) ids.push_back(wire::attribute_id(i));
  const std::string request = wire::encode_get(ids);

  const auto since_epoch = [this](Clock::time_point t) {
    return std::chrono::duration<double>(t - epoch_).count();
  };

  std::size_t outstanding = 0;
  for (auto& c : conns_) {
    c.sample = MetricSample{};
    c.sample.agent_id = c.endpoint.agent_id;
    c.sample.attribute_count = static_cast<std::uint32_t>(attributes_per_poll);
    c.sample.request_bytes = request.size();
    c.pending = false;
    c.inbuf.clear();
    if (!c.fd.valid()) c.fd = net::connect_loopback(c.endpoint.port);
    c.sent_at = Clock::now();
    c.sample.timestamp = since_epoch(c.sent_at);
    if (!c.fd.valid() || !net::send_all(c.fd.get(), request)) {
      c.fd.reset();
      c.sample.status = SampleStatus::error;
      c.sample.request_bytes = 0;
      continue;
    }
    c.pending = true;
    ++outstanding;
  }

  const auto deadline = conns_.front().sent_at +
                        std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(timeout_s));
  std::vector<pollfd> fds;
  std::vector<Conn*> owners;
  char chunk[kConnBufferBytes];
  while (outstanding > 0) {
    const auto now = Clock::now();
    if (now >= deadline) break;
    fds.clear();
    owners.clear();
    for (auto& c : conns_)
      if (c.pending) {
        fds.push_back({c.fd.get(), POLLIN, 0});
        owners.push_back(&c);
      }
    const auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(deadline - now).count();
    timespec wait{static_cast<time_t>(ns / 1'000'000'000), static_cast<long>(ns % 1'000'000'000)};
    const int rc = ::ppoll(fds.data(), fds.size(), &wait, nullptr);
    if (rc < 0) {
      if (errno == EINTR) continue;
      break;
    }
    for (std::size_t i = 0; i < fds.size(); ++i) {
      if (!fds[i].revents) continue;
      Conn& c = *owners[i];
      const auto n = ::recv(c.fd.get(), chunk, sizeof(chunk), 0);
      const auto received_at = Clock::now();
      if (n <= 0) {
        c.sample.status = SampleStatus::error;
        c.sample.response_bytes = c.inbuf.size();
        c.fd.reset();
        c.pending = false;
        --outstanding;
        continue;
      }
      c.inbuf.append(chunk, static_cast<std::size_t>(n));
      const auto eol = c.inbuf.find('\n');
      if (eol == std::string::npos) continue;
      c.pending = false;
      --outstanding;
      c.sample.response_bytes = eol + 1;
      if (eol + 1 != c.inbuf.size()) {
        // Bytes beyond the reply mean the agent broke the one-request rule.
        c.sample.status = SampleStatus::error;
        c.fd.reset();
        continue;
      }
      try {
        const auto resp = wire::parse_response(std::string_view(c.inbuf).substr(0, eol));
        if (const auto* vals = std::get_if<wire::ValueResponse>(&resp)) {
          c.sample.status = SampleStatus::ok;
          c.sample.attribute_count = static_cast<std::uint32_t>(vals->values.size());
          c.sample.delay = std::chrono::duration<double>(received_at - c.sent_at).count();
        } else {
          c.sample.status = SampleStatus::error;
        }
      } catch (const InputError&) {
        c.sample.status = SampleStatus::error;
        c.fd.reset();
      }
    }
  }

  std::vector<MetricSample> out;
  out.reserve(conns_.size());
  for (auto& c : conns_) {
    if (c.pending) {
      // Late replies are discarded with the connection.
      c.sample.status = SampleStatus::timeout;
      c.sample.response_bytes = c.inbuf.size();
      c.fd.reset();
      c.pending = false;
    }
    if (c.sample.status == SampleStatus::ok && c.sample.attribute_count == 0)
      c.sample.status = SampleStatus::error;
    out.push_back(std::move(c.sample));
  }
  if (ledger_) meter.charge(*ledger_, Entity::manager);
  return out;
}

}  // namespace monlab::bench
