#pragma once

// Thin POSIX socket helpers shared by agents and the manager (loopback TCP).

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

namespace monlab::net {

class UniqueFd {
 public:
  UniqueFd() = default;
  explicit UniqueFd(int fd) : fd_(fd) {}
  ~UniqueFd() { reset(); }
  UniqueFd(UniqueFd&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
  UniqueFd& operator=(UniqueFd&& other) noexcept {
    if (this != &other) {
      reset();
      fd_ = std::exchange(other.fd_, -1);
    }
    return *this;
  }
  UniqueFd(const UniqueFd&) = delete;
  UniqueFd& operator=(const UniqueFd&) = delete;

  int get() const { return fd_; }
  bool valid() const { return fd_ >= 0; }
  void reset();

 private:
  int fd_ = -1;
};

// Binds and listens on 127.0.0.1:port (0 = ephemeral). Throws
// std::system_error on failure.
UniqueFd listen_loopback(std::uint16_t port, int backlog = 64);
std::uint16_t local_port(int fd);

// Blocking connect to 127.0.0.1:port with TCP_NODELAY. Invalid fd on failure,
// errno preserved.
UniqueFd connect_loopback(std::uint16_t port);

void set_nodelay(int fd);
void set_nonblocking(int fd, bool on);

// Writes the whole buffer (blocking fd), never raising SIGPIPE.
bool send_all(int fd, std::string_view data);

}  // namespace monlab::net
