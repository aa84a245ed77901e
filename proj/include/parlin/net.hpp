// Copyright 2026 The Parlin Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "parlin/protocol.hpp"

namespace parlin {

/// Owning TCP stream socket carrying length-prefixed protocol frames.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  ~Socket() { close(); }
  Socket(Socket&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
  Socket& operator=(Socket&& other) noexcept {
    if (this != &other) {
      close();
      fd_ = std::exchange(other.fd_, -1);
    }
    return *this;
  }
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;

  int fd() const { return fd_; }
  bool valid() const { return fd_ >= 0; }
  void close();

  /// Throws kIo if the peer is gone.
  void send_message(const Message& m);
  /// nullopt on orderly shutdown at a frame boundary; kIo on a truncated
  /// frame, kProtocol on a malformed one.
  std::optional<Message> recv_message();
  /// Returns false on timeout.
  bool wait_readable(std::chrono::milliseconds timeout) const;

 private:
  int fd_ = -1;
};

Socket connect_tcp(const std::string& host, std::uint16_t port);

/// Retries refused connections until `timeout` elapses.
Socket connect_tcp_retry(const std::string& host, std::uint16_t port,
                         std::chrono::milliseconds timeout);

class Listener {
 public:
  /// Port 0 picks an ephemeral port; see port().
  explicit Listener(std::uint16_t port, const std::string& bind_address = "0.0.0.0");
  ~Listener();
  Listener(Listener&&) = delete;
  Listener& operator=(Listener&&) = delete;

  std::uint16_t port() const { return port_; }
  int fd() const { return fd_; }
  void close();

  /// nullopt on timeout.
  std::optional<Socket> accept(std::chrono::milliseconds timeout);

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

/// "host:port" -> (host, port); kUsage on malformed input.
std::pair<std::string, std::uint16_t> parse_host_port(std::string_view address);

}  // namespace parlin
