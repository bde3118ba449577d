/* Copyright 2026 The MLPerf Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef RTBENCH_SOCKET_H_
#define RTBENCH_SOCKET_H_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rtbench {

class SocketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Owning file descriptor.
class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  ~Fd() { Close(); }
  Fd(Fd&& o) noexcept : fd_(o.Release()) {}
  Fd& operator=(Fd&& o) noexcept {
    if (this != &o) {
      Close();
      fd_ = o.Release();
    }
    return *this;
  }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;

  int get() const { return fd_; }
  bool valid() const { return fd_ >= 0; }
  int Release() {
    int fd = fd_;
    fd_ = -1;
    return fd;
  }
  void Close();
  // shutdown(SHUT_RDWR); wakes a reader blocked on this socket.
  void Shutdown();

 private:
  int fd_ = -1;
};

struct TcpAddress {
  std::string host;
  uint16_t port = 0;
};

// "<host>:<port>", with or without a leading "tcp:".
TcpAddress ParseTcpAddress(std::string_view text);

Fd ConnectTcp(const TcpAddress& address);
// Port 0 binds an ephemeral port; BoundPort reports it.
Fd ListenTcp(const TcpAddress& address, int backlog = 4);
uint16_t BoundPort(const Fd& listener);
// Returns an invalid Fd once the listener has been shut down.
Fd Accept(const Fd& listener);

// SO_RCVTIMEO; 0 disables. A timed-out read throws SocketError.
void SetReceiveTimeout(const Fd& fd, int milliseconds);

void WriteAll(const Fd& fd, std::span<const uint8_t> bytes);
// Reads up to buffer.size() bytes; 0 means the peer closed.
size_t ReadSome(const Fd& fd, std::span<uint8_t> buffer);

}  // namespace rtbench

#endif  // RTBENCH_SOCKET_H_
