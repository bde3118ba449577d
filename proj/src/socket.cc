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

#include "rtbench/socket.h"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <sys/time.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>

namespace rtbench {

namespace {

std::string Errno(const std::string& what) {
  return what + ": " + std::strerror(errno);
}

sockaddr_in Resolve(const TcpAddress& address) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* result = nullptr;
  int rc = getaddrinfo(address.host.c_str(), nullptr, &hints, &result);
  if (rc != 0 || result == nullptr) {
    throw SocketError("cannot resolve '" + address.host + "': " + gai_strerror(rc));
  }
  sockaddr_in sa{};
  std::memcpy(&sa, result->ai_addr, sizeof(sa));
  freeaddrinfo(result);
  sa.sin_port = htons(address.port);
  return sa;
}

}  // namespace

void Fd::Close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

void Fd::Shutdown() {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

TcpAddress ParseTcpAddress(std::string_view text) {
  if (text.starts_with("tcp:")) text.remove_prefix(4);
  auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw SocketError("expected <host>:<port>, got '" + std::string(text) + "'");
  }
  TcpAddress a;
  a.host = std::string(text.substr(0, colon));
  auto port = text.substr(colon + 1);
  unsigned value = 0;
  auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
  if (port.empty() || ec != std::errc() || ptr != port.data() + port.size() ||
      value > 65535) {
    throw SocketError("bad port '" + std::string(port) + "'");
  }
  a.port = static_cast<uint16_t>(value);
  return a;
}

Fd ConnectTcp(const TcpAddress& address) {
  sockaddr_in sa = Resolve(address);
  Fd fd(::socket(AF_INET, SOCK_STREAM, 0));
  if (!fd.valid()) throw SocketError(Errno("socket"));
  if (::connect(fd.get(), reinterpret_cast<sockaddr*>(&sa), sizeof(sa)) != 0) {
    throw SocketError(Errno("connect to " + address.host + ":" +
                            std::to_string(address.port)));
  }
  int one = 1;
  ::setsockopt(fd.get(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  return fd;
}

Fd ListenTcp(const TcpAddress& address, int backlog) {
  sockaddr_in sa = Resolve(address);
  Fd fd(::socket(AF_INET, SOCK_STREAM, 0));
  if (!fd.valid()) throw SocketError(Errno("socket"));
  int one = 1;
  ::setsockopt(fd.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  if (::bind(fd.get(), reinterpret_cast<sockaddr*>(&sa), sizeof(sa)) != 0) {
    throw SocketError(Errno("bind"));
  }
  if (::listen(fd.get(), backlog) != 0) throw SocketError(Errno("listen"));
  return fd;
}

uint16_t BoundPort(const Fd& listener) {
  sockaddr_in sa{};
  socklen_t len = sizeof(sa);
  if (::getsockname(listener.get(), reinterpret_cast<sockaddr*>(&sa), &len) != 0) {
    throw SocketError(Errno("getsockname"));
  }
  return ntohs(sa.sin_port);
}

Fd Accept(const Fd& listener) {
  while (true) {
    int fd = ::accept(listener.get(), nullptr, nullptr);
    if (fd >= 0) {
      int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
      return Fd(fd);
    }
    if (errno == EINTR) continue;
    return Fd();
  }
}

void SetReceiveTimeout(const Fd& fd, int milliseconds) {
  timeval tv{};
  tv.tv_sec = milliseconds / 1000;
  tv.tv_usec = (milliseconds % 1000) * 1000;
  if (::setsockopt(fd.get(), SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv)) != 0) {
    throw SocketError(Errno("setsockopt(SO_RCVTIMEO)"));
  }
}

void WriteAll(const Fd& fd, std::span<const uint8_t> bytes) {
  while (!bytes.empty()) {
    ssize_t n = ::send(fd.get(), bytes.data(), bytes.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw SocketError(Errno("send"));
    }
    bytes = bytes.subspan(static_cast<size_t>(n));
  }
}

size_t ReadSome(const Fd& fd, std::span<uint8_t> buffer) {
  while (true) {
    ssize_t n = ::recv(fd.get(), buffer.data(), buffer.size(), 0);
    if (n >= 0) return static_cast<size_t>(n);
    if (errno == EINTR) continue;
    throw SocketError(Errno("recv"));
  }
}

}  // namespace rtbench
