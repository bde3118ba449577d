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

#ifndef RTBENCH_REMOTE_SUT_H_
#define RTBENCH_REMOTE_SUT_H_

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "rtbench/simulated_sut.h"
#include "rtbench/socket.h"
#include "rtbench/sut.h"
#include "rtbench/wire.h"

namespace rtbench {

// Harness side of the wire protocol. One connection per run: Configure
// connects, exchanges HELLO and sends CONFIG; a reader thread delivers
// COMPLETE frames to the sink while the issuer keeps writing ISSUE frames.
// Completion time is taken when a COMPLETE frame has been fully read, so
// transport cost is charged to the SUT.
class RemoteSut final : public SystemUnderTest {
 public:
  explicit RemoteSut(TcpAddress address, std::string name = "");
  ~RemoteSut() override;

  std::string Name() const override { return name_; }
  void Configure(SutSession session) override;
  void LoadSamples(std::span<const uint32_t> indices) override;
  void UnloadSamples() override;
  void IssueQuery(uint64_t query_id,
                  std::span<const uint32_t> sample_indices) override;
  void Flush() override;

 private:
  void Disconnect();
  void Send(const wire::Message& m);
  void ReaderLoop();
  void SetFailure(std::string message);
  void ThrowIfFailed();

  const TcpAddress address_;
  const std::string name_;

  Fd fd_;
  std::mutex write_mu_;
  std::thread reader_;

  std::mutex mu_;
  std::condition_variable cv_;
  SutSession session_;
  std::vector<bool> loaded_;
  bool any_loaded_ = false;
  uint64_t loaded_acks_ = 0;
  uint64_t flush_acks_ = 0;
  uint64_t outstanding_ = 0;
  std::optional<std::string> failure_;
  bool closing_ = false;
};

// Loopback SUT speaking the wire protocol, backed by a SimulatedSut on a
// RealClock. Serves connections one at a time until stopped.
class StubServer {
 public:
  explicit StubServer(SimulatedSutConfig config,
                      TcpAddress listen = {"127.0.0.1", 0});
  ~StubServer();
  StubServer(const StubServer&) = delete;
  StubServer& operator=(const StubServer&) = delete;

  uint16_t port() const { return port_; }

  // Serves on a background thread.
  void Start();
  // Serves on the calling thread until Stop().
  void Serve();
  void Stop();

  uint64_t connections_served() const { return served_; }

 private:
  void ServeConnection(Fd fd);

  const SimulatedSutConfig config_;
  Fd listener_;
  uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::atomic<uint64_t> served_{0};
  std::thread thread_;
  std::mutex conn_mu_;
  int active_fd_ = -1;
};

struct ConformanceCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Scripted session against a remote SUT: handshake, LOAD/LOADED, pipelined
// ISSUEs answered exactly once each, FLUSH ordering, and a BYE diagnostic
// for an ISSUE naming an unloaded sample, a bad magic or a version mismatch.
// Opens one connection per scripted session.
std::vector<ConformanceCheck> CheckConformance(const TcpAddress& address);

}  // namespace rtbench

#endif  // RTBENCH_REMOTE_SUT_H_
