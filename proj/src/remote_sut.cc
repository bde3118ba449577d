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

#include "rtbench/remote_sut.h"

#include <sys/socket.h>

#include <algorithm>
#include <array>
#include <cstring>
#include <map>

namespace rtbench {

namespace {

// Blocks until one whole message is decoded.
wire::Message ReadMessage(const Fd& fd, wire::FrameDecoder& decoder) {
  std::array<uint8_t, 64 * 1024> buf;
  while (true) {
    if (auto m = decoder.Next()) return std::move(*m);
    size_t n = ReadSome(fd, buf);
    if (n == 0) throw SocketError("peer closed the connection");
    decoder.Feed(std::span<const uint8_t>(buf.data(), n));
  }
}

void SendOn(const Fd& fd, const wire::Message& m) {
  WriteAll(fd, wire::EncodeFrame(m));
}

}  // namespace

RemoteSut::RemoteSut(TcpAddress address, std::string name)
    : address_(std::move(address)),
      name_(name.empty() ? "tcp:" + address_.host + ":" + std::to_string(address_.port)
                         : std::move(name)) {}

RemoteSut::~RemoteSut() { Disconnect(); }

void RemoteSut::Disconnect() {
  if (!fd_.valid()) return;
  {
    std::lock_guard<std::mutex> lock(mu_);
    closing_ = true;
  }
  try {
    Send(wire::Bye{});
  } catch (const std::exception&) {
  }
  fd_.Shutdown();
  if (reader_.joinable()) reader_.join();
  fd_.Close();
  std::lock_guard<std::mutex> lock(mu_);
  closing_ = false;
}

void RemoteSut::Send(const wire::Message& m) {
  auto bytes = wire::EncodeFrame(m);
  std::lock_guard<std::mutex> lock(write_mu_);
  WriteAll(fd_, bytes);
}

void RemoteSut::Configure(SutSession session) {
  if (!session.clock || session.clock->IsSimulated()) {
    throw SutError("remote SUTs need a real clock");
  }
  if (!session.sink) throw SutError("remote SUT needs a completion sink");
  Disconnect();

  wire::FrameDecoder decoder;
  try {
    fd_ = ConnectTcp(address_);
    Send(wire::Hello{});
    SetReceiveTimeout(fd_, 10'000);
    wire::Message reply = ReadMessage(fd_, decoder);
    SetReceiveTimeout(fd_, 0);
    if (auto* bye = std::get_if<wire::Bye>(&reply)) {
      fd_.Close();
      throw SutError("remote SUT refused handshake: " + bye->reason);
    }
    auto* hello = std::get_if<wire::Hello>(&reply);
    if (!hello) {
      fd_.Close();
      throw SutError(std::string("expected HELLO, got ") +
                     wire::NameOf(wire::TypeOf(reply)));
    }
    if (hello->version != wire::kProtocolVersion) {
      try {
        Send(wire::Bye{"protocol version mismatch"});
      } catch (const std::exception&) {
      }
      fd_.Close();
      throw SutError("handshake version mismatch: harness speaks " +
                     std::to_string(wire::kProtocolVersion) + ", SUT speaks " +
                     std::to_string(hello->version));
    }
    const auto& info = session.info;
    Send(wire::Config{info.mode, info.scenario, info.store_seed, info.store_size,
                      info.sample_bytes, info.inputs_per_query});
  } catch (const SocketError& e) {
    fd_.Close();
    throw SutError(e.what());
  } catch (const wire::ProtocolError& e) {
    fd_.Close();
    throw SutError(e.what());
  }

  {
    std::lock_guard<std::mutex> lock(mu_);
    session_ = std::move(session);
    loaded_.assign(session_.info.store_size, false);
    any_loaded_ = false;
    loaded_acks_ = flush_acks_ = outstanding_ = 0;
    failure_.reset();
  }
  reader_ = std::thread([this, decoder = std::move(decoder)]() mutable {
    std::array<uint8_t, 64 * 1024> buf;
    try {
      while (true) {
        while (auto m = decoder.Next()) {
          if (auto* c = std::get_if<wire::Complete>(&*m)) {
            std::shared_ptr<CompletionSink> sink;
            {
              std::lock_guard<std::mutex> lock(mu_);
              sink = session_.sink;
            }
            sink->Complete(c->query_id, std::move(c->blob));
            {
              std::lock_guard<std::mutex> lock(mu_);
              if (outstanding_ > 0) --outstanding_;
            }
            cv_.notify_all();
          } else if (std::holds_alternative<wire::Loaded>(*m)) {
            std::lock_guard<std::mutex> lock(mu_);
            ++loaded_acks_;
            cv_.notify_all();
          } else if (std::holds_alternative<wire::Flush>(*m)) {
            std::lock_guard<std::mutex> lock(mu_);
            ++flush_acks_;
            cv_.notify_all();
          } else if (auto* bye = std::get_if<wire::Bye>(&*m)) {
            SetFailure("remote SUT closed the session" +
                       (bye->reason.empty() ? std::string() : ": " + bye->reason));
            return;
          } else {
            SetFailure(std::string("unexpected ") +
                       wire::NameOf(wire::TypeOf(*m)) + " from SUT");
            return;
          }
        }
        size_t n = ReadSome(fd_, buf);
        if (n == 0) {
          SetFailure("connection to remote SUT lost");
          return;
        }
        decoder.Feed(std::span<const uint8_t>(buf.data(), n));
      }
    } catch (const std::exception& e) {
      SetFailure(std::string("remote SUT: ") + e.what());
    }
  });
}

void RemoteSut::SetFailure(std::string message) {
  std::shared_ptr<CompletionSink> sink;
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (closing_) return;
    if (failure_) return;
    failure_ = message;
    sink = session_.sink;
  }
  cv_.notify_all();
  if (sink) sink->Fail(std::move(message));
}

void RemoteSut::ThrowIfFailed() {
  std::lock_guard<std::mutex> lock(mu_);
  if (failure_) throw SutError(*failure_);
}

void RemoteSut::LoadSamples(std::span<const uint32_t> indices) {
  uint64_t before;
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (!fd_.valid()) throw SutError("load_samples before configure");
    for (uint32_t i : indices) {
      if (i >= loaded_.size()) {
        throw SutError("sample index " + std::to_string(i) + " outside the store");
      }
    }
    before = loaded_acks_;
  }
  try {
    Send(wire::Load{std::vector<uint32_t>(indices.begin(), indices.end())});
  } catch (const std::exception& e) {
    throw SutError(e.what());
  }
  std::unique_lock<std::mutex> lock(mu_);
  cv_.wait(lock, [&] { return loaded_acks_ > before || failure_.has_value(); });
  if (failure_) throw SutError(*failure_);
  for (uint32_t i : indices) loaded_[i] = true;
  any_loaded_ = true;
}

void RemoteSut::UnloadSamples() {
  std::lock_guard<std::mutex> lock(mu_);
  std::fill(loaded_.begin(), loaded_.end(), false);
  any_loaded_ = false;
}

void RemoteSut::IssueQuery(uint64_t query_id,
                           std::span<const uint32_t> sample_indices) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (failure_) throw SutError(*failure_);
    if (!any_loaded_) throw SutError("issue before load_samples");
    for (uint32_t i : sample_indices) {
      if (i >= loaded_.size() || !loaded_[i]) {
        throw SutError("query " + std::to_string(query_id) +
                       " references unloaded sample " + std::to_string(i));
      }
    }
    ++outstanding_;
  }
  try {
    Send(wire::Issue{query_id, std::vector<uint32_t>(sample_indices.begin(),
                                                     sample_indices.end())});
  } catch (const std::exception& e) {
    SetFailure(e.what());
    throw SutError(e.what());
  }
}

void RemoteSut::Flush() {
  uint64_t before;
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (failure_) throw SutError(*failure_);
    if (!fd_.valid()) return;
    before = flush_acks_;
  }
  try {
    Send(wire::Flush{});
  } catch (const std::exception& e) {
    SetFailure(e.what());
    throw SutError(e.what());
  }
  std::unique_lock<std::mutex> lock(mu_);
  cv_.wait(lock, [&] { return flush_acks_ > before || failure_.has_value(); });
  if (failure_) throw SutError(*failure_);
  if (outstanding_ != 0) {
    throw SutError("FLUSH answered with " + std::to_string(outstanding_) +
                   " queries outstanding");
  }
}

namespace {

// Writes COMPLETE frames for the stub; drops them once the connection ends.
struct StubConnection {
  Fd fd;
  std::mutex write_mu;
  bool open = true;

  void Send(const wire::Message& m) {
    auto bytes = wire::EncodeFrame(m);
    std::lock_guard<std::mutex> lock(write_mu);
    if (!open) return;
    try {
      WriteAll(fd, bytes);
    } catch (const SocketError&) {
      open = false;
    }
  }
};

class WireSink final : public CompletionSink {
 public:
  explicit WireSink(std::shared_ptr<StubConnection> conn) : conn_(std::move(conn)) {}
  void Complete(uint64_t query_id, std::vector<uint8_t> response) override {
    conn_->Send(wire::Complete{query_id, std::move(response)});
  }
  void Fail(std::string message) override {
    conn_->Send(wire::Bye{std::move(message)});
  }

 private:
  std::shared_ptr<StubConnection> conn_;
};

}  // namespace

StubServer::StubServer(SimulatedSutConfig config, TcpAddress listen)
    : config_(std::move(config)) {
  listener_ = ListenTcp(listen);
  port_ = BoundPort(listener_);
}

StubServer::~StubServer() { Stop(); }

void StubServer::Start() {
  thread_ = std::thread([this] { Serve(); });
}

void StubServer::Serve() {
  while (!stopping_) {
    Fd fd = Accept(listener_);
    if (!fd.valid() || stopping_) break;
    ServeConnection(std::move(fd));
    ++served_;
  }
}

void StubServer::Stop() {
  if (stopping_.exchange(true)) {
    if (thread_.joinable()) thread_.join();
    return;
  }
  listener_.Shutdown();
  {
    std::lock_guard<std::mutex> lock(conn_mu_);
    if (active_fd_ >= 0) ::shutdown(active_fd_, SHUT_RDWR);
  }
  if (thread_.joinable()) thread_.join();
}

void StubServer::ServeConnection(Fd fd) {
  auto conn = std::make_shared<StubConnection>();
  conn->fd = std::move(fd);
  {
    std::lock_guard<std::mutex> lock(conn_mu_);
    active_fd_ = conn->fd.get();
  }

  RealClock clock;
  SimulatedSut sut(config_, "stub");
  auto sink = std::make_shared<WireSink>(conn);
  bool greeted = false, configured = false;

  auto violation = [&](const std::string& reason) { conn->Send(wire::Bye{reason}); };

  wire::FrameDecoder decoder;
  std::array<uint8_t, 64 * 1024> buf;
  bool done = false;
  try {
    while (!done) {
      size_t n = ReadSome(conn->fd, buf);
      if (n == 0) break;
      decoder.Feed(std::span<const uint8_t>(buf.data(), n));
      while (!done) {
        auto m = decoder.Next();
        if (!m) break;
        if (auto* hello = std::get_if<wire::Hello>(&*m)) {
          if (greeted) {
            violation("duplicate HELLO");
            done = true;
          } else if (hello->version != wire::kProtocolVersion) {
            violation("unsupported protocol version " + std::to_string(hello->version));
            done = true;
          } else {
            greeted = true;
            conn->Send(wire::Hello{});
          }
        } else if (!greeted) {
          violation(std::string("expected HELLO, got ") +
                    wire::NameOf(wire::TypeOf(*m)));
          done = true;
        } else if (auto* cfg = std::get_if<wire::Config>(&*m)) {
          SutSession session;
          session.info = SutRunInfo{cfg->mode, cfg->scenario, cfg->store_seed,
                                    cfg->store_size, cfg->sample_bytes,
                                    cfg->inputs_per_query};
          session.clock = &clock;
          session.sink = sink;
          session.store = std::make_shared<SampleStore>(
              cfg->store_seed, cfg->store_size, cfg->sample_bytes);
          sut.Configure(std::move(session));
          configured = true;
        } else if (!configured) {
          violation(std::string("expected CONFIG, got ") +
                    wire::NameOf(wire::TypeOf(*m)));
          done = true;
        } else if (auto* load = std::get_if<wire::Load>(&*m)) {
          sut.LoadSamples(load->indices);
          conn->Send(wire::Loaded{});
        } else if (auto* issue = std::get_if<wire::Issue>(&*m)) {
          sut.IssueQuery(issue->query_id, issue->indices);
        } else if (std::holds_alternative<wire::Flush>(*m)) {
          sut.Flush();
          conn->Send(wire::Flush{});
        } else if (std::holds_alternative<wire::Bye>(*m)) {
          sut.Flush();
          done = true;
        } else {
          violation(std::string("unexpected ") + wire::NameOf(wire::TypeOf(*m)) +
                    " from harness");
          done = true;
        }
      }
    }
  } catch (const wire::ProtocolError& e) {
    violation(e.what());
  } catch (const SutError& e) {
    violation(e.what());
  } catch (const SampleError& e) {
    violation(e.what());
  } catch (const SocketError&) {
  }

  {
    std::lock_guard<std::mutex> lock(conn->write_mu);
    conn->open = false;
  }
  {
    std::lock_guard<std::mutex> lock(conn_mu_);
    active_fd_ = -1;
  }
  conn->fd.Close();
}

namespace {

struct CheckSession {
  Fd fd;
  wire::FrameDecoder decoder;

  explicit CheckSession(const TcpAddress& address) : fd(ConnectTcp(address)) {
    SetReceiveTimeout(fd, 10'000);
  }
  void Send(const wire::Message& m) { SendOn(fd, m); }
  void SendRaw(std::span<const uint8_t> bytes) { WriteAll(fd, bytes); }
  wire::Message Read() { return ReadMessage(fd, decoder); }
};

}  // namespace

std::vector<ConformanceCheck> CheckConformance(const TcpAddress& address) {
  std::vector<ConformanceCheck> checks;
  auto record = [&](std::string name, bool ok, std::string detail = "") {
    checks.push_back({std::move(name), ok, std::move(detail)});
    return ok;
  };
  auto expect_bye = [&](CheckSession& s, const std::string& name) {
    try {
      auto reply = s.Read();
      auto* bye = std::get_if<wire::Bye>(&reply);
      record(name, bye && !bye->reason.empty(),
             bye ? bye->reason
                 : std::string("got ") + wire::NameOf(wire::TypeOf(reply)));
    } catch (const std::exception& e) {
      record(name, false, e.what());
    }
  };

  const wire::Config config{Mode::kPerformance, Scenario::kSingleStream, 7, 4, 16, 1};

  try {
    CheckSession s(address);
    s.Send(wire::Hello{});
    auto reply = s.Read();
    auto* hello = std::get_if<wire::Hello>(&reply);
    if (!record("hello", hello && hello->version == wire::kProtocolVersion,
                hello ? "version " + std::to_string(hello->version)
                      : std::string("got ") + wire::NameOf(wire::TypeOf(reply)))) {
      return checks;
    }
    s.Send(config);
    s.Send(wire::Load{{0, 1, 2, 3}});
    reply = s.Read();
    record("load_loaded", std::holds_alternative<wire::Loaded>(reply),
           wire::NameOf(wire::TypeOf(reply)));

    constexpr uint64_t kQueries = 8;
    std::vector<uint8_t> batch;
    for (uint64_t q = 0; q < kQueries; ++q) {
      wire::AppendFrame(wire::Issue{q, {static_cast<uint32_t>(q % 4)}}, batch);
    }
    wire::AppendFrame(wire::Flush{}, batch);
    s.SendRaw(batch);

    std::map<uint64_t, int> seen;
    bool flushed = false;
    std::string detail;
    while (!flushed) {
      auto m = s.Read();
      if (auto* c = std::get_if<wire::Complete>(&m)) {
        ++seen[c->query_id];
      } else if (std::holds_alternative<wire::Flush>(m)) {
        flushed = true;
      } else {
        detail = std::string("unexpected ") + wire::NameOf(wire::TypeOf(m));
        break;
      }
    }
    bool exactly_once = seen.size() == kQueries;
    for (const auto& [id, count] : seen) {
      if (id >= kQueries || count != 1) exactly_once = false;
    }
    record("pipelined_issue_exactly_once", exactly_once,
           std::to_string(seen.size()) + " distinct query ids completed");
    // Everything before the FLUSH echo counts; a COMPLETE that arrives
    // later shows up here as a missing query id.
    if (detail.empty() && !exactly_once) detail = "FLUSH echoed before every COMPLETE";
    record("flush_after_completes", flushed && detail.empty() && exactly_once, detail);
    s.Send(wire::Bye{});
  } catch (const std::exception& e) {
    record("session", false, e.what());
    return checks;
  }

  try {
    CheckSession s(address);
    s.Send(wire::Hello{});
    s.Read();
    s.Send(config);
    s.Send(wire::Load{{0, 1}});
    s.Read();
    s.Send(wire::Issue{0, {2}});
    expect_bye(s, "unloaded_index_rejected");
  } catch (const std::exception& e) {
    record("unloaded_index_rejected", false, e.what());
  }

  try {
    CheckSession s(address);
    auto frame = wire::EncodeFrame(wire::Hello{});
    std::memcpy(frame.data() + 5, "XXXX", 4);
    s.SendRaw(frame);
    expect_bye(s, "bad_magic_rejected");
  } catch (const std::exception& e) {
    record("bad_magic_rejected", false, e.what());
  }

  try {
    CheckSession s(address);
    s.Send(wire::Hello{static_cast<uint16_t>(wire::kProtocolVersion + 1)});
    expect_bye(s, "version_mismatch_rejected");
  } catch (const std::exception& e) {
    record("version_mismatch_rejected", false, e.what());
  }
  return checks;
}

}  // namespace rtbench
