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

#include <gtest/gtest.h>

#include <chrono>
#include <functional>
#include <map>
#include <thread>

#include "rtbench/clock.h"
#include "rtbench/digest.h"
#include "rtbench/engine.h"
#include "rtbench/latency_stats.h"
#include "rtbench/sample_store.h"
#include "rtbench/simulated_sut.h"
#include "test_suts.h"

namespace rtbench {
namespace {

using testing::Profile;
using testing::QuickSettings;

// Accepts connections and hands each one to a scripted handler.
class FakeServer {
 public:
  using Handler = std::function<void(const Fd&, wire::FrameDecoder&)>;

  explicit FakeServer(Handler handler)
      : handler_(std::move(handler)),
        listener_(ListenTcp({"127.0.0.1", 0})),
        port_(BoundPort(listener_)) {
    thread_ = std::thread([this] {
      for (;;) {
        Fd fd = Accept(listener_);
        if (!fd.valid()) return;
        SetReceiveTimeout(fd, 5000);
        wire::FrameDecoder decoder;
        try {
          handler_(fd, decoder);
        } catch (const std::exception&) {
        }
      }
    });
  }
  ~FakeServer() {
    listener_.Shutdown();
    thread_.join();
  }

  TcpAddress address() const { return {"127.0.0.1", port_}; }

  static wire::Message Read(const Fd& fd, wire::FrameDecoder& decoder) {
    for (;;) {
      if (auto m = decoder.Next()) return *m;
      uint8_t buf[4096];
      size_t n = ReadSome(fd, buf);
      if (n == 0) throw SocketError("peer closed");
      decoder.Feed({buf, n});
    }
  }
  static void Send(const Fd& fd, const wire::Message& m) {
    WriteAll(fd, wire::EncodeFrame(m));
  }

 private:
  Handler handler_;
  Fd listener_;
  uint16_t port_;
  std::thread thread_;
};

std::map<std::string, ConformanceCheck> ByName(const std::vector<ConformanceCheck>& v) {
  std::map<std::string, ConformanceCheck> out;
  for (const auto& c : v) out[c.name] = c;
  return out;
}

TEST(ConformanceTest, StubServerPassesEveryCheck) {
  StubServer server(ParseSimSpec("fixed:1ms"));
  server.Start();
  auto checks = CheckConformance({"127.0.0.1", server.port()});
  auto by_name = ByName(checks);
  for (const char* name : {"hello", "load_loaded", "pipelined_issue_exactly_once",
                           "flush_after_completes", "unloaded_index_rejected",
                           "bad_magic_rejected", "version_mismatch_rejected"}) {
    ASSERT_TRUE(by_name.count(name)) << name;
    EXPECT_TRUE(by_name[name].passed) << name << ": " << by_name[name].detail;
  }
  EXPECT_EQ(checks.size(), 7u);
  server.Stop();
}

// Answers the scripted session, but completes query 3 twice and never
// complains about anything.
void SloppyHandler(const Fd& fd, wire::FrameDecoder& decoder) {
  for (;;) {
    auto m = FakeServer::Read(fd, decoder);
    if (std::holds_alternative<wire::Hello>(m)) {
      FakeServer::Send(fd, wire::Hello{});
    } else if (std::holds_alternative<wire::Load>(m)) {
      FakeServer::Send(fd, wire::Loaded{});
    } else if (auto* issue = std::get_if<wire::Issue>(&m)) {
      FakeServer::Send(fd, wire::Complete{issue->query_id, {1}});
      if (issue->query_id == 3) FakeServer::Send(fd, wire::Complete{3, {1}});
    } else if (std::holds_alternative<wire::Flush>(m)) {
      FakeServer::Send(fd, wire::Flush{});
    } else if (std::holds_alternative<wire::Bye>(m)) {
      return;
    }
  }
}

TEST(ConformanceTest, DuplicateCompleteAndSilentErrorsAreReported) {
  FakeServer server(SloppyHandler);
  auto by_name = ByName(CheckConformance(server.address()));
  EXPECT_TRUE(by_name["hello"].passed);
  EXPECT_TRUE(by_name["load_loaded"].passed);
  EXPECT_FALSE(by_name["pipelined_issue_exactly_once"].passed);
  EXPECT_FALSE(by_name["flush_after_completes"].passed);
  // The sloppy SUT completes the unloaded ISSUE instead of saying BYE.
  EXPECT_FALSE(by_name["unloaded_index_rejected"].passed);
  EXPECT_FALSE(by_name["version_mismatch_rejected"].passed);
}

TEST(ConformanceTest, EarlyFlushIsReported) {
  FakeServer server([](const Fd& fd, wire::FrameDecoder& decoder) {
    std::vector<uint64_t> held;
    for (;;) {
      auto m = FakeServer::Read(fd, decoder);
      if (std::holds_alternative<wire::Hello>(m)) {
        FakeServer::Send(fd, wire::Hello{});
      } else if (std::holds_alternative<wire::Load>(m)) {
        FakeServer::Send(fd, wire::Loaded{});
      } else if (auto* issue = std::get_if<wire::Issue>(&m)) {
        held.push_back(issue->query_id);
      } else if (std::holds_alternative<wire::Flush>(m)) {
        FakeServer::Send(fd, wire::Flush{});
        for (uint64_t id : held) FakeServer::Send(fd, wire::Complete{id, {}});
      } else if (std::holds_alternative<wire::Bye>(m)) {
        return;
      }
    }
  });
  auto by_name = ByName(CheckConformance(server.address()));
  EXPECT_FALSE(by_name["flush_after_completes"].passed);
  EXPECT_FALSE(by_name["flush_after_completes"].detail.empty());
}

TEST(ConformanceTest, WrongHelloStopsEarly) {
  FakeServer server([](const Fd& fd, wire::FrameDecoder& decoder) {
    FakeServer::Read(fd, decoder);
    FakeServer::Send(fd, wire::Hello{7});
  });
  auto checks = CheckConformance(server.address());
  ASSERT_EQ(checks.size(), 1u);
  EXPECT_EQ(checks[0].name, "hello");
  EXPECT_FALSE(checks[0].passed);
}

TEST(RemoteSutTest, VersionMismatchFailsConfigure) {
  FakeServer server([](const Fd& fd, wire::FrameDecoder& decoder) {
    FakeServer::Read(fd, decoder);
    FakeServer::Send(fd, wire::Hello{static_cast<uint16_t>(wire::kProtocolVersion + 1)});
    try {
      FakeServer::Read(fd, decoder);
    } catch (const std::exception&) {
    }
  });
  RealClock clock;
  RemoteSut sut(server.address());
  auto sink = std::make_shared<testing::CollectingSink>(clock);
  EXPECT_THROW(sut.Configure(testing::MakeSession(clock, sink)), SutError);
}

TEST(RemoteSutTest, RefusedHandshakeCarriesReason) {
  FakeServer server([](const Fd& fd, wire::FrameDecoder& decoder) {
    FakeServer::Read(fd, decoder);
    FakeServer::Send(fd, wire::Bye{"busy"});
  });
  RealClock clock;
  RemoteSut sut(server.address());
  auto sink = std::make_shared<testing::CollectingSink>(clock);
  try {
    sut.Configure(testing::MakeSession(clock, sink));
    FAIL() << "expected SutError";
  } catch (const SutError& e) {
    EXPECT_NE(std::string(e.what()).find("busy"), std::string::npos);
  }
}

TEST(RemoteSutTest, RejectsSimulatedClock) {
  StubServer server(ParseSimSpec("fixed:1ms"));
  server.Start();
  SimulatedClock clock;
  RemoteSut sut({"127.0.0.1", server.port()});
  auto sink = std::make_shared<testing::CollectingSink>(clock);
  EXPECT_THROW(sut.Configure(testing::MakeSession(clock, sink)), SutError);
  server.Stop();
}

TEST(RemoteSutTest, UnreachableEndpointFailsConfigure) {
  uint16_t port;
  {
    Fd listener = ListenTcp({"127.0.0.1", 0});
    port = BoundPort(listener);
  }
  RealClock clock;
  RemoteSut sut({"127.0.0.1", port});
  auto sink = std::make_shared<testing::CollectingSink>(clock);
  EXPECT_THROW(sut.Configure(testing::MakeSession(clock, sink)), SutError);
}

TEST(RemoteSutTest, SingleStreamLatencyIncludesServiceTime) {
  StubServer server(ParseSimSpec("fixed:10ms"));
  server.Start();
  RealClock clock;
  RemoteSut sut({"127.0.0.1", server.port()});
  ScenarioEngine engine(clock);
  auto profile = Profile("ssd_resnet50");
  RunLog log = engine.Run(sut, QuickSettings(profile, 30), profile);
  ASSERT_TRUE(log.valid()) << *log.failure;
  ASSERT_EQ(log.trace.size(), 30u);
  RunSummary summary = Summarize(log);
  EXPECT_GE(summary.p50_ns, 10'000'000);
  EXPECT_LT(summary.p50_ns, 60'000'000);
  server.Stop();
}

TEST(RemoteSutTest, EchoResponsesMatchSyntheticSamples) {
  StubServer server(ParseSimSpec("fixed:100us:echo"));
  server.Start();
  RealClock clock;
  RemoteSut sut({"127.0.0.1", server.port()});
  ScenarioEngine engine(clock);
  auto profile = Profile("ssd_resnet50");
  RunSettings settings = QuickSettings(profile, 1, 11);
  settings.mode = Mode::kAccuracy;
  RunLog log = engine.Run(sut, settings, profile);
  ASSERT_TRUE(log.valid()) << *log.failure;
  ASSERT_EQ(log.trace.size(), settings.store_size);
  for (const auto& e : log.trace) {
    ASSERT_TRUE(e.completion);
    std::vector<uint8_t> expected;
    for (uint32_t i : e.query.sample_indices) {
      auto s = SyntheticSample(settings.seed, i, settings.sample_bytes);
      expected.insert(expected.end(), s.begin(), s.end());
    }
    EXPECT_EQ(e.completion->response_bytes, expected);
    EXPECT_EQ(e.completion->response_digest, Digest(expected));
  }
  server.Stop();
}

TEST(RemoteSutTest, LostConnectionIsRecordedAsFailure) {
  StubServer server(ParseSimSpec("fixed:5ms"));
  server.Start();
  RealClock clock;
  RemoteSut sut({"127.0.0.1", server.port()});
  ScenarioEngine engine(clock);
  auto profile = Profile("ssd_resnet50");
  std::thread killer([&] {
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.Stop();
  });
  RunLog log = engine.Run(sut, QuickSettings(profile, 1000), profile);
  killer.join();
  EXPECT_FALSE(log.valid());
  EXPECT_LT(log.trace.size(), 1000u);
}

TEST(StubServerTest, ServesSequentialConnections) {
  StubServer server(ParseSimSpec("fixed:1ms"));
  server.Start();
  RealClock clock;
  ScenarioEngine engine(clock);
  auto profile = Profile("ssd_resnet50");
  for (int run = 0; run < 3; ++run) {
    RemoteSut sut({"127.0.0.1", server.port()});
    RunLog log = engine.Run(sut, QuickSettings(profile, 5), profile);
    EXPECT_TRUE(log.valid());
  }
  server.Stop();
  EXPECT_EQ(server.connections_served(), 3u);
}

}  // namespace
}  // namespace rtbench
