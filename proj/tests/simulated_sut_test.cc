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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "rtbench/clock.h"
#include "rtbench/sample_store.h"
#include "rtbench/simulated_sut.h"
#include "test_suts.h"

namespace rtbench {
namespace {

using testing::CollectingSink;
using testing::MakeSession;

TEST(SimulateLatencyTest, UniformMatchesReference) {
  SimulatedSutConfig c;
  c.distribution = LatencyDistribution::kUniform;
  c.params = {1e6, 2e6};
  SplitMix64 rng(3);
  EXPECT_EQ(SimulateLatency(c, rng), 1113450);
  EXPECT_EQ(SimulateLatency(c, rng), 1700294);
  EXPECT_EQ(SimulateLatency(c, rng), 1612975);
}

TEST(SimulateLatencyTest, LognormalMatchesReference) {
  SimulatedSutConfig c;
  c.distribution = LatencyDistribution::kLognormal;
  c.params = {16.1, 0.25};
  SplitMix64 rng(3);
  EXPECT_EQ(SimulateLatency(c, rng), 9457349);
  EXPECT_EQ(SimulateLatency(c, rng), 13376255);
  EXPECT_EQ(SimulateLatency(c, rng), 8758527);
}

TEST(SimulateLatencyTest, LognormalMedianNearExpMu) {
  SimulatedSutConfig c;
  c.distribution = LatencyDistribution::kLognormal;
  c.params = {16.1, 0.25};
  SplitMix64 rng(11);
  std::vector<int64_t> v(20001);
  for (auto& x : v) x = SimulateLatency(c, rng);
  std::nth_element(v.begin(), v.begin() + 10000, v.end());
  EXPECT_NEAR(static_cast<double>(v[10000]) / std::exp(16.1), 1.0, 0.01);
}

TEST(SimulateLatencyTest, BimodalWeight) {
  SimulatedSutConfig c;
  c.distribution = LatencyDistribution::kBimodal;
  c.params = {5e6, 50e6, 0.9};
  SplitMix64 rng(1);
  int first = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    int64_t l = SimulateLatency(c, rng);
    ASSERT_TRUE(l == 5'000'000 || l == 50'000'000);
    first += l == 5'000'000;
  }
  EXPECT_NEAR(first / static_cast<double>(n), 0.9, 0.005);
}

TEST(ParseSimSpecTest, Grammar) {
  auto fixed = ParseSimSpec("fixed:10ms");
  EXPECT_EQ(fixed.distribution, LatencyDistribution::kFixed);
  EXPECT_EQ(fixed.params, std::vector<double>{1e7});

  auto uniform = ParseSimSpec("uniform:1ms:2ms:echo:seed=9");
  EXPECT_EQ(uniform.params, (std::vector<double>{1e6, 2e6}));
  EXPECT_TRUE(uniform.echo_responses);
  EXPECT_EQ(uniform.seed, 9u);

  auto logn = ParseSimSpec("lognormal:16.1:0.25");
  EXPECT_EQ(logn.params, (std::vector<double>{16.1, 0.25}));

  auto bimodal = ParseSimSpec("bimodal:5ms:50ms:0.99:cache=0.5@2");
  EXPECT_EQ(bimodal.params, (std::vector<double>{5e6, 5e7, 0.99}));
  EXPECT_EQ(bimodal.cache_speedup, 0.5);
  EXPECT_EQ(bimodal.cache_window, 2u);

  EXPECT_THROW(ParseSimSpec("gamma:1"), std::invalid_argument);
  EXPECT_THROW(ParseSimSpec("uniform:1ms"), std::invalid_argument);
  EXPECT_THROW(ParseSimSpec("uniform:2ms:1ms"), std::invalid_argument);
  EXPECT_THROW(ParseSimSpec("fixed:1ms:bogus"), std::invalid_argument);
  EXPECT_THROW(ParseSimSpec("fixed:1ms:cache=1.5@1"), std::invalid_argument);
  EXPECT_THROW(ParseSimSpec("bimodal:1ms:2ms:1.0"), std::invalid_argument);
}

TEST(ParseSimSpecTest, Durations) {
  EXPECT_EQ(ParseDurationNs("250"), 250);
  EXPECT_EQ(ParseDurationNs("250ns"), 250);
  EXPECT_EQ(ParseDurationNs("3us"), 3000);
  EXPECT_EQ(ParseDurationNs("1.5ms"), 1'500'000);
  EXPECT_EQ(ParseDurationNs("60s"), 60'000'000'000);
  EXPECT_THROW(ParseDurationNs("ms"), std::invalid_argument);
  EXPECT_THROW(ParseDurationNs("-1s"), std::invalid_argument);
  EXPECT_THROW(ParseDurationNs("1h"), std::invalid_argument);
}

TEST(SimulatedSutTest, CompletesAfterFixedLatency) {
  SimulatedClock clock;
  auto sink = std::make_shared<CollectingSink>(clock);
  SimulatedSut sut(ParseSimSpec("fixed:10ms"));
  sut.Configure(MakeSession(clock, sink));
  std::vector<uint32_t> all = {0, 1, 2, 3, 4, 5, 6, 7};
  sut.LoadSamples(all);
  std::vector<uint32_t> q = {3};
  sut.IssueQuery(0, q);
  clock.SleepUntil(5'000'000);
  sut.IssueQuery(1, q);
  sut.Flush();
  auto r = sink->records();
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].query_id, 0u);
  EXPECT_EQ(r[0].at_ns, 10'000'000);
  EXPECT_EQ(r[1].at_ns, 15'000'000);
}

TEST(SimulatedSutTest, ResponsePayloads) {
  SimulatedClock clock;
  std::vector<uint32_t> all = {0, 1, 2, 3};
  std::vector<uint32_t> q = {2, 0};
  auto expected = [](bool echo) {
    std::vector<uint8_t> out;
    for (uint32_t i : {2u, 0u}) {
      auto s = SyntheticSample(5, i, 32);
      out.insert(out.end(), s.begin(), s.begin() + (echo ? 32 : 8));
    }
    return out;
  };
  for (bool echo : {false, true}) {
    auto sink = std::make_shared<CollectingSink>(clock);
    SimulatedSutConfig c;
    c.echo_responses = echo;
    SimulatedSut sut(c);
    sut.Configure(MakeSession(clock, sink, 4, 32, 5));
    sut.LoadSamples(all);
    sut.IssueQuery(0, q);
    sut.Flush();
    ASSERT_EQ(sink->size(), 1u);
    EXPECT_EQ(sink->records()[0].response, expected(echo)) << echo;
  }
}

TEST(SimulatedSutTest, RejectsUnloadedSamples) {
  SimulatedClock clock;
  auto sink = std::make_shared<CollectingSink>(clock);
  SimulatedSut sut(SimulatedSutConfig{});
  std::vector<uint32_t> q = {1};
  EXPECT_THROW(sut.LoadSamples(q), SutError);
  sut.Configure(MakeSession(clock, sink, 4));
  EXPECT_THROW(sut.IssueQuery(0, q), SutError);
  std::vector<uint32_t> some = {0};
  sut.LoadSamples(some);
  EXPECT_THROW(sut.IssueQuery(0, q), SutError);
  std::vector<uint32_t> outside = {9};
  EXPECT_THROW(sut.LoadSamples(outside), SutError);
  sut.IssueQuery(0, some);
  sut.Flush();
  sut.UnloadSamples();
  EXPECT_THROW(sut.IssueQuery(1, some), SutError);
}

TEST(SimulatedSutTest, CachingSpeedsUpRecentSamples) {
  SimulatedClock clock;
  auto sink = std::make_shared<CollectingSink>(clock);
  SimulatedSut sut(ParseSimSpec("fixed:10ms:cache=0.5@1"));
  sut.Configure(MakeSession(clock, sink, 4));
  std::vector<uint32_t> all = {0, 1, 2, 3};
  sut.LoadSamples(all);
  std::vector<std::vector<uint32_t>> queries = {{0}, {0}, {1}, {0}, {0}};
  std::vector<int64_t> latencies;
  for (uint64_t i = 0; i < queries.size(); ++i) {
    const int64_t start = clock.NowNs();
    sut.IssueQuery(i, queries[i]);
    sut.Flush();
    latencies.push_back(sink->records().back().at_ns - start);
  }
  EXPECT_EQ(latencies, (std::vector<int64_t>{10'000'000, 5'000'000, 10'000'000,
                                             10'000'000, 5'000'000}));
}

TEST(SimulatedSutTest, RngContinuesAcrossRuns) {
  // The latency stream is not restarted by Configure, so two back-to-back
  // runs on one SUT see different draws.
  SimulatedClock clock;
  SimulatedSut sut(ParseSimSpec("uniform:1ms:2ms:seed=3"));
  std::vector<int64_t> first;
  for (int run = 0; run < 2; ++run) {
    auto sink = std::make_shared<CollectingSink>(clock);
    sut.Configure(MakeSession(clock, sink, 1));
    std::vector<uint32_t> q = {0};
    sut.LoadSamples(q);
    const int64_t start = clock.NowNs();
    sut.IssueQuery(0, q);
    sut.Flush();
    first.push_back(sink->records()[0].at_ns - start);
    sut.UnloadSamples();
  }
  EXPECT_EQ(first, (std::vector<int64_t>{1113450, 1700294}));
}

}  // namespace
}  // namespace rtbench
