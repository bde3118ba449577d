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

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "rtbench/latency_stats.h"
#include "rtbench/run_types.h"

namespace rtbench {
namespace {

struct Fraction {
  uint64_t num, den;
  double value() const { return static_cast<double>(num) / den; }
};

constexpr Fraction kTails[] = {{1, 2}, {9, 10}, {99, 100}, {999, 1000}};

// ceil(num * n / den) in integers, clamped to [1, n].
size_t OracleRank(size_t n, Fraction p) {
  size_t k = (p.num * n + p.den - 1) / p.den;
  return std::clamp<size_t>(k, 1, n);
}

int64_t OraclePercentile(std::vector<int64_t> v, Fraction p) {
  std::sort(v.begin(), v.end());
  return v[OracleRank(v.size(), p) - 1];
}

TEST(PercentileTest, RankMatchesExactArithmetic) {
  for (size_t n = 1; n <= 20000; ++n) {
    for (Fraction p : kTails) {
      ASSERT_EQ(PercentileRank(n, p.value()), OracleRank(n, p)) << n << " " << p.num;
    }
  }
}

TEST(PercentileTest, KnownRanks) {
  EXPECT_EQ(PercentileRank(1000, 0.999), 999u);
  EXPECT_EQ(PercentileRank(1001, 0.999), 1000u);
  EXPECT_EQ(PercentileRank(1, 0.999), 1u);
  EXPECT_EQ(PercentileRank(10, 0.5), 5u);
  EXPECT_EQ(PercentileRank(26514, 0.999), 26488u);
}

TEST(PercentileTest, MatchesSortOracle) {
  std::mt19937_64 rng(1234);
  std::uniform_int_distribution<size_t> len(1, 3000);
  std::uniform_int_distribution<int64_t> value(0, 50);  // many ties
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<int64_t> v(len(rng));
    for (auto& x : v) x = value(rng);
    for (Fraction p : kTails) {
      ASSERT_EQ(Percentile(v, p.value()), OraclePercentile(v, p));
    }
  }
}

TEST(PercentileTest, Errors) {
  std::vector<int64_t> empty;
  EXPECT_THROW(Percentile(empty, 0.5), StatsError);
  std::vector<int64_t> one = {3};
  EXPECT_THROW(Percentile(one, 0.0), StatsError);
  EXPECT_THROW(Percentile(one, 1.0), StatsError);
  EXPECT_EQ(Percentile(one, 0.999), 3);
}

TEST(MinQueryCountTest, MatchesFormula) {
  // Two-sided 99% normal quantile, computed independently.
  const double z = 2.5758293035489004;
  auto formula = [&](double p) {
    const double delta = (1 - p) / 2;
    return static_cast<uint64_t>(std::ceil(z * z * p * (1 - p) / (delta * delta)));
  };
  EXPECT_NEAR(TwoSidedZ(0.99), z, 1e-12);
  EXPECT_EQ(MinQueryCount(0.999, 0.99), 26514u);
  EXPECT_EQ(MinQueryCount(0.999, 0.99), formula(0.999));
  EXPECT_EQ(MinQueryCount(0.5, 0.99), 27u);
  EXPECT_EQ(MinQueryCount(0.9, 0.99), formula(0.9));
  EXPECT_THROW(MinQueryCount(1.0, 0.99), StatsError);
  EXPECT_THROW(MinQueryCount(0.9, 1.0), StatsError);
}

TEST(MinQueryCountTest, MonotoneInConfidence) {
  uint64_t last = 0;
  for (double c : {0.8, 0.9, 0.95, 0.99, 0.999}) {
    uint64_t n = MinQueryCount(0.999, c);
    EXPECT_GT(n, last);
    last = n;
  }
}

TraceEntry Entry(uint64_t id, std::optional<int64_t> sched, int64_t issue,
                 int64_t done) {
  TraceEntry e;
  e.query.query_id = id;
  e.query.scheduled_ns = sched;
  e.query.issue_ns = issue;
  e.query.sample_indices = {0};
  e.completion = Completion{id, done, 0, {}};
  return e;
}

TEST(SummarizeTest, HandComputedSingleStream) {
  RunLog log;
  log.trace = {Entry(0, {}, 0, 10), Entry(1, {}, 10, 30), Entry(2, {}, 30, 60)};
  log.wall_end_ns = 60;
  RunSummary s = Summarize(log);
  EXPECT_EQ(s.count, 3u);
  EXPECT_EQ(s.min_ns, 10);
  EXPECT_EQ(s.max_ns, 30);
  EXPECT_EQ(s.mean_ns, 20);
  EXPECT_EQ(s.p50_ns, 20);
  EXPECT_EQ(s.p999_ns, 30);
  EXPECT_EQ(s.duration_ns, 60);
  EXPECT_DOUBLE_EQ(s.completed_per_second, 3 * 1e9 / 60);
}

TEST(SummarizeTest, ConstantStreamUsesScheduleOrigin) {
  // Query 1 is issued 5 ns late; its latency still counts from the schedule.
  std::vector<TraceEntry> trace = {Entry(0, 0, 0, 150), Entry(1, 100, 105, 180),
                                   Entry(2, 200, 200, 260)};
  EXPECT_EQ(LatencyOf(trace[1].query, *trace[1].completion), 80);
  EXPECT_EQ(CountOverruns(trace), 1u);  // 150 > 100; 180 <= 200
  RunLog log;
  log.trace = trace;
  log.wall_end_ns = 260;
  RunSummary s = Summarize(log);
  EXPECT_EQ(s.min_ns, 60);
  EXPECT_EQ(s.max_ns, 150);
  EXPECT_EQ(s.mean_ns, (150 + 80 + 60) / 3);
  EXPECT_EQ(s.overrun_count, 1u);
}

TEST(SummarizeTest, RejectsIncompleteLogs) {
  RunLog log;
  EXPECT_THROW(Summarize(log), StatsError);
  log.trace = {Entry(0, {}, 0, 10), Entry(1, {}, 10, 20)};
  log.trace[1].completion.reset();
  EXPECT_THROW(Summarize(log), StatsError);
  log.trace = {Entry(0, {}, 0, 10), Entry(2, {}, 10, 20)};
  EXPECT_THROW(Summarize(log), StatsError);
}

TEST(ValidityTest, DurationAndCount) {
  RunSummary s;
  s.count = 100;
  s.duration_ns = 1000;
  RunSettings settings;
  settings.min_query_count = 100;
  settings.min_duration_ns = 1000;
  EXPECT_TRUE(CheckValidity(s, settings).ok());
  settings.min_duration_ns = 1001;
  auto r = CheckValidity(s, settings);
  EXPECT_FALSE(r.duration_ok);
  EXPECT_TRUE(r.query_count_ok);
  EXPECT_EQ(r.messages.size(), 1u);
  settings.min_query_count = 101;
  EXPECT_FALSE(CheckValidity(s, settings).query_count_ok);
}

}  // namespace
}  // namespace rtbench
