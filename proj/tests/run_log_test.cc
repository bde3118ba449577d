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

#include "rtbench/run_log.h"

#include <gtest/gtest.h>

#include <bit>
#include <charconv>
#include <cmath>
#include <random>

#include "rtbench/clock.h"
#include "rtbench/engine.h"
#include "rtbench/simulated_sut.h"
#include "test_suts.h"

namespace rtbench {
namespace {

using testing::Profile;
using testing::QuickSettings;

HeaderRecord Header(const std::string& profile = "ssd_resnet50") {
  HeaderRecord h;
  h.profile = profile;
  h.settings.profile = profile;
  return h;
}

TEST(FormatRecordTest, IssueLine) {
  IssueRecord r{0, std::nullopt, 12, {3}};
  EXPECT_EQ(FormatRecord(r), "I,0,,12,3");
  IssueRecord multi{5, 66666667, 66666700, {1, 0, 7}};
  EXPECT_EQ(FormatRecord(multi), "I,5,66666667,66666700,1;0;7");
}

TEST(FormatRecordTest, OtherLines) {
  EXPECT_EQ(FormatRecord(CompleteRecord{4, 100, 0xaf63dc4c8601ec8cull}),
            "C,4,100,af63dc4c8601ec8c");
  EXPECT_EQ(FormatRecord(FailureRecord{"peer closed, mid run"}),
            "F,peer closed, mid run");
  ComplianceVerdict v{"harness/caching", true, {{"ratio", 0.95}, {"queries", 1000}}};
  EXPECT_EQ(FormatRecord(VerdictRecord{v}),
            "V,harness/caching,1,queries=1000;ratio=0.95");
  EXPECT_EQ(FormatRecord(Header()),
            "H,1,ssd_resnet50,single_stream,performance,0,60000000000,1,8,1,,"
            "sim:fixed:10ms");
}

TEST(FormatDoubleTest, ShortestRoundTrip) {
  EXPECT_EQ(FormatDouble(0.1), "0.1");
  EXPECT_EQ(FormatDouble(15), "15");
  std::mt19937_64 rng(1);
  for (int i = 0; i < 10000; ++i) {
    double d = std::bit_cast<double>(rng());
    if (!std::isfinite(d)) continue;
    std::string text = FormatDouble(d);
    double back = 0;
    std::from_chars(text.data(), text.data() + text.size(), back);
    EXPECT_EQ(back, d) << text;
  }
}

// Random record stream obeying the ordering rules.
std::vector<LogRecord> RandomStream(std::mt19937_64& rng) {
  std::uniform_int_distribution<int64_t> t(0, int64_t{1} << 50);
  std::uniform_real_distribution<double> u(0, 1e6);
  std::vector<LogRecord> out;

  HeaderRecord h = Header(rng() % 2 ? "bevformer_tiny" : "my_profile");
  h.settings.scenario = rng() % 2 ? Scenario::kSingleStream : Scenario::kConstantStream;
  h.settings.mode = rng() % 2 ? Mode::kPerformance : Mode::kAccuracy;
  h.settings.seed = rng();
  h.settings.min_duration_ns = t(rng);
  h.settings.min_query_count = rng() % 100000;
  h.settings.store_size = 1 + rng() % 1000;
  h.settings.sample_bytes = 1 + rng() % 100000;
  if (rng() % 2) h.settings.rate_override_hz = u(rng);
  h.settings.sut_endpoint = rng() % 2 ? "tcp:127.0.0.1:9000" : "sim:lognormal:16.1:0.25";
  out.push_back(h);

  const int n = rng() % 50;
  for (int i = 0; i < n; ++i) {
    IssueRecord r;
    r.query_id = i;
    if (h.settings.scenario == Scenario::kConstantStream) r.scheduled_ns = t(rng);
    r.issue_ns = t(rng);
    for (int k = 1 + rng() % 6; k > 0; --k) r.sample_indices.push_back(rng() % 5000);
    out.push_back(r);
    if (rng() % 4) out.push_back(CompleteRecord{static_cast<uint64_t>(i), t(rng), rng()});
  }
  if (rng() % 3 == 0) {
    out.push_back(FailureRecord{"SUT closed the connection: reset, errno 104"});
  } else {
    RunSummary s;
    s.count = rng() % 1000;
    s.min_ns = t(rng);
    s.mean_ns = t(rng);
    s.max_ns = t(rng);
    s.p50_ns = t(rng);
    s.p90_ns = t(rng);
    s.p99_ns = t(rng);
    s.p999_ns = t(rng);
    s.overrun_count = rng() % 100;
    s.duration_ns = t(rng);
    s.completed_per_second = u(rng) / 7;
    out.push_back(SummaryRecord{s});
  }
  for (int k = rng() % 3; k > 0; --k) {
    ComplianceVerdict v{"harness/determinism", rng() % 2 == 0, {}};
    for (int e = rng() % 4; e > 0; --e) v.evidence["key" + std::to_string(e)] = u(rng) - 5e5;
    out.push_back(VerdictRecord{v});
  }
  return out;
}

TEST(ParseLogTest, RandomStreamsRoundTrip) {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 500; ++i) {
    auto records = RandomStream(rng);
    std::string text = WriteLog(records);
    auto parsed = ParseLog(text);
    ASSERT_EQ(parsed, records) << text;
    EXPECT_EQ(WriteLog(parsed), text);
  }
}

TEST(ParseLogTest, TamperedFieldCountNamesLine) {
  std::string text =
      FormatRecord(Header()) + "\n" +
      "I,0,,12,3\n"
      "C,0,50,0000000000000001,extra\n";
  try {
    ParseLog(text);
    FAIL();
  } catch (const LogFormatError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(ParseLogTest, StructuralErrors) {
  const std::string h = FormatRecord(Header()) + "\n";
  auto line_of = [](const std::string& text) {
    try {
      ParseLog(text);
    } catch (const LogFormatError& e) {
      return e.line();
    }
    return -1;
  };
  std::string bad_version = h;
  bad_version[2] = '2';
  EXPECT_EQ(line_of(bad_version), 1);
  EXPECT_EQ(line_of("I,0,,12,3\n"), 1);
  EXPECT_EQ(line_of(h + h), 2);
  EXPECT_EQ(line_of(h + "X,1\n"), 2);
  EXPECT_EQ(line_of(h + "I,0,,12,x\n"), 2);
  EXPECT_EQ(line_of(h + "C,0,5,xyz\n"), 2);
  EXPECT_EQ(line_of(h + "S,0,0,0,0,0,0,0,0,0,0,0\nI,0,,1,0\n"), 3);
  EXPECT_EQ(line_of(""), 0);
  // CRLF and blank lines are tolerated.
  EXPECT_NO_THROW(ParseLog(FormatRecord(Header()) + "\r\n\nI,0,,12,3\r\n"));
}

TEST(ParseVerdictLinesTest, AcceptsOnlyVerdicts) {
  auto v = ParseVerdictLines("V,harness/caching,0,ratio=0.5\nV,harness/determinism,1,\n");
  ASSERT_EQ(v.size(), 2u);
  EXPECT_FALSE(v[0].passed);
  EXPECT_EQ(v[0].evidence.at("ratio"), 0.5);
  EXPECT_TRUE(v[1].evidence.empty());
  EXPECT_THROW(ParseVerdictLines("I,0,,12,3\n"), LogFormatError);
}

struct MatrixCase {
  std::string profile;
  Scenario scenario;
  std::string sut;
  uint64_t queries;
};

std::vector<MatrixCase> Matrix() {
  std::vector<MatrixCase> m;
  for (const auto& p : BuiltinProfiles()) {
    for (auto sc : {Scenario::kSingleStream, Scenario::kConstantStream}) {
      for (const char* sut : {"fixed:10ms", "lognormal:16.1:0.25", "uniform:40ms:120ms",
                              "bimodal:5ms:200ms:0.9"}) {
        m.push_back({p.name, sc, sut, 300});
      }
    }
  }
  return m;
}

TEST(RecomputeTest, EmbeddedEqualsRecomputedAcrossMatrix) {
  for (const auto& c : Matrix()) {
    SimulatedClock clock;
    ScenarioEngine engine(clock);
    SimulatedSut sut(ParseSimSpec(c.sut));
    auto profile = Profile(c.profile);
    auto settings = QuickSettings(profile, c.queries, 13);
    settings.scenario = c.scenario;
    RunLog log = engine.Run(sut, settings, profile);
    ASSERT_TRUE(log.valid());
    RunSummary summary = Summarize(log);
    auto records = RecordsFromRun(log, summary);
    auto parsed = ParseLog(WriteLog(records));
    ASSERT_EQ(parsed, records) << c.profile << " " << c.sut;
    EXPECT_EQ(EmbeddedSummary(parsed), summary);
    EXPECT_EQ(RecomputeSummary(parsed), summary) << c.profile << " " << c.sut;
    RunLog rebuilt = RunLogFromRecords(parsed);
    EXPECT_EQ(rebuilt.overrun_count, log.overrun_count);
    EXPECT_EQ(rebuilt.trace.size(), log.trace.size());
  }
}

TEST(RecomputeTest, StrippedCompletionThrows) {
  SimulatedClock clock;
  ScenarioEngine engine(clock);
  SimulatedSut sut(ParseSimSpec("fixed:1ms"));
  auto profile = Profile("ssd_resnet50");
  RunLog log = engine.Run(sut, QuickSettings(profile, 20), profile);
  auto records = RecordsFromRun(log, Summarize(log));
  auto it = std::find_if(records.begin(), records.end(), [](const LogRecord& r) {
    return std::holds_alternative<CompleteRecord>(r);
  });
  records.erase(it);
  EXPECT_THROW(RecomputeSummary(ParseLog(WriteLog(records))), StatsError);
}

TEST(RecomputeTest, ConstantStreamHandTrace) {
  // 15 Hz: scheduled 0, 66666667, 133333333. Query 1 completes after
  // query 2's slot.
  const std::string text =
      "H,1,ssd_resnet50,constant_stream,performance,0,0,3,8,64,,sim:fixed:10ms\n"
      "I,0,0,5,1\n"
      "C,0,50000000,0000000000000000\n"
      "I,1,66666667,66666700,2\n"
      "C,1,140000000,0000000000000000\n"
      "I,2,133333333,140000010,3\n"
      "C,2,150000000,0000000000000000\n";
  RunSummary s = RecomputeSummary(ParseLog(text));
  // Latencies from the schedule: 50000000, 73333333, 16666667.
  EXPECT_EQ(s.count, 3u);
  EXPECT_EQ(s.min_ns, 16666667);
  EXPECT_EQ(s.max_ns, 73333333);
  EXPECT_EQ(s.mean_ns, 46666666);
  EXPECT_EQ(s.p50_ns, 50000000);
  EXPECT_EQ(s.p90_ns, 73333333);
  EXPECT_EQ(s.p999_ns, 73333333);
  EXPECT_EQ(s.overrun_count, 1u);
  EXPECT_EQ(s.duration_ns, 150000000);
  EXPECT_EQ(s.completed_per_second, 20.0);
  EXPECT_EQ(FormatRecord(SummaryRecord{s}),
            "S,3,16666667,46666666,73333333,50000000,73333333,73333333,73333333,1,"
            "150000000,20");
}

TEST(ParseLogTest, CompletionOrderIsFree) {
  // Completions may be logged away from their issue line.
  auto records = ParseLog(
      "H,1,ssd_resnet50,single_stream,performance,0,0,1,8,64,,sim:fixed:10ms\n"
      "I,0,,0,1\nI,1,,5,2\nC,1,9,0000000000000000\nC,0,10,0000000000000000\n");
  RunLog log = RunLogFromRecords(records);
  ASSERT_EQ(log.trace.size(), 2u);
  EXPECT_EQ(log.trace[0].completion->completion_ns, 10);
}

}  // namespace
}  // namespace rtbench
