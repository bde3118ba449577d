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

#ifndef RTBENCH_RUN_LOG_H_
#define RTBENCH_RUN_LOG_H_

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rtbench/latency_stats.h"
#include "rtbench/profiles.h"
#include "rtbench/run_types.h"
#include "rtbench/verdict.h"

namespace rtbench {

inline constexpr int kLogFormatVersion = 1;

// Line-oriented text log. Each line is a one-letter tag followed by
// comma separated fields in a fixed order (docs/log_format.md):
//   H,version,profile,scenario,mode,seed,min_duration_ns,min_query_count,
//     store_size,sample_bytes,rate_override_hz,sut_endpoint
//   I,query_id,scheduled_ns,issue_ns,idx;idx;...
//   C,query_id,completion_ns,digest
//   S,count,min,mean,max,p50,p90,p99,p999,overrun_count,duration_ns,
//     completed_per_second
//   V,test_name,passed,key=value;key=value
//   F,message
// Empty scheduled_ns / rate_override_hz mean "absent". Digests are 16
// lowercase hex digits.
struct HeaderRecord {
  int version = kLogFormatVersion;
  // settings.profile is not serialized; the parser sets it to `profile`.
  std::string profile;
  RunSettings settings;
  bool operator==(const HeaderRecord&) const = default;
};

struct IssueRecord {
  uint64_t query_id = 0;
  std::optional<int64_t> scheduled_ns;
  int64_t issue_ns = 0;
  std::vector<uint32_t> sample_indices;
  bool operator==(const IssueRecord&) const = default;
};

struct CompleteRecord {
  uint64_t query_id = 0;
  int64_t completion_ns = 0;
  uint64_t response_digest = 0;
  bool operator==(const CompleteRecord&) const = default;
};

struct SummaryRecord {
  RunSummary summary;
  bool operator==(const SummaryRecord&) const = default;
};

struct VerdictRecord {
  ComplianceVerdict verdict;
  bool operator==(const VerdictRecord&) const = default;
};

// The run stopped early because the SUT failed.
struct FailureRecord {
  std::string message;
  bool operator==(const FailureRecord&) const = default;
};

using LogRecord = std::variant<HeaderRecord, IssueRecord, CompleteRecord,
                               SummaryRecord, VerdictRecord, FailureRecord>;

class LogFormatError : public std::runtime_error {
 public:
  LogFormatError(int line, const std::string& message)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message
                                    : message),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

std::string WriteLog(std::span<const LogRecord> records);
std::string FormatRecord(const LogRecord& record);

// Rejects unknown tags, wrong field counts, unknown versions, a missing or
// misplaced header, and I/C records after the summary.
std::vector<LogRecord> ParseLog(std::string_view text);

// Text made only of V lines, as stored in a submission bundle.
std::vector<ComplianceVerdict> ParseVerdictLines(std::string_view text);

// Header, then issue/complete records in query order (each completion
// right after its issue), then the failure or the summary.
std::vector<LogRecord> RecordsFromRun(const RunLog& log,
                                      const std::optional<RunSummary>& summary);

// Rebuilds the trace. wall_start is 0 and wall_end the last completion.
RunLog RunLogFromRecords(std::span<const LogRecord> records);

// Summary recomputed from I/C records. Throws StatsError if any query has
// no completion.
RunSummary RecomputeSummary(std::span<const LogRecord> records);

std::optional<RunSummary> EmbeddedSummary(std::span<const LogRecord> records);
std::vector<ComplianceVerdict> Verdicts(std::span<const LogRecord> records);

// Shortest decimal text that parses back to the same double.
std::string FormatDouble(double v);

}  // namespace rtbench

#endif  // RTBENCH_RUN_LOG_H_
