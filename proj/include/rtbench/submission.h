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

#ifndef RTBENCH_SUBMISSION_H_
#define RTBENCH_SUBMISSION_H_

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rtbench/latency_stats.h"
#include "rtbench/profiles.h"
#include "rtbench/run_log.h"
#include "rtbench/sut.h"
#include "rtbench/verdict.h"

namespace rtbench {

// Bundle directory layout:
//   performance.log   run log (H/I/C/S records)
//   accuracy.txt      metric, value, profile, seed[, reference]
//   system.txt        SutDescriptor fields
//   compliance.txt    V records, one per compliance test
// The two .txt files are `key = value` lines; `#` starts a comment.
inline constexpr const char* kPerformanceLogFile = "performance.log";
inline constexpr const char* kAccuracyFile = "accuracy.txt";
inline constexpr const char* kSystemFile = "system.txt";
inline constexpr const char* kComplianceFile = "compliance.txt";

struct AccuracyResult {
  std::string metric;
  double value = 0;
  std::string profile;
  uint64_t seed = 0;
  // Used when the profile has no built-in reference metric.
  std::optional<double> reference;

  bool operator==(const AccuracyResult&) const = default;
};

std::string FormatAccuracyResult(const AccuracyResult& result);
AccuracyResult ParseAccuracyResult(std::string_view text);

std::string FormatDescriptor(const SutDescriptor& sut);
SutDescriptor ParseDescriptor(std::string_view text);

std::string FormatVerdicts(std::span<const ComplianceVerdict> verdicts);

class BundleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SubmissionBundle {
  std::vector<LogRecord> performance_log;
  AccuracyResult accuracy;
  SutDescriptor system;
  std::vector<ComplianceVerdict> compliance;
};

// Throws BundleError for a missing file or malformed content.
SubmissionBundle LoadBundle(const std::string& directory);
void WriteBundle(const std::string& directory, const SubmissionBundle& bundle);

struct SubmissionCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Check names, in report order.
inline constexpr std::string_view kCheckLog = "log";
inline constexpr std::string_view kCheckDuration = "duration";
inline constexpr std::string_view kCheckQueryCount = "query_count";
inline constexpr std::string_view kCheckAccuracyGate = "accuracy_gate";
inline constexpr std::string_view kCheckCompliance = "compliance";
inline constexpr std::string_view kCheckCategory = "category";
inline constexpr std::string_view kCheckLineage = "lineage";

struct SubmissionReport {
  std::string profile;
  Scenario scenario = Scenario::kSingleStream;
  std::string system_name;
  SubmissionCategory category = SubmissionCategory::kDevelopmentSystem;
  std::vector<SubmissionCheck> checks;
  // Present when the log carries a summary that matches the recomputation.
  std::optional<RunSummary> summary;

  bool valid() const;
  std::vector<std::string> FailedChecks() const;
  // The score: p999 latency and, for Constant Stream, the overrun count.
  std::optional<int64_t> p999_ns() const;
  std::optional<uint64_t> overruns() const;
};

// Checks:
//   log          embedded summary present and equal to the recomputation
//   duration     run length >= settings.min_duration_ns
//   query_count  completed queries >= settings.min_query_count
//   accuracy_gate  AccuracyGate(measured, reference, profile constraint)
//   compliance   all three harness tests present, passed and recomputable
//   category     CategoryViolations() empty
//   lineage      profile, seed and mode agree across components
// Valid iff every check passes. There is no latency threshold; latency is
// only reported.
SubmissionReport ValidateSubmission(const SubmissionBundle& bundle,
                                    const BenchmarkProfile& profile);

// One row per (profile, scenario) over the built-in profiles plus any other
// profile named in `reports`: number of valid submissions, best p999 in ms,
// and the categories of the valid ones. Missing cells render as `-`.
std::string RenderReport(std::span<const SubmissionReport> reports);

}  // namespace rtbench

#endif  // RTBENCH_SUBMISSION_H_
