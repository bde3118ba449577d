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

#ifndef RTBENCH_COMPLIANCE_H_
#define RTBENCH_COMPLIANCE_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "rtbench/engine.h"
#include "rtbench/profiles.h"
#include "rtbench/sut.h"
#include "rtbench/verdict.h"

namespace rtbench {

// The three tests below are defined by this harness, not by an official
// compliance suite. Their names carry the "harness/" prefix wherever they
// are printed or logged.
inline constexpr std::string_view kDeterminismTest = "harness/determinism";
inline constexpr std::string_view kCachingTest = "harness/caching";
inline constexpr std::string_view kAccuracyInPerfTest = "harness/accuracy_in_perf";

inline constexpr double kDefaultRatioThreshold = 0.9;
inline constexpr double kDefaultSampleFraction = 0.1;
inline constexpr uint64_t kMinCachingQueries = 100;
inline constexpr uint64_t kDefaultComplianceQueries = 1000;

class ComplianceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Runs the engine twice with settings.seed against a fixed-latency
// simulated SUT on a simulated clock and compares the logged sample
// indices and query order. A third run with seed + 1 is reported as
// `control_differs` (information only; it never affects `passed`).
// Evidence: queries, index_mismatches, order_mismatches, control_differs.
ComplianceVerdict TestDeterminism(const RunSettings& settings,
                                  const BenchmarkProfile& profile,
                                  uint64_t n_queries = kDefaultComplianceQueries);

// Closed-loop run A over cyclically distinct samples, run B repeating
// sample 0 in every slot. passed <=> p50_B >= ratio_threshold * p50_A.
// The store is widened to 16 queries' worth of samples so that run A never
// repeats an index within 16 consecutive queries.
// Evidence: p50_unique_ns, p50_repeated_ns, ratio, ratio_threshold, queries.
// Throws ComplianceError for n_queries < 100 or a failed run.
ComplianceVerdict TestCaching(ScenarioEngine& engine, SystemUnderTest& sut,
                              const RunSettings& settings,
                              const BenchmarkProfile& profile,
                              double ratio_threshold = kDefaultRatioThreshold,
                              uint64_t n_queries = kDefaultComplianceQueries);

// Performance run, then an accuracy run over the sample lists of a seeded
// subset of its query ids. passed <=> every subset query's logged digest
// equals the accuracy-run digest.
// Evidence: retained, mismatches, sample_fraction, queries.
// Throws ComplianceError when the subset is empty or a run failed.
ComplianceVerdict TestAccuracyInPerf(ScenarioEngine& engine, SystemUnderTest& sut,
                                     const RunSettings& settings,
                                     const BenchmarkProfile& profile,
                                     double sample_fraction = kDefaultSampleFraction);

// True when query_id belongs to the retained subset for `seed`.
bool RetainQuery(uint64_t seed, uint64_t query_id, double sample_fraction);

// Recomputes `passed` from the evidence alone. nullopt for an unknown test
// name or missing evidence.
std::optional<bool> RecomputeVerdict(const ComplianceVerdict& verdict);

}  // namespace rtbench

#endif  // RTBENCH_COMPLIANCE_H_
