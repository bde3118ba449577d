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

#ifndef RTBENCH_LATENCY_STATS_H_
#define RTBENCH_LATENCY_STATS_H_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtbench/profiles.h"
#include "rtbench/run_types.h"

namespace rtbench {

class StatsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Rank of the reported order statistic: k = ceil(p * n), 1-based, clamped
// to [1, n]. A 1e-9 slack absorbs binary rounding of decimal p so that e.g.
// p = 0.999, n = 1000 gives 999 rather than 1000.
size_t PercentileRank(size_t n, double p);

// k-th smallest sample, k = PercentileRank(n, p). No interpolation: the
// result is always one of the samples.
int64_t Percentile(std::span<const int64_t> samples, double p);

// Two-sided standard normal quantile for `confidence`.
double TwoSidedZ(double confidence);

// Queries needed so that the empirical p-quantile's rank lands within
// delta = (1 - p) / 2 of p with the given confidence (normal approximation):
// ceil(z^2 * p * (1 - p) / delta^2).
uint64_t MinQueryCount(double p, double confidence);

struct RunSummary {
  uint64_t count = 0;
  int64_t min_ns = 0;
  int64_t mean_ns = 0;
  int64_t max_ns = 0;
  int64_t p50_ns = 0;
  int64_t p90_ns = 0;
  int64_t p99_ns = 0;
  int64_t p999_ns = 0;
  uint64_t overrun_count = 0;
  int64_t duration_ns = 0;
  double completed_per_second = 0;

  bool operator==(const RunSummary&) const = default;
};

// Throws StatsError on an empty or incomplete log.
RunSummary Summarize(const RunLog& log);
RunSummary SummarizeLatencies(std::span<const int64_t> latencies,
                              uint64_t overrun_count, int64_t duration_ns);

struct ValidityReport {
  bool duration_ok = false;
  bool query_count_ok = false;
  std::vector<std::string> messages;

  bool ok() const { return duration_ok && query_count_ok; }
};

ValidityReport CheckValidity(const RunSummary& summary,
                             const RunSettings& settings);

}  // namespace rtbench

#endif  // RTBENCH_LATENCY_STATS_H_
