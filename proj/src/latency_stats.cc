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

#include "rtbench/latency_stats.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

namespace rtbench {

uint64_t CountOverruns(const std::vector<TraceEntry>& trace) {
  uint64_t overruns = 0;
  for (size_t i = 0; i + 1 < trace.size(); ++i) {
    const auto& next = trace[i + 1].query;
    if (!next.scheduled_ns || !trace[i].completion) continue;
    if (trace[i].completion->completion_ns > *next.scheduled_ns) ++overruns;
  }
  return overruns;
}

size_t PercentileRank(size_t n, double p) {
  double k = std::ceil(p * static_cast<double>(n) - 1e-9);
  if (k < 1) return 1;
  if (k > static_cast<double>(n)) return n;
  return static_cast<size_t>(k);
}

int64_t Percentile(std::span<const int64_t> samples, double p) {
  if (samples.empty()) throw StatsError("percentile of an empty sample set");
  if (!(p > 0 && p < 1)) throw StatsError("percentile p must be in (0, 1)");
  std::vector<int64_t> work(samples.begin(), samples.end());
  size_t k = PercentileRank(work.size(), p);
  std::nth_element(work.begin(), work.begin() + (k - 1), work.end());
  return work[k - 1];
}

double TwoSidedZ(double confidence) {
  if (!(confidence > 0 && confidence < 1)) {
    throw StatsError("confidence must be in (0, 1)");
  }
  boost::math::normal_distribution<double> standard;
  return boost::math::quantile(standard, 0.5 + confidence / 2);
}

uint64_t MinQueryCount(double p, double confidence) {
  if (!(p > 0 && p < 1)) throw StatsError("tail percentile must be in (0, 1)");
  if (!(confidence > 0.5 && confidence < 1)) {
    throw StatsError("confidence must be in (0.5, 1)");
  }
  const double z = TwoSidedZ(confidence);
  const double delta = (1 - p) / 2;
  return static_cast<uint64_t>(std::ceil(z * z * p * (1 - p) / (delta * delta)));
}

RunSummary SummarizeLatencies(std::span<const int64_t> latencies,
                              uint64_t overrun_count, int64_t duration_ns) {
  if (latencies.empty()) throw StatsError("no completed queries to summarize");
  std::vector<int64_t> sorted(latencies.begin(), latencies.end());
  std::sort(sorted.begin(), sorted.end());
  auto at = [&](double p) { return sorted[PercentileRank(sorted.size(), p) - 1]; };

  __int128 total = 0;
  for (int64_t l : sorted) total += l;

  RunSummary s;
  s.count = sorted.size();
  s.min_ns = sorted.front();
  s.max_ns = sorted.back();
  s.mean_ns = static_cast<int64_t>(total / static_cast<__int128>(sorted.size()));
  s.p50_ns = at(0.5);
  s.p90_ns = at(0.9);
  s.p99_ns = at(0.99);
  s.p999_ns = at(0.999);
  s.overrun_count = overrun_count;
  s.duration_ns = duration_ns;
  s.completed_per_second =
      duration_ns > 0 ? static_cast<double>(s.count) * 1e9 /
                            static_cast<double>(duration_ns)
                      : 0.0;
  return s;
}

RunSummary Summarize(const RunLog& log) {
  std::vector<int64_t> latencies;
  latencies.reserve(log.trace.size());
  for (size_t i = 0; i < log.trace.size(); ++i) {
    const auto& e = log.trace[i];
    if (e.query.query_id != i) {
      throw StatsError("trace has a gap at query " + std::to_string(i));
    }
    if (!e.completion) {
      throw StatsError("query " + std::to_string(i) + " has no completion");
    }
    latencies.push_back(LatencyOf(e.query, *e.completion));
  }
  return SummarizeLatencies(latencies, CountOverruns(log.trace),
                            log.wall_end_ns - log.wall_start_ns);
}

ValidityReport CheckValidity(const RunSummary& summary,
                             const RunSettings& settings) {
  ValidityReport r;
  r.duration_ok = summary.duration_ns >= settings.min_duration_ns;
  r.query_count_ok = summary.count >= settings.min_query_count;
  if (!r.duration_ok) {
    std::ostringstream m;
    m << "duration " << summary.duration_ns << " ns is short of the "
      << settings.min_duration_ns << " ns minimum by "
      << settings.min_duration_ns - summary.duration_ns << " ns";
    r.messages.push_back(m.str());
  }
  if (!r.query_count_ok) {
    std::ostringstream m;
    m << "query count " << summary.count << " is below the minimum of "
      << settings.min_query_count;
    r.messages.push_back(m.str());
  }
  return r;
}

}  // namespace rtbench
