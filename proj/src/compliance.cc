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

#include "rtbench/compliance.h"

#include <algorithm>
#include <vector>

#include "rtbench/latency_stats.h"
#include "rtbench/simulated_sut.h"

namespace rtbench {

namespace {

constexpr uint32_t kCachingDistinctWindow = 16;
constexpr uint64_t kRetainSalt = 0xA5C3'0F1E'7B29'D486ULL;

void RequireSuccess(const RunLog& log, std::string_view what) {
  if (log.failure) {
    throw ComplianceError(std::string(what) + " run failed: " + *log.failure);
  }
}

RunSettings FixedCount(RunSettings settings, uint64_t n_queries) {
  settings.mode = Mode::kPerformance;
  settings.min_duration_ns = 0;
  settings.min_query_count = n_queries;
  return settings;
}

int64_t MedianLatency(const RunLog& log) {
  std::vector<int64_t> latencies;
  latencies.reserve(log.trace.size());
  for (const auto& e : log.trace) {
    latencies.push_back(LatencyOf(e.query, *e.completion));
  }
  return Percentile(latencies, 0.5);
}

std::optional<double> Get(const ComplianceVerdict& v, const std::string& key) {
  auto it = v.evidence.find(key);
  if (it == v.evidence.end()) return std::nullopt;
  return it->second;
}

}  // namespace

ComplianceVerdict TestDeterminism(const RunSettings& settings,
                                  const BenchmarkProfile& profile,
                                  uint64_t n_queries) {
  const RunSettings fixed = FixedCount(settings, n_queries);
  SimulatedSutConfig sut_config;
  sut_config.params = {1'000'000};

  auto run = [&](uint64_t seed) {
    SimulatedClock clock;
    ScenarioEngine engine(clock);
    SimulatedSut sut(sut_config, "determinism-probe");
    RunSettings s = fixed;
    s.seed = seed;
    RunLog log = engine.Run(sut, s, profile);
    RequireSuccess(log, "determinism");
    return log;
  };

  const RunLog a = run(settings.seed);
  const RunLog b = run(settings.seed);
  const RunLog control = run(settings.seed + 1);

  uint64_t index_mismatches = 0;
  uint64_t order_mismatches = 0;
  const size_t n = std::max(a.trace.size(), b.trace.size());
  for (size_t i = 0; i < n; ++i) {
    if (i >= a.trace.size() || i >= b.trace.size()) {
      ++index_mismatches;
      ++order_mismatches;
      continue;
    }
    const Query& qa = a.trace[i].query;
    const Query& qb = b.trace[i].query;
    if (qa.sample_indices != qb.sample_indices) ++index_mismatches;
    if (qa.query_id != qb.query_id || qa.issue_ns != qb.issue_ns ||
        qa.scheduled_ns != qb.scheduled_ns) {
      ++order_mismatches;
    }
  }
  bool control_differs = a.trace.size() != control.trace.size();
  for (size_t i = 0; !control_differs && i < a.trace.size(); ++i) {
    control_differs =
        a.trace[i].query.sample_indices != control.trace[i].query.sample_indices;
  }

  ComplianceVerdict v;
  v.test_name = std::string(kDeterminismTest);
  v.evidence["queries"] = static_cast<double>(a.trace.size());
  v.evidence["index_mismatches"] = static_cast<double>(index_mismatches);
  v.evidence["order_mismatches"] = static_cast<double>(order_mismatches);
  v.evidence["control_differs"] = control_differs ? 1 : 0;
  v.passed = *RecomputeVerdict(v);
  return v;
}

ComplianceVerdict TestCaching(ScenarioEngine& engine, SystemUnderTest& sut,
                              const RunSettings& settings,
                              const BenchmarkProfile& profile,
                              double ratio_threshold, uint64_t n_queries) {
  if (n_queries < kMinCachingQueries) {
    throw ComplianceError("caching test needs at least " +
                          std::to_string(kMinCachingQueries) + " queries, got " +
                          std::to_string(n_queries));
  }
  if (!(ratio_threshold > 0)) throw ComplianceError("ratio_threshold must be > 0");
  const uint32_t spq = profile.inputs_per_query;
  RunSettings s = FixedCount(settings, n_queries);
  s.scenario = Scenario::kSingleStream;
  s.store_size = std::max(s.store_size, spq * kCachingDistinctWindow);

  Schedule unique(n_queries, std::vector<uint32_t>(spq));
  for (uint64_t q = 0; q < n_queries; ++q) {
    for (uint32_t j = 0; j < spq; ++j) {
      unique[q][j] = static_cast<uint32_t>((q * spq + j) % s.store_size);
    }
  }
  Schedule repeated(n_queries, std::vector<uint32_t>(spq, 0));

  RunOptions options;
  options.schedule = std::move(unique);
  const RunLog a = engine.RunSingleStream(sut, s, profile, options);
  RequireSuccess(a, "caching (unique)");
  options.schedule = std::move(repeated);
  const RunLog b = engine.RunSingleStream(sut, s, profile, options);
  RequireSuccess(b, "caching (repeated)");

  const int64_t p50_a = MedianLatency(a);
  const int64_t p50_b = MedianLatency(b);

  ComplianceVerdict v;
  v.test_name = std::string(kCachingTest);
  v.evidence["queries"] = static_cast<double>(n_queries);
  v.evidence["p50_unique_ns"] = static_cast<double>(p50_a);
  v.evidence["p50_repeated_ns"] = static_cast<double>(p50_b);
  v.evidence["ratio"] = p50_a > 0 ? static_cast<double>(p50_b) / p50_a : 1.0;
  v.evidence["ratio_threshold"] = ratio_threshold;
  v.passed = *RecomputeVerdict(v);
  return v;
}

bool RetainQuery(uint64_t seed, uint64_t query_id, double sample_fraction) {
  if (sample_fraction >= 1) return true;
  SplitMix64 rng(SplitMix64::Finalize(seed ^ kRetainSalt) ^
                 SplitMix64::Finalize(query_id + 1));
  return rng.NextUnit() < sample_fraction;
}

ComplianceVerdict TestAccuracyInPerf(ScenarioEngine& engine, SystemUnderTest& sut,
                                     const RunSettings& settings,
                                     const BenchmarkProfile& profile,
                                     double sample_fraction) {
  if (!(sample_fraction > 0 && sample_fraction <= 1)) {
    throw ComplianceError("sample_fraction must be in (0, 1]");
  }
  RunSettings perf = settings;
  perf.mode = Mode::kPerformance;
  const uint64_t seed = settings.seed;
  // The logged digest covers every response byte, so nothing is retained.
  const RunLog perf_log = engine.Run(sut, perf, profile);
  RequireSuccess(perf_log, "performance");

  Schedule retained;
  std::vector<uint64_t> perf_digests;
  for (const auto& e : perf_log.trace) {
    if (!RetainQuery(seed, e.query.query_id, sample_fraction)) continue;
    retained.push_back(e.query.sample_indices);
    perf_digests.push_back(e.completion->response_digest);
  }
  if (retained.empty()) {
    throw ComplianceError("no queries retained; raise sample_fraction or the run length");
  }

  RunSettings acc = settings;
  acc.mode = Mode::kAccuracy;
  RunOptions acc_options;
  acc_options.schedule = retained;
  const RunLog acc_log = engine.RunAccuracy(sut, acc, profile, acc_options);
  RequireSuccess(acc_log, "accuracy");

  uint64_t mismatches = 0;
  for (size_t i = 0; i < perf_digests.size(); ++i) {
    if (acc_log.trace[i].completion->response_digest != perf_digests[i]) ++mismatches;
  }

  ComplianceVerdict v;
  v.test_name = std::string(kAccuracyInPerfTest);
  v.evidence["queries"] = static_cast<double>(perf_log.trace.size());
  v.evidence["retained"] = static_cast<double>(retained.size());
  v.evidence["mismatches"] = static_cast<double>(mismatches);
  v.evidence["sample_fraction"] = sample_fraction;
  v.passed = *RecomputeVerdict(v);
  return v;
}

std::optional<bool> RecomputeVerdict(const ComplianceVerdict& verdict) {
  if (verdict.test_name == kDeterminismTest) {
    auto idx = Get(verdict, "index_mismatches");
    auto ord = Get(verdict, "order_mismatches");
    if (!idx || !ord) return std::nullopt;
    return *idx == 0 && *ord == 0;
  }
  if (verdict.test_name == kCachingTest) {
    auto a = Get(verdict, "p50_unique_ns");
    auto b = Get(verdict, "p50_repeated_ns");
    auto thr = Get(verdict, "ratio_threshold");
    if (!a || !b || !thr) return std::nullopt;
    return *b >= *thr * *a;
  }
  if (verdict.test_name == kAccuracyInPerfTest) {
    auto retained = Get(verdict, "retained");
    auto mismatches = Get(verdict, "mismatches");
    if (!retained || !mismatches) return std::nullopt;
    return *retained > 0 && *mismatches == 0;
  }
  return std::nullopt;
}

}  // namespace rtbench
