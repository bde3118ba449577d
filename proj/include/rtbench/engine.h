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

#ifndef RTBENCH_ENGINE_H_
#define RTBENCH_ENGINE_H_

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "rtbench/clock.h"
#include "rtbench/profiles.h"
#include "rtbench/run_types.h"
#include "rtbench/splitmix.h"
#include "rtbench/sut.h"

namespace rtbench {

using Schedule = std::vector<std::vector<uint32_t>>;

// Infinite stream of query sample lists: each index is the next splitmix64
// output of `seed` modulo store_size.
class ScheduleStream {
 public:
  // Throws std::invalid_argument for a zero store_size or samples_per_query.
  ScheduleStream(uint64_t seed, uint32_t store_size, uint32_t samples_per_query);
  std::vector<uint32_t> Next();

 private:
  SplitMix64 rng_;
  uint32_t store_size_;
  uint32_t samples_per_query_;
};

// First n_queries lists of ScheduleStream(seed, ...).
Schedule GenerateSchedule(uint64_t seed, uint32_t store_size, uint64_t n_queries,
                          uint32_t samples_per_query);

// Consecutive indices wrapping at store_size; every sample appears at least
// once in ceil(store_size / samples_per_query) queries.
Schedule AccuracySchedule(uint32_t store_size, uint32_t samples_per_query);

// round(i * 1e9 / rate_hz), computed from i alone so there is no drift.
int64_t ConstantStreamOffsetNs(uint64_t i, double rate_hz);

// max(ceil(min_duration_ns * rate_hz / 1e9), min_query_count).
uint64_t ConstantStreamQueryCount(int64_t min_duration_ns,
                                  uint64_t min_query_count, double rate_hz);

struct RunOptions {
  // Explicit per-query sample lists. Replaces the seeded schedule and the
  // stop rule: exactly schedule->size() queries are issued.
  std::optional<Schedule> schedule;
  // Performance mode: keep response bytes for queries where this is true.
  std::function<bool(uint64_t query_id)> retain_response;
};

// Drives one SUT through one run at a time:
//   configure -> load samples -> issue queries -> flush -> unload.
// Single Stream issues the next query once the previous one completes.
// Constant Stream issues query i at t0 + round(i * 1e9 / R) whether or not
// earlier queries are done. Accuracy runs cover the whole sample store
// closed-loop and retain every response.
class ScenarioEngine {
 public:
  explicit ScenarioEngine(Clock& clock) : clock_(clock) {}

  // Dispatches on settings.mode, then settings.scenario. Throws ConfigError
  // when Validate() reports violations; SUT failures during the run are
  // recorded in RunLog::failure instead.
  RunLog Run(SystemUnderTest& sut, const RunSettings& settings,
             const BenchmarkProfile& profile, const RunOptions& options = {});

  RunLog RunSingleStream(SystemUnderTest& sut, RunSettings settings,
                         const BenchmarkProfile& profile,
                         const RunOptions& options = {});
  RunLog RunConstantStream(SystemUnderTest& sut, RunSettings settings,
                           const BenchmarkProfile& profile,
                           const RunOptions& options = {});
  RunLog RunAccuracy(SystemUnderTest& sut, RunSettings settings,
                     const BenchmarkProfile& profile,
                     const RunOptions& options = {});

  Clock& clock() { return clock_; }

 private:
  Clock& clock_;
  std::atomic<bool> running_{false};
};

}  // namespace rtbench

#endif  // RTBENCH_ENGINE_H_
