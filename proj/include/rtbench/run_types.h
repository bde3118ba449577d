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

#ifndef RTBENCH_RUN_TYPES_H_
#define RTBENCH_RUN_TYPES_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rtbench/profiles.h"

namespace rtbench {

// All times in a run are nanoseconds relative to the run start.
struct Query {
  uint64_t query_id = 0;
  std::vector<uint32_t> sample_indices;
  // Constant Stream only.
  std::optional<int64_t> scheduled_ns;
  int64_t issue_ns = 0;

  bool operator==(const Query&) const = default;
};

struct Completion {
  uint64_t query_id = 0;
  int64_t completion_ns = 0;
  uint64_t response_digest = 0;
  // Empty unless the response was retained (accuracy mode or a marked
  // performance-mode query).
  std::vector<uint8_t> response_bytes;

  bool operator==(const Completion&) const = default;
};

struct TraceEntry {
  Query query;
  std::optional<Completion> completion;

  bool operator==(const TraceEntry&) const = default;
};

struct RunLog {
  std::string profile_name;
  RunSettings settings;
  // Sorted by query_id, gapless from 0.
  std::vector<TraceEntry> trace;
  uint64_t overrun_count = 0;
  int64_t wall_start_ns = 0;
  int64_t wall_end_ns = 0;
  // Set when the SUT failed mid-run; the trace holds what was recorded.
  std::optional<std::string> failure;

  bool valid() const { return !failure.has_value(); }
};

// Latency origin is the schedule when there is one (Constant Stream), the
// issue time otherwise.
inline int64_t LatencyOf(const Query& q, const Completion& c) {
  return c.completion_ns - q.scheduled_ns.value_or(q.issue_ns);
}

// Queries whose completion landed after the next query's scheduled time.
uint64_t CountOverruns(const std::vector<TraceEntry>& trace);

}  // namespace rtbench

#endif  // RTBENCH_RUN_TYPES_H_
