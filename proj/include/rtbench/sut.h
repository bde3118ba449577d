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

#ifndef RTBENCH_SUT_H_
#define RTBENCH_SUT_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rtbench/clock.h"
#include "rtbench/profiles.h"
#include "rtbench/sample_store.h"

namespace rtbench {

class SutError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Receives completions from a SUT. Implementations must accept calls from
// any thread, concurrently with IssueQuery on the issuing thread.
class CompletionSink {
 public:
  virtual ~CompletionSink() = default;
  virtual void Complete(uint64_t query_id, std::vector<uint8_t> response) = 0;
  // The SUT can no longer make progress (lost connection, remote error).
  virtual void Fail(std::string message) = 0;
};

struct SutRunInfo {
  Mode mode = Mode::kPerformance;
  Scenario scenario = Scenario::kSingleStream;
  uint64_t store_seed = 0;
  uint32_t store_size = 1;
  uint64_t sample_bytes = 1;
  uint32_t inputs_per_query = 1;
};

struct SutSession {
  SutRunInfo info;
  Clock* clock = nullptr;
  std::shared_ptr<CompletionSink> sink;
  // In-process SUTs read sample bytes from here; remote SUTs regenerate
  // them from info.store_seed.
  std::shared_ptr<SampleStore> store;
};

// The system under test. Per run the harness calls Configure, LoadSamples,
// any number of IssueQuery, Flush, then UnloadSamples. IssueQuery must not
// block on inference; each query is answered with exactly one
// CompletionSink::Complete, possibly from another thread.
class SystemUnderTest {
 public:
  virtual ~SystemUnderTest() = default;

  virtual std::string Name() const = 0;
  virtual void Configure(SutSession session) = 0;
  virtual void LoadSamples(std::span<const uint32_t> indices) = 0;
  virtual void UnloadSamples() = 0;
  // Throws SutError before load or for an index that was not loaded.
  virtual void IssueQuery(uint64_t query_id,
                          std::span<const uint32_t> sample_indices) = 0;
  // Returns once every issued query has been completed.
  virtual void Flush() = 0;
};

enum class SubmissionCategory {
  kHardenedSystem,
  kDevelopmentSystem,
  kEngineeringSample,
};

std::string_view ToString(SubmissionCategory c);
std::optional<SubmissionCategory> ParseCategory(std::string_view s);

struct SutDescriptor {
  std::string name;
  SubmissionCategory category = SubmissionCategory::kDevelopmentSystem;
  bool functional_safety = false;
  bool publicly_available = true;
  bool auditable_closed = true;

  bool operator==(const SutDescriptor&) const = default;
};

// Empty when the flags match what the category requires:
//   hardened:           safety, public, auditable
//   development:        no safety, public, auditable
//   engineering sample: none of the three
std::vector<std::string> CategoryViolations(const SutDescriptor& sut);

}  // namespace rtbench

#endif  // RTBENCH_SUT_H_
