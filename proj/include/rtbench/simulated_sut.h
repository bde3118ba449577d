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

#ifndef RTBENCH_SIMULATED_SUT_H_
#define RTBENCH_SIMULATED_SUT_H_

#include <cstdint>
#include <deque>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "rtbench/splitmix.h"
#include "rtbench/sut.h"

namespace rtbench {

enum class LatencyDistribution { kFixed, kUniform, kLognormal, kBimodal };

// params by distribution:
//   fixed      {latency_ns}
//   uniform    {lo_ns, hi_ns}
//   lognormal  {mu, sigma} of the underlying normal, in ln(ns)
//   bimodal    {first_ns, second_ns, first_weight}
struct SimulatedSutConfig {
  LatencyDistribution distribution = LatencyDistribution::kFixed;
  std::vector<double> params = {10'000'000};
  // Applied when a sample index of the query was seen in the previous
  // `cache_window` queries. 1.0 is an honest SUT.
  double cache_speedup = 1.0;
  uint32_t cache_window = 0;
  uint64_t seed = 0;
  // Response bytes = concatenated sample bytes. Otherwise the first eight
  // bytes of each sample.
  bool echo_responses = false;
};

std::vector<std::string> ConfigViolations(const SimulatedSutConfig& config);

// One latency draw. Deterministic in (config, rng state).
int64_t SimulateLatency(const SimulatedSutConfig& config, SplitMix64& rng);

// Parses the parameter part of `sim:<dist>:<params>[:<option>...]`, e.g.
//   fixed:10ms   uniform:1ms:2ms   lognormal:16.1:0.25   bimodal:5ms:50ms:0.99
// Options: echo, seed=<n>, cache=<speedup>@<window>.
// Durations take ns/us/ms/s suffixes; a bare number is nanoseconds.
SimulatedSutConfig ParseSimSpec(std::string_view spec);
int64_t ParseDurationNs(std::string_view text);

// In-process simulated SUT. Completions are delivered through
// Clock::CallAt, i.e. on the timer thread for a RealClock.
class SimulatedSut final : public SystemUnderTest {
 public:
  explicit SimulatedSut(SimulatedSutConfig config, std::string name = "");
  ~SimulatedSut() override;

  std::string Name() const override { return name_; }
  void Configure(SutSession session) override;
  void LoadSamples(std::span<const uint32_t> indices) override;
  void UnloadSamples() override;
  void IssueQuery(uint64_t query_id,
                  std::span<const uint32_t> sample_indices) override;
  void Flush() override;

  const SimulatedSutConfig& config() const { return config_; }

 private:
  struct Shared;

  bool CacheHit(std::span<const uint32_t> indices) const;

  SimulatedSutConfig config_;
  std::string name_;
  SplitMix64 rng_;
  std::deque<std::vector<uint32_t>> recent_;
  std::shared_ptr<Shared> shared_;
};

}  // namespace rtbench

#endif  // RTBENCH_SIMULATED_SUT_H_
