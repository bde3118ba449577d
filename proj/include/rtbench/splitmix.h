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

#ifndef RTBENCH_SPLITMIX_H_
#define RTBENCH_SPLITMIX_H_

#include <cstdint>

namespace rtbench {

// splitmix64. Output is bit-exact across platforms; schedules, synthetic
// samples and simulated latencies are all derived from it so that logs can
// be diffed between implementations in different languages.
class SplitMix64 {
 public:
  static constexpr uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  explicit constexpr SplitMix64(uint64_t seed) : state_(seed) {}

  constexpr uint64_t Next() {
    state_ += kGamma;
    return Finalize(state_);
  }

  // Uniform in [0, 1) with 53 bits of resolution.
  constexpr double NextUnit() {
    return static_cast<double>(Next() >> 11) * 0x1.0p-53;
  }

  constexpr uint64_t state() const { return state_; }

  static constexpr uint64_t Finalize(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  uint64_t state_;
};

}  // namespace rtbench

#endif  // RTBENCH_SPLITMIX_H_
