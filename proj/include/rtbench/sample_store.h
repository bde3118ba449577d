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

#ifndef RTBENCH_SAMPLE_STORE_H_
#define RTBENCH_SAMPLE_STORE_H_

#include <cstdint>
#include <map>
#include <mutex>
#include <span>
#include <stdexcept>
#include <vector>

namespace rtbench {

// Bytes of synthetic sample `index`: the little-endian bytes of successive
// SplitMix64 outputs seeded with SampleSeed(store_seed, index), truncated to
// `sample_bytes`. Out-of-process SUTs regenerate samples from the same rule.
uint64_t SampleSeed(uint64_t store_seed, uint32_t index);
std::vector<uint8_t> SyntheticSample(uint64_t store_seed, uint32_t index,
                                     uint64_t sample_bytes);

class SampleError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Synthetic stand-in for the dataset. Samples are materialized on Load and
// released on Unload so memory use follows the loaded set.
class SampleStore {
 public:
  SampleStore(uint64_t seed, uint32_t size, uint64_t sample_bytes);

  void Load(std::span<const uint32_t> indices);
  void Unload();

  bool IsLoaded(uint32_t index) const;
  // Throws SampleError when `index` is not loaded.
  std::span<const uint8_t> Sample(uint32_t index) const;

  uint64_t seed() const { return seed_; }
  uint32_t size() const { return size_; }
  uint64_t sample_bytes() const { return sample_bytes_; }

 private:
  uint64_t seed_;
  uint32_t size_;
  uint64_t sample_bytes_;
  mutable std::mutex mu_;
  std::map<uint32_t, std::vector<uint8_t>> loaded_;
};

}  // namespace rtbench

#endif  // RTBENCH_SAMPLE_STORE_H_
