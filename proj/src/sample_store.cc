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

#include "rtbench/sample_store.h"

#include <string>

#include "rtbench/splitmix.h"

namespace rtbench {

uint64_t SampleSeed(uint64_t store_seed, uint32_t index) {
  return store_seed ^ SplitMix64::Finalize(static_cast<uint64_t>(index) + 1);
}

std::vector<uint8_t> SyntheticSample(uint64_t store_seed, uint32_t index,
                                     uint64_t sample_bytes) {
  std::vector<uint8_t> out(sample_bytes);
  SplitMix64 gen(SampleSeed(store_seed, index));
  uint64_t word = 0;
  for (uint64_t i = 0; i < sample_bytes; ++i) {
    if (i % 8 == 0) word = gen.Next();
    out[i] = static_cast<uint8_t>(word >> (8 * (i % 8)));
  }
  return out;
}

SampleStore::SampleStore(uint64_t seed, uint32_t size, uint64_t sample_bytes)
    : seed_(seed), size_(size), sample_bytes_(sample_bytes) {
  if (size == 0) throw SampleError("sample store size must be >= 1");
  if (sample_bytes == 0) throw SampleError("sample size must be >= 1");
}

void SampleStore::Load(std::span<const uint32_t> indices) {
  for (uint32_t index : indices) {
    if (index >= size_) {
      throw SampleError("sample index " + std::to_string(index) +
                        " outside store of size " + std::to_string(size_));
    }
  }
  for (uint32_t index : indices) {
    {
      std::lock_guard<std::mutex> lock(mu_);
      if (loaded_.count(index)) continue;
    }
    auto bytes = SyntheticSample(seed_, index, sample_bytes_);
    std::lock_guard<std::mutex> lock(mu_);
    loaded_.emplace(index, std::move(bytes));
  }
}

void SampleStore::Unload() {
  std::lock_guard<std::mutex> lock(mu_);
  loaded_.clear();
}

bool SampleStore::IsLoaded(uint32_t index) const {
  std::lock_guard<std::mutex> lock(mu_);
  return loaded_.count(index) != 0;
}

std::span<const uint8_t> SampleStore::Sample(uint32_t index) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = loaded_.find(index);
  if (it == loaded_.end()) {
    throw SampleError("sample " + std::to_string(index) + " is not loaded");
  }
  // std::map nodes are stable until Unload.
  return it->second;
}

}  // namespace rtbench
