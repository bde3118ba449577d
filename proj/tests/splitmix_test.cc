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

#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "rtbench/digest.h"
#include "rtbench/sample_store.h"
#include "rtbench/splitmix.h"

namespace rtbench {
namespace {

std::vector<uint8_t> Bytes(const std::string& s) { return {s.begin(), s.end()}; }

std::string Hex(std::span<const uint8_t> b) {
  static const char* kDigits = "0123456789abcdef";
  std::string out;
  for (uint8_t c : b) {
    out += kDigits[c >> 4];
    out += kDigits[c & 15];
  }
  return out;
}

TEST(SplitMix64Test, ReferenceOutputs) {
  SplitMix64 zero(0);
  EXPECT_EQ(zero.Next(), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(zero.Next(), 0x6E789E6AA1B965F4ULL);
  EXPECT_EQ(zero.Next(), 0x06C45D188009454FULL);
  SplitMix64 s42(42);
  EXPECT_EQ(s42.Next(), 0xBDD732262FEB6E95ULL);
  EXPECT_EQ(s42.Next(), 0x28EFE333B266F103ULL);
}

TEST(SplitMix64Test, UnitIsHalfOpen) {
  SplitMix64 rng(9);
  for (int i = 0; i < 10000; ++i) {
    double u = rng.NextUnit();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(SplitMix64Test, StateAdvancesByGamma) {
  SplitMix64 rng(5);
  rng.Next();
  rng.Next();
  EXPECT_EQ(rng.state(), 5 + 2 * SplitMix64::kGamma);
}

TEST(DigestTest, Fnv1aVectors) {
  EXPECT_EQ(Digest(Bytes("")), 0xcbf29ce484222325ULL);
  EXPECT_EQ(Digest(Bytes("a")), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(Digest(Bytes("foobar")), 0x85944171f73967e8ULL);
}

TEST(DigestTest, HexRoundTrip) {
  EXPECT_EQ(DigestToHex(0x1ULL), "0000000000000001");
  EXPECT_EQ(DigestToHex(0xaf63dc4c8601ec8cULL), "af63dc4c8601ec8c");
  for (uint64_t v : {0ULL, 1ULL, 0xffffffffffffffffULL, 0x0123456789abcdefULL}) {
    EXPECT_EQ(DigestFromHex(DigestToHex(v)), v);
  }
  EXPECT_FALSE(DigestFromHex("AF63DC4C8601EC8C"));
  EXPECT_FALSE(DigestFromHex("af63dc4c8601ec8"));
  EXPECT_FALSE(DigestFromHex("zf63dc4c8601ec8c"));
}

TEST(SampleStoreTest, SyntheticBytesMatchReference) {
  EXPECT_EQ(Hex(SyntheticSample(0, 0, 12)), "72d7c2dd3080efbf47aaf282");
  EXPECT_EQ(Hex(SyntheticSample(5, 3, 10)), "dc529e3e8341b47201a6");
}

TEST(SampleStoreTest, SamplesDifferByIndexAndSeed) {
  EXPECT_NE(SyntheticSample(0, 0, 32), SyntheticSample(0, 1, 32));
  EXPECT_NE(SyntheticSample(0, 0, 32), SyntheticSample(1, 0, 32));
  auto longer = SyntheticSample(3, 2, 40);
  auto shorter = SyntheticSample(3, 2, 13);
  EXPECT_TRUE(std::equal(shorter.begin(), shorter.end(), longer.begin()));
}

TEST(SampleStoreTest, LoadUnloadLifecycle) {
  SampleStore store(7, 4, 16);
  EXPECT_FALSE(store.IsLoaded(0));
  EXPECT_THROW(store.Sample(0), SampleError);
  std::vector<uint32_t> idx = {0, 2};
  store.Load(idx);
  EXPECT_TRUE(store.IsLoaded(2));
  EXPECT_FALSE(store.IsLoaded(1));
  auto s = store.Sample(2);
  EXPECT_EQ(std::vector<uint8_t>(s.begin(), s.end()), SyntheticSample(7, 2, 16));
  std::vector<uint32_t> bad = {4};
  EXPECT_THROW(store.Load(bad), SampleError);
  store.Unload();
  EXPECT_FALSE(store.IsLoaded(0));
}

}  // namespace
}  // namespace rtbench
