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

#ifndef RTBENCH_DIGEST_H_
#define RTBENCH_DIGEST_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace rtbench {

// 64-bit FNV-1a over the response bytes.
uint64_t Digest(std::span<const uint8_t> bytes);

// 16 lowercase hex digits, zero padded.
std::string DigestToHex(uint64_t digest);
std::optional<uint64_t> DigestFromHex(std::string_view hex);

}  // namespace rtbench

#endif  // RTBENCH_DIGEST_H_
