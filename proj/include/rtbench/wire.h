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

#ifndef RTBENCH_WIRE_H_
#define RTBENCH_WIRE_H_

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "rtbench/profiles.h"

namespace rtbench::wire {

// Frame: u32 LE length (type byte + payload), u8 type, payload.
// All integers little-endian. docs/wire_format.md has the byte tables.
inline constexpr uint32_t kMaxFrameLength = 64u << 20;
inline constexpr uint16_t kProtocolVersion = 1;
inline constexpr char kMagic[4] = {'R', 'T', 'B', 'A'};

enum class MessageType : uint8_t {
  kHello = 0x01,
  kConfig = 0x02,
  kLoad = 0x03,
  kLoaded = 0x04,
  kIssue = 0x05,
  kComplete = 0x06,
  kFlush = 0x07,
  kBye = 0x08,
};

// magic "RTBA", u16 version
struct Hello {
  uint16_t version = kProtocolVersion;
  bool operator==(const Hello&) const = default;
};

// u8 mode, u8 scenario, u64 store_seed, u32 store_size, u64 sample_bytes,
// u32 inputs_per_query
struct Config {
  Mode mode = Mode::kPerformance;
  Scenario scenario = Scenario::kSingleStream;
  uint64_t store_seed = 0;
  uint32_t store_size = 1;
  uint64_t sample_bytes = 1;
  uint32_t inputs_per_query = 1;
  bool operator==(const Config&) const = default;
};

// u32 n, n x u32 index
struct Load {
  std::vector<uint32_t> indices;
  bool operator==(const Load&) const = default;
};

// empty
struct Loaded {
  bool operator==(const Loaded&) const = default;
};

// u64 query_id, u32 n, n x u32 index
struct Issue {
  uint64_t query_id = 0;
  std::vector<uint32_t> indices;
  bool operator==(const Issue&) const = default;
};

// u64 query_id, u32 blob length, blob
struct Complete {
  uint64_t query_id = 0;
  std::vector<uint8_t> blob;
  bool operator==(const Complete&) const = default;
};

// empty; the SUT echoes it once every outstanding COMPLETE has been sent
struct Flush {
  bool operator==(const Flush&) const = default;
};

// optional UTF-8 diagnostic; non-empty from the SUT side means an error
struct Bye {
  std::string reason;
  bool operator==(const Bye&) const = default;
};

using Message =
    std::variant<Hello, Config, Load, Loaded, Issue, Complete, Flush, Bye>;

MessageType TypeOf(const Message& m);
const char* NameOf(MessageType t);

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<uint8_t> EncodeFrame(const Message& m);
void AppendFrame(const Message& m, std::vector<uint8_t>& out);

// Decodes the first frame in `bytes`. Returns nullopt if the buffer does not
// yet hold a whole frame; throws ProtocolError for malformed frames.
struct Decoded {
  Message message;
  size_t consumed;
};
std::optional<Decoded> DecodeFrame(std::span<const uint8_t> bytes);

// Incremental decoder for a byte stream read in arbitrary chunks.
class FrameDecoder {
 public:
  void Feed(std::span<const uint8_t> chunk);
  // Next complete message, or nullopt when more bytes are needed.
  std::optional<Message> Next();
  size_t buffered() const { return buffer_.size() - offset_; }

 private:
  std::vector<uint8_t> buffer_;
  size_t offset_ = 0;
};

}  // namespace rtbench::wire

#endif  // RTBENCH_WIRE_H_
