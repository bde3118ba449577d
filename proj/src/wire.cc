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

#include "rtbench/wire.h"

#include <cstdio>
#include <cstring>

namespace rtbench::wire {

namespace {

void PutU8(std::vector<uint8_t>& out, uint8_t v) { out.push_back(v); }

void PutU16(std::vector<uint8_t>& out, uint16_t v) {
  for (int i = 0; i < 2; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void PutU32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void PutU64(std::vector<uint8_t>& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void PutIndices(std::vector<uint8_t>& out, const std::vector<uint32_t>& v) {
  PutU32(out, static_cast<uint32_t>(v.size()));
  for (uint32_t i : v) PutU32(out, i);
}

class Reader {
 public:
  Reader(std::span<const uint8_t> bytes, const char* what)
      : bytes_(bytes), what_(what) {}

  uint64_t Uint(int width) {
    Need(width);
    uint64_t v = 0;
    for (int i = 0; i < width; ++i) {
      v |= static_cast<uint64_t>(bytes_[pos_ + i]) << (8 * i);
    }
    pos_ += width;
    return v;
  }
  uint8_t U8() { return static_cast<uint8_t>(Uint(1)); }
  uint16_t U16() { return static_cast<uint16_t>(Uint(2)); }
  uint32_t U32() { return static_cast<uint32_t>(Uint(4)); }
  uint64_t U64() { return Uint(8); }

  std::span<const uint8_t> Bytes(size_t n) {
    Need(n);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  std::vector<uint32_t> Indices() {
    uint32_t n = U32();
    if (static_cast<uint64_t>(n) * 4 > bytes_.size() - pos_) {
      throw ProtocolError(std::string(what_) + ": index count " +
                          std::to_string(n) + " exceeds payload");
    }
    std::vector<uint32_t> out(n);
    for (auto& i : out) i = U32();
    return out;
  }

  void End() const {
    if (pos_ != bytes_.size()) {
      throw ProtocolError(std::string(what_) + ": " +
                          std::to_string(bytes_.size() - pos_) +
                          " trailing payload bytes");
    }
  }

 private:
  void Need(size_t n) const {
    if (bytes_.size() - pos_ < n) {
      throw ProtocolError(std::string(what_) + ": payload truncated");
    }
  }

  std::span<const uint8_t> bytes_;
  size_t pos_ = 0;
  const char* what_;
};

Message DecodePayload(MessageType type, std::span<const uint8_t> payload) {
  Reader r(payload, NameOf(type));
  switch (type) {
    case MessageType::kHello: {
      auto magic = r.Bytes(4);
      if (std::memcmp(magic.data(), kMagic, 4) != 0) {
        throw ProtocolError("HELLO: bad magic");
      }
      Hello h;
      h.version = r.U16();
      r.End();
      return h;
    }
    case MessageType::kConfig: {
      Config c;
      uint8_t mode = r.U8();
      uint8_t scenario = r.U8();
      if (mode > 1) throw ProtocolError("CONFIG: bad mode " + std::to_string(mode));
      if (scenario > 1) {
        throw ProtocolError("CONFIG: bad scenario " + std::to_string(scenario));
      }
      c.mode = mode == 0 ? Mode::kPerformance : Mode::kAccuracy;
      c.scenario = scenario == 0 ? Scenario::kSingleStream : Scenario::kConstantStream;
      c.store_seed = r.U64();
      c.store_size = r.U32();
      c.sample_bytes = r.U64();
      c.inputs_per_query = r.U32();
      r.End();
      return c;
    }
    case MessageType::kLoad: {
      Load l;
      l.indices = r.Indices();
      r.End();
      return l;
    }
    case MessageType::kLoaded:
      r.End();
      return Loaded{};
    case MessageType::kIssue: {
      Issue i;
      i.query_id = r.U64();
      i.indices = r.Indices();
      r.End();
      return i;
    }
    case MessageType::kComplete: {
      Complete c;
      c.query_id = r.U64();
      uint32_t n = r.U32();
      auto blob = r.Bytes(n);
      c.blob.assign(blob.begin(), blob.end());
      r.End();
      return c;
    }
    case MessageType::kFlush:
      r.End();
      return Flush{};
    case MessageType::kBye: {
      auto text = r.Bytes(payload.size());
      return Bye{std::string(text.begin(), text.end())};
    }
  }
  throw ProtocolError("unknown message type");
}

}  // namespace

MessageType TypeOf(const Message& m) {
  return static_cast<MessageType>(m.index() + 1);
}

const char* NameOf(MessageType t) {
  switch (t) {
    case MessageType::kHello: return "HELLO";
    case MessageType::kConfig: return "CONFIG";
    case MessageType::kLoad: return "LOAD";
    case MessageType::kLoaded: return "LOADED";
    case MessageType::kIssue: return "ISSUE";
    case MessageType::kComplete: return "COMPLETE";
    case MessageType::kFlush: return "FLUSH";
    case MessageType::kBye: return "BYE";
  }
  return "UNKNOWN";
}

void AppendFrame(const Message& m, std::vector<uint8_t>& out) {
  const size_t start = out.size();
  PutU32(out, 0);
  PutU8(out, static_cast<uint8_t>(TypeOf(m)));
  std::visit(
      [&out](const auto& msg) {
        using T = std::decay_t<decltype(msg)>;
        if constexpr (std::is_same_v<T, Hello>) {
          out.insert(out.end(), kMagic, kMagic + 4);
          PutU16(out, msg.version);
        } else if constexpr (std::is_same_v<T, Config>) {
          PutU8(out, msg.mode == Mode::kPerformance ? 0 : 1);
          PutU8(out, msg.scenario == Scenario::kSingleStream ? 0 : 1);
          PutU64(out, msg.store_seed);
          PutU32(out, msg.store_size);
          PutU64(out, msg.sample_bytes);
          PutU32(out, msg.inputs_per_query);
        } else if constexpr (std::is_same_v<T, Load>) {
          PutIndices(out, msg.indices);
        } else if constexpr (std::is_same_v<T, Issue>) {
          PutU64(out, msg.query_id);
          PutIndices(out, msg.indices);
        } else if constexpr (std::is_same_v<T, Complete>) {
          PutU64(out, msg.query_id);
          PutU32(out, static_cast<uint32_t>(msg.blob.size()));
          out.insert(out.end(), msg.blob.begin(), msg.blob.end());
        } else if constexpr (std::is_same_v<T, Bye>) {
          out.insert(out.end(), msg.reason.begin(), msg.reason.end());
        }
      },
      m);
  const size_t length = out.size() - start - 4;
  if (length > kMaxFrameLength) {
    out.resize(start);
    throw ProtocolError("frame of " + std::to_string(length) +
                        " bytes exceeds the 64 MiB cap");
  }
  for (int i = 0; i < 4; ++i) {
    out[start + i] = static_cast<uint8_t>(length >> (8 * i));
  }
}

std::vector<uint8_t> EncodeFrame(const Message& m) {
  std::vector<uint8_t> out;
  AppendFrame(m, out);
  return out;
}

std::optional<Decoded> DecodeFrame(std::span<const uint8_t> bytes) {
  if (bytes.size() < 4) return std::nullopt;
  uint32_t length = 0;
  for (int i = 0; i < 4; ++i) length |= static_cast<uint32_t>(bytes[i]) << (8 * i);
  if (length == 0) throw ProtocolError("frame length 0 has no type byte");
  if (length > kMaxFrameLength) {
    throw ProtocolError("frame length " + std::to_string(length) +
                        " exceeds the 64 MiB cap");
  }
  // The type byte is validated as soon as it arrives.
  if (bytes.size() >= 5) {
    uint8_t type = bytes[4];
    if (type < 0x01 || type > 0x08) {
      char hex[8];
      std::snprintf(hex, sizeof(hex), "0x%02x", type);
      throw ProtocolError(std::string("unknown message type ") + hex);
    }
  }
  if (bytes.size() < 4 + static_cast<size_t>(length)) return std::nullopt;
  auto type = static_cast<MessageType>(bytes[4]);
  Message m = DecodePayload(type, bytes.subspan(5, length - 1));
  return Decoded{std::move(m), 4 + static_cast<size_t>(length)};
}

void FrameDecoder::Feed(std::span<const uint8_t> chunk) {
  if (offset_ > 0 && offset_ == buffer_.size()) {
    buffer_.clear();
    offset_ = 0;
  } else if (offset_ > (1u << 20) && offset_ * 2 > buffer_.size()) {
    buffer_.erase(buffer_.begin(), buffer_.begin() + offset_);
    offset_ = 0;
  }
  buffer_.insert(buffer_.end(), chunk.begin(), chunk.end());
}

std::optional<Message> FrameDecoder::Next() {
  auto decoded = DecodeFrame(std::span<const uint8_t>(buffer_).subspan(offset_));
  if (!decoded) return std::nullopt;
  offset_ += decoded->consumed;
  return std::move(decoded->message);
}

}  // namespace rtbench::wire
