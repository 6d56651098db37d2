// Copyright 2026 The Scaloforge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <zlib.h>

#include <bit>
#include <fstream>
#include <iterator>
#include <limits>

#include "scaloforge/error.hpp"
#include "scaloforge/features.hpp"

namespace scaloforge {
namespace {

constexpr std::size_t kHeaderSize = 4 + 2 + 1 + 3 * 4;
constexpr std::uint8_t kAveDiffBit = 0x40;
constexpr std::uint8_t kNormalizedBit = 0x80;

void put_le(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

std::uint64_t get_le(std::span<const std::uint8_t> in, std::size_t off, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(in[off + i]) << (8 * i);
  return v;
}

std::uint32_t crc_of(std::span<const std::uint8_t> bytes) {
  return static_cast<std::uint32_t>(
      crc32(crc32(0L, Z_NULL, 0), bytes.data(), static_cast<uInt>(bytes.size())));
}

}  // namespace

std::vector<std::uint8_t> encode_features(const FeatureMap& map) {
  constexpr auto kMax = std::numeric_limits<std::uint32_t>::max();
  if (map.frames > kMax || map.channels > kMax || map.filters > kMax) {
    fail(ErrorCode::shape, "feature dimensions exceed 32 bits");
  }
  if (map.data.size() != map.frames * map.channels * map.filters) {
    fail(ErrorCode::shape, "feature payload does not match its dimensions");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + 4 * map.data.size() + 4);
  for (char ch : {'S', 'C', 'L', 'F'}) out.push_back(static_cast<std::uint8_t>(ch));
  put_le(out, kFeatureFormatVersion, 2);
  std::uint8_t kind = static_cast<std::uint8_t>(map.kind) & 0x0F;
  if (map.channel_mode == ChannelMode::ave_diff) kind |= kAveDiffBit;
  if (map.normalized) kind |= kNormalizedBit;
  out.push_back(kind);
  put_le(out, map.frames, 4);
  put_le(out, map.channels, 4);
  put_le(out, map.filters, 4);
  for (double v : map.data) put_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)), 4);
  put_le(out, crc_of(out), 4);
  return out;
}

FeatureMap decode_features(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || !(bytes[0] == 'S' && bytes[1] == 'C' && bytes[2] == 'L' && bytes[3] == 'F')) {
    if (bytes.size() < 4) {
      fail(ErrorCode::truncation, "expected at least " + std::to_string(kHeaderSize + 4) +
                                      " bytes, found " + std::to_string(bytes.size()));
    }
    fail(ErrorCode::format, "bad magic, not a feature file");
  }
  if (bytes.size() < kHeaderSize) {
    fail(ErrorCode::truncation, "expected at least " + std::to_string(kHeaderSize + 4) +
                                    " bytes, found " + std::to_string(bytes.size()));
  }
  const auto version = static_cast<std::uint16_t>(get_le(bytes, 4, 2));
  if (version != kFeatureFormatVersion) {
    fail(ErrorCode::unsupported, "feature format version " + std::to_string(version));
  }
  const std::uint8_t kind = bytes[6];
  const std::uint64_t frames = get_le(bytes, 7, 4);
  const std::uint64_t channels = get_le(bytes, 11, 4);
  const std::uint64_t filters = get_le(bytes, 15, 4);
  // Each factor is < 2^32, so the pairwise products checked here cannot wrap.
  const std::uint64_t plane = frames * channels;
  if (filters != 0 && plane > std::numeric_limits<std::uint64_t>::max() / 4 / filters) {
    fail(ErrorCode::format, "dimension overflow");
  }
  const std::uint64_t count = plane * filters;
  const std::uint64_t expected = kHeaderSize + 4 * count + 4;
  if (bytes.size() < expected) {
    fail(ErrorCode::truncation,
         "expected " + std::to_string(expected) + " bytes, found " + std::to_string(bytes.size()));
  }
  if (bytes.size() > expected) {
    fail(ErrorCode::format, "trailing bytes after checksum (" + std::to_string(bytes.size() - expected) + ")");
  }
  const auto stored = static_cast<std::uint32_t>(get_le(bytes, expected - 4, 4));
  if (stored != crc_of(bytes.first(expected - 4))) fail(ErrorCode::integrity, "checksum mismatch");
  if ((kind & 0x0F) > static_cast<std::uint8_t>(FeatureKind::synthetic)) {
    fail(ErrorCode::format, "unknown feature kind " + std::to_string(kind & 0x0F));
  }
  FeatureMap map(frames, channels, filters);
  map.kind = static_cast<FeatureKind>(kind & 0x0F);
  map.channel_mode = (kind & kAveDiffBit) ? ChannelMode::ave_diff : ChannelMode::left_right;
  map.normalized = (kind & kNormalizedBit) != 0;
  for (std::size_t i = 0; i < count; ++i) {
    map.data[i] = std::bit_cast<float>(static_cast<std::uint32_t>(get_le(bytes, kHeaderSize + 4 * i, 4)));
  }
  return map;
}

void save_features(const FeatureMap& map, const std::filesystem::path& path) {
  const auto bytes = encode_features(map);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

FeatureMap load_features(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open " + path.string());
  const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return decode_features(bytes);
}

}  // namespace scaloforge
