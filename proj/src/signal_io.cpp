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


#include "scaloforge/signal_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <sstream>
#include <unordered_set>

#include "scaloforge/error.hpp"
#include "scaloforge/random.hpp"

namespace scaloforge {
namespace {

std::uint16_t read_u16(std::span<const std::uint8_t> b, std::size_t off) {
  return static_cast<std::uint16_t>(b[off] | (b[off + 1] << 8));
}

std::uint32_t read_u32(std::span<const std::uint8_t> b, std::size_t off) {
  return static_cast<std::uint32_t>(b[off]) | (static_cast<std::uint32_t>(b[off + 1]) << 8) |
         (static_cast<std::uint32_t>(b[off + 2]) << 16) |
         (static_cast<std::uint32_t>(b[off + 3]) << 24);
}

bool tag_is(std::span<const std::uint8_t> b, std::size_t off, std::string_view tag) {
  return std::equal(tag.begin(), tag.end(), b.begin() + static_cast<std::ptrdiff_t>(off));
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_tag(std::vector<std::uint8_t>& out, std::string_view tag) {
  out.insert(out.end(), tag.begin(), tag.end());
}

std::vector<std::string_view> split_on(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_number(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    fail(ErrorCode::invalid_argument, "cannot parse " + std::string(what) + " from '" +
                                          std::string(text) + "'");
  }
  return value;
}

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

void AudioClip::validate() const {
  if (sample_rate <= 0) fail(ErrorCode::invalid_argument, "sample rate must be positive");
  for (const auto& ch : channels) {
    if (ch.size() != num_frames()) fail(ErrorCode::shape, "channels differ in length");
    for (double v : ch) {
      if (!std::isfinite(v)) fail(ErrorCode::invalid_argument, "non-finite sample");
    }
  }
}

ChannelMode parse_channel_mode(std::string_view text) {
  if (text == "left-right") return ChannelMode::left_right;
  if (text == "ave-diff") return ChannelMode::ave_diff;
  fail(ErrorCode::invalid_argument, "unknown channel mode '" + std::string(text) + "'");
}

std::string_view to_string(ChannelMode mode) noexcept {
  return mode == ChannelMode::ave_diff ? "ave-diff" : "left-right";
}

AudioClip decode_wav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || !tag_is(bytes, 0, "RIFF") || !tag_is(bytes, 8, "WAVE")) {
    fail(ErrorCode::format, "not a RIFF/WAVE container");
  }
  bool have_fmt = false;
  std::uint16_t channels = 0;
  std::uint16_t bits = 0;
  std::uint32_t rate = 0;
  std::size_t off = 12;
  while (off + 8 <= bytes.size()) {
    const std::uint32_t size = read_u32(bytes, off + 4);
    const std::size_t body = off + 8;
    if (tag_is(bytes, off, "fmt ")) {
      if (size < 16) fail(ErrorCode::format, "fmt chunk shorter than 16 bytes");
      if (body + size > bytes.size()) {
        fail(ErrorCode::truncation, "fmt chunk: expected " + std::to_string(size) +
                                        " bytes, found " + std::to_string(bytes.size() - body));
      }
      std::uint16_t format = read_u16(bytes, body);
      channels = read_u16(bytes, body + 2);
      rate = read_u32(bytes, body + 4);
      bits = read_u16(bytes, body + 14);
      if (format == 0xFFFE) {
        if (size < 40) fail(ErrorCode::format, "extensible fmt chunk shorter than 40 bytes");
        format = read_u16(bytes, body + 24);  // first two bytes of the sub-format GUID
      }
      if (format != 1) {
        fail(ErrorCode::unsupported, "codec " + std::to_string(format) + " is not integer PCM");
      }
      if (bits != 16 && bits != 24) {
        fail(ErrorCode::unsupported, std::to_string(bits) + "-bit samples");
      }
      if (channels != 1 && channels != 2) {
        fail(ErrorCode::unsupported, std::to_string(channels) + " channels");
      }
      if (rate == 0) fail(ErrorCode::format, "zero sample rate");
      have_fmt = true;
    } else if (tag_is(bytes, off, "data")) {
      if (!have_fmt) fail(ErrorCode::format, "data chunk precedes fmt chunk");
      const std::size_t available = bytes.size() - body;
      if (size > available) {
        fail(ErrorCode::truncation, "data chunk: expected " + std::to_string(size) +
                                        " bytes, found " + std::to_string(available));
      }
      const std::size_t width = bits / 8;
      const std::size_t block = width * channels;
      if (size % block != 0) {
        fail(ErrorCode::truncation, "data chunk: expected a multiple of " +
                                        std::to_string(block) + " bytes, found " +
                                        std::to_string(size));
      }
      const std::size_t frames = size / block;
      AudioClip clip;
      clip.sample_rate = static_cast<int>(rate);
      clip.channels.assign(channels, std::vector<double>(frames));
      const double scale = 1.0 / static_cast<double>(1 << (bits - 1));
      const std::uint8_t* p = bytes.data() + body;
      for (std::size_t f = 0; f < frames; ++f) {
        for (std::size_t c = 0; c < channels; ++c, p += width) {
          std::int32_t v;
          if (bits == 16) {
            v = static_cast<std::int16_t>(p[0] | (p[1] << 8));
          } else {
            // Sign-extend the 24-bit value into 32 bits.
            std::uint32_t u = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                              (static_cast<std::uint32_t>(p[2]) << 16);
            if (u & 0x800000U) u |= 0xFF000000U;
            v = static_cast<std::int32_t>(u);
          }
          clip.channels[c][f] = v * scale;
        }
      }
      return clip;
    }
    off = body + size + (size & 1U);
  }
  fail(ErrorCode::format, have_fmt ? "missing data chunk" : "missing fmt chunk");
}

AudioClip read_wav(const std::filesystem::path& path) { return decode_wav(slurp(path)); }

std::vector<std::uint8_t> encode_wav(const AudioClip& clip, int bits_per_sample) {
  if (bits_per_sample != 16 && bits_per_sample != 24) {
    fail(ErrorCode::unsupported, std::to_string(bits_per_sample) + "-bit samples");
  }
  clip.validate();
  const std::uint16_t channels = static_cast<std::uint16_t>(clip.num_channels());
  const std::uint16_t width = static_cast<std::uint16_t>(bits_per_sample / 8);
  const std::uint32_t data_size = static_cast<std::uint32_t>(clip.num_frames() * channels * width);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_size);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, 1);
  put_u16(out, channels);
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate) * channels * width);
  put_u16(out, static_cast<std::uint16_t>(channels * width));
  put_u16(out, static_cast<std::uint16_t>(bits_per_sample));
  put_tag(out, "data");
  put_u32(out, data_size);
  const double full_scale = static_cast<double>(1 << (bits_per_sample - 1));
  const double lo = -full_scale;
  const double hi = full_scale - 1.0;
  for (std::size_t f = 0; f < clip.num_frames(); ++f) {
    for (std::size_t c = 0; c < channels; ++c) {
      const double scaled = std::clamp(std::round(clip.channels[c][f] * full_scale), lo, hi);
      const auto v = static_cast<std::uint32_t>(static_cast<std::int32_t>(scaled));
      for (int i = 0; i < width; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
    }
  }
  return out;
}

void write_wav(const std::filesystem::path& path, const AudioClip& clip, int bits_per_sample) {
  const auto bytes = encode_wav(clip, bits_per_sample);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

ChannelPair derive_channels(const AudioClip& clip, ChannelMode mode) {
  if (clip.num_channels() != 2) {
    fail(ErrorCode::channel_count,
         "expected 2 channels, found " + std::to_string(clip.num_channels()));
  }
  const auto& left = clip.channels[0];
  const auto& right = clip.channels[1];
  ChannelPair pair;
  pair.mode = mode;
  if (mode == ChannelMode::left_right) {
    pair.a = left;
    pair.b = right;
    return pair;
  }
  pair.a.resize(left.size());
  pair.b.resize(left.size());
  for (std::size_t i = 0; i < left.size(); ++i) {
    pair.a[i] = 0.5 * (left[i] + right[i]);
    pair.b[i] = 0.5 * (left[i] - right[i]);
  }
  return pair;
}

AudioClip synth_signal(const SynthSpec& spec) {
  if (spec.rate <= 0) fail(ErrorCode::invalid_argument, "sample rate must be positive");
  if (spec.duration < 0.0) fail(ErrorCode::invalid_argument, "negative duration");
  if (spec.channels < 1) fail(ErrorCode::invalid_argument, "at least one channel required");
  const double nyquist = spec.rate / 2.0;
  if ((spec.kind == SignalKind::tone || spec.kind == SignalKind::chirp) && spec.freq >= nyquist) {
    fail(ErrorCode::aliasing, "frequency " + std::to_string(spec.freq) + " Hz is at or above Nyquist");
  }
  if (spec.kind == SignalKind::chirp && spec.freq_end >= nyquist) {
    fail(ErrorCode::aliasing,
         "end frequency " + std::to_string(spec.freq_end) + " Hz is at or above Nyquist");
  }
  const auto frames = static_cast<std::size_t>(std::llround(spec.duration * spec.rate));
  AudioClip clip;
  clip.sample_rate = spec.rate;
  clip.channels.assign(static_cast<std::size_t>(spec.channels), std::vector<double>(frames, 0.0));
  const double two_pi = 2.0 * std::numbers::pi;
  switch (spec.kind) {
    case SignalKind::silence:
      break;
    case SignalKind::tone:
      for (std::size_t i = 0; i < frames; ++i) {
        const double t = static_cast<double>(i) / spec.rate;
        const double v = spec.amplitude * std::sin(two_pi * spec.freq * t);
        for (auto& ch : clip.channels) ch[i] = v;
      }
      break;
    case SignalKind::chirp: {
      const double slope = spec.duration > 0.0 ? (spec.freq_end - spec.freq) / spec.duration : 0.0;
      for (std::size_t i = 0; i < frames; ++i) {
        const double t = static_cast<double>(i) / spec.rate;
        const double v = spec.amplitude * std::sin(two_pi * (spec.freq * t + 0.5 * slope * t * t));
        for (auto& ch : clip.channels) ch[i] = v;
      }
      break;
    }
    case SignalKind::white_noise: {
      Rng rng(spec.seed);
      for (std::size_t i = 0; i < frames; ++i) {
        for (auto& ch : clip.channels) ch[i] = spec.amplitude * rng.uniform(-1.0, 1.0);
      }
      break;
    }
  }
  return clip;
}

bool is_synth_source(std::string_view source) noexcept { return source.starts_with("synth:"); }

SynthSpec parse_synth_source(std::string_view source) {
  if (!is_synth_source(source)) {
    fail(ErrorCode::invalid_argument, "not a synth source: '" + std::string(source) + "'");
  }
  const auto parts = split_on(source.substr(6), ':');
  if (parts.size() != 5) {
    fail(ErrorCode::invalid_argument,
         "synth source needs kind:freq:duration:rate:seed, got '" + std::string(source) + "'");
  }
  SynthSpec spec;
  spec.channels = 2;
  const std::string_view kind = parts[0];
  if (kind == "tone") {
    spec.kind = SignalKind::tone;
  } else if (kind == "chirp") {
    spec.kind = SignalKind::chirp;
  } else if (kind == "white-noise") {
    spec.kind = SignalKind::white_noise;
  } else if (kind == "silence") {
    spec.kind = SignalKind::silence;
  } else {
    fail(ErrorCode::invalid_argument, "unknown synth kind '" + std::string(kind) + "'");
  }
  const auto dash = parts[1].find('-');
  if (dash != std::string_view::npos) {
    spec.freq = parse_number(parts[1].substr(0, dash), "frequency");
    spec.freq_end = parse_number(parts[1].substr(dash + 1), "end frequency");
  } else {
    spec.freq = parse_number(parts[1], "frequency");
    spec.freq_end = spec.freq;
  }
  spec.duration = parse_number(parts[2], "duration");
  spec.rate = static_cast<int>(parse_number(parts[3], "rate"));
  spec.seed = static_cast<std::uint64_t>(parse_number(parts[4], "seed"));
  return spec;
}

AudioClip load_source(std::string_view source, const std::filesystem::path& base_dir) {
  if (is_synth_source(source)) return synth_signal(parse_synth_source(source));
  std::filesystem::path path(source);
  if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
  return read_wav(path);
}

DatasetManifest parse_manifest(std::string_view text) {
  DatasetManifest manifest;
  std::unordered_set<std::string> ids;
  bool header_seen = false;
  bool has_split = false;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto fields = split_on(line, '\t');
    if (!header_seen) {
      header_seen = true;
      if (fields.size() < 4 || fields[0] != "id" || fields[1] != "source" ||
          fields[2] != "scene_label" || fields[3] != "city_label") {
        fail(ErrorCode::schema,
             "line 1: header must be id, source, scene_label, city_label [, split]");
      }
      if (fields.size() > 5 || (fields.size() == 5 && fields[4] != "split")) {
        fail(ErrorCode::schema, "line 1: unexpected header column");
      }
      has_split = fields.size() == 5;
      continue;
    }
    const std::size_t expected = has_split ? 5 : 4;
    if (fields.size() != expected) {
      fail(ErrorCode::schema, "line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(expected) + " columns, found " +
                                  std::to_string(fields.size()));
    }
    ManifestEntry entry;
    entry.id = std::string(fields[0]);
    entry.source = std::string(fields[1]);
    entry.scene_label = std::string(fields[2]);
    entry.city_label = std::string(fields[3]);
    if (entry.id.empty() || entry.source.empty() || entry.scene_label.empty() || entry.city_label.empty()) {
      fail(ErrorCode::schema, "line " + std::to_string(line_no) + ": empty field");
    }
    if (has_split) {
      if (fields[4] == "train") {
        entry.split = Split::train;
      } else if (fields[4] == "test") {
        entry.split = Split::test;
      } else {
        fail(ErrorCode::schema, "line " + std::to_string(line_no) + ": split must be train or test");
      }
    }
    if (!ids.insert(entry.id).second) {
      fail(ErrorCode::duplicate, "line " + std::to_string(line_no) + ": id '" + entry.id + "'");
    }
    auto index_of = [](std::vector<std::string>& vocab, const std::string& label) {
      const auto it = std::find(vocab.begin(), vocab.end(), label);
      if (it != vocab.end()) return static_cast<int>(it - vocab.begin());
      vocab.push_back(label);
      return static_cast<int>(vocab.size() - 1);
    };
    entry.scene = index_of(manifest.scene_vocabulary, entry.scene_label);
    entry.city = index_of(manifest.city_vocabulary, entry.city_label);
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  auto manifest = parse_manifest(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  manifest.base_dir = path.parent_path();
  return manifest;
}

std::string format_manifest(const DatasetManifest& manifest) {
  std::ostringstream out;
  out << "id\tsource\tscene_label\tcity_label\tsplit\n";
  for (const auto& e : manifest.entries) {
    out << e.id << '\t' << e.source << '\t' << e.scene_label << '\t' << e.city_label << '\t'
        << (e.split == Split::test ? "test" : "train") << '\n';
  }
  return out.str();
}

}  // namespace scaloforge
