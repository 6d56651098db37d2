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


#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace scaloforge {

// Multi-channel PCM audio with amplitudes in [-1, 1].
struct AudioClip {
  std::vector<std::vector<double>> channels;
  int sample_rate = 0;

  std::size_t num_channels() const noexcept { return channels.size(); }
  std::size_t num_frames() const noexcept { return channels.empty() ? 0 : channels.front().size(); }
  double duration() const noexcept {
    return sample_rate > 0 ? static_cast<double>(num_frames()) / sample_rate : 0.0;
  }
  // Throws on equal-length, positive-rate or finiteness violations.
  void validate() const;
};

enum class ChannelMode : std::uint8_t { left_right = 0, ave_diff = 1 };

ChannelMode parse_channel_mode(std::string_view text);
std::string_view to_string(ChannelMode mode) noexcept;

struct ChannelPair {
  ChannelMode mode = ChannelMode::left_right;
  std::vector<double> a;
  std::vector<double> b;
};

AudioClip decode_wav(std::span<const std::uint8_t> bytes);
AudioClip read_wav(const std::filesystem::path& path);

// 16- or 24-bit PCM writer. Samples are clamped to the representable range.
std::vector<std::uint8_t> encode_wav(const AudioClip& clip, int bits_per_sample);
void write_wav(const std::filesystem::path& path, const AudioClip& clip, int bits_per_sample);

// left-right passes the channels through; ave-diff yields ((L+R)/2, (L-R)/2).
ChannelPair derive_channels(const AudioClip& clip, ChannelMode mode);

enum class SignalKind { tone, chirp, white_noise, silence };

struct SynthSpec {
  SignalKind kind = SignalKind::silence;
  double freq = 0.0;      // tone frequency, or chirp start frequency
  double freq_end = 0.0;  // chirp end frequency (linear sweep)
  double duration = 1.0;  // seconds
  int rate = 48000;
  std::uint64_t seed = 0;
  int channels = 1;
  double amplitude = 1.0;
};

AudioClip synth_signal(const SynthSpec& spec);

// Parses "synth:<kind>:<freq>[-<freq_end>]:<duration>:<rate>:<seed>", the
// manifest notation for generated stereo sources.
SynthSpec parse_synth_source(std::string_view source);
bool is_synth_source(std::string_view source) noexcept;

// Loads either a WAV path or a synth: source.
AudioClip load_source(std::string_view source, const std::filesystem::path& base_dir = {});

enum class Split : std::uint8_t { train = 0, test = 1 };

struct ManifestEntry {
  std::string id;
  std::string source;
  std::string scene_label;
  std::string city_label;
  Split split = Split::train;
  int scene = 0;  // index into scene_vocabulary
  int city = 0;   // index into city_vocabulary
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  std::vector<std::string> scene_vocabulary;
  std::vector<std::string> city_vocabulary;
  std::filesystem::path base_dir;

  std::size_t size() const noexcept { return entries.size(); }
};

// TSV with header "id\tsource\tscene_label\tcity_label" and an optional fifth
// "split" column (train|test, default train).
DatasetManifest parse_manifest(std::string_view text);
DatasetManifest load_manifest(const std::filesystem::path& path);
std::string format_manifest(const DatasetManifest& manifest);

}  // namespace scaloforge
