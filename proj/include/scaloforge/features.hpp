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
#include <vector>

#include <json.hpp>

#include "scaloforge/filterbank.hpp"
#include "scaloforge/kernels.hpp"
#include "scaloforge/matrix.hpp"
#include "scaloforge/signal_io.hpp"

namespace scaloforge {

enum class WindowFunction : std::uint8_t { hann = 0 };

struct StftConfig {
  double window = 0.512;  // seconds
  double shift = 0.171;   // seconds
  std::size_t fft_size = 0;  // 0 selects the next power of two >= window
  WindowFunction window_function = WindowFunction::hann;

  std::size_t window_samples(int rate) const;
  std::size_t shift_samples(int rate) const;
  std::size_t resolved_fft_size(int rate) const;
  // floor(duration / shift), computed in samples.
  std::size_t frame_count(std::size_t num_samples, int rate) const;
  void validate(int rate) const;
};

std::size_t next_power_of_two(std::size_t n) noexcept;
// Periodic Hann window of the given length.
std::vector<double> hann_window(std::size_t length);

struct Spectrogram {
  std::size_t frames = 0;
  std::size_t bins = 0;
  std::vector<double> magnitudes;  // frames x bins
  std::vector<double> frame_times;  // frame start, seconds
  StftConfig config;
  int sample_rate = 0;

  double at(std::size_t t, std::size_t b) const { return magnitudes[t * bins + b]; }
};

Spectrogram stft_magnitude(std::span<const double> signal, int rate, const StftConfig& config,
                           Exec exec = Exec::parallel);

// energy(t, j) = sum_b w(j, b) |X(t, b)|^2, returned as frames x filters.
Matrix apply_filterbank(const Spectrogram& spec, const DigitalFilterMatrix& filters,
                        Exec exec = Exec::parallel);

inline constexpr double kLogFloor = 1e-10;
Matrix log_compress(Matrix energies);

// Regression deltas with the given half-window; edge frames are replicated.
Matrix regression_deltas(const Matrix& frames_by_dim, int half_window = 2);

enum class FeatureKind : std::uint8_t { scalogram = 0, fbank = 1, fbank_long = 2, synthetic = 3 };

std::string_view to_string(FeatureKind kind) noexcept;
FeatureKind parse_feature_kind(std::string_view text);

// frames x channels x filters, stored frame-major then channel then filter.
struct FeatureMap {
  std::size_t frames = 0;
  std::size_t channels = 0;
  std::size_t filters = 0;
  std::vector<double> data;
  FeatureKind kind = FeatureKind::scalogram;
  ChannelMode channel_mode = ChannelMode::left_right;
  bool normalized = false;
  std::uint64_t fingerprint = 0;

  FeatureMap() = default;
  FeatureMap(std::size_t l, std::size_t c, std::size_t n)
      : frames(l), channels(c), filters(n), data(l * c * n, 0.0) {}

  std::size_t frame_size() const noexcept { return channels * filters; }
  double& at(std::size_t t, std::size_t c, std::size_t n) {
    return data[(t * channels + c) * filters + n];
  }
  double at(std::size_t t, std::size_t c, std::size_t n) const {
    return data[(t * channels + c) * filters + n];
  }
  std::span<const double> frame(std::size_t t) const {
    return {data.data() + t * frame_size(), frame_size()};
  }
};

struct FeatureConfig {
  FeatureKind kind = FeatureKind::scalogram;
  StftConfig stft;
  WaveletScaleParams wavelet;  // scalogram only
  int n_mel = 128;             // Mel kinds only
  double mel_f_low = 0.0;
  double mel_f_high = 0.0;  // 0 selects Nyquist
  bool deltas = false;
  int delta_half_window = 2;

  // 512 ms / 171 ms, f_h 24 kHz, f_l 0.5 Hz, T_max 341 ms, Q 35.
  static FeatureConfig scalogram();
  // 40 ms / 20 ms, 128 Mel filters over [0, Nyquist].
  static FeatureConfig fbank(bool with_deltas);
  // Long-window Mel bank sized to match the scalogram (290 filters).
  static FeatureConfig fbank_long();

  std::string canonical() const;
  std::uint64_t fingerprint() const;
};

// Holds the digitized filter matrix for one sample rate; shared read-only
// across extraction workers.
class FeatureExtractor {
 public:
  FeatureExtractor(FeatureConfig config, int sample_rate);

  const FeatureConfig& config() const noexcept { return config_; }
  const FilterBank& bank() const noexcept { return bank_; }
  const DigitalFilterMatrix& filters() const noexcept { return filters_; }
  int sample_rate() const noexcept { return sample_rate_; }
  std::size_t output_channels() const noexcept { return config_.deltas ? 6 : 2; }

  // Log filter energies of one mono signal, frames x filters.
  Matrix log_energies(std::span<const double> signal, Exec exec = Exec::parallel) const;
  FeatureMap extract(const AudioClip& clip, ChannelMode mode, Exec exec = Exec::parallel) const;

 private:
  FeatureConfig config_;
  int sample_rate_;
  FilterBank bank_;
  DigitalFilterMatrix filters_;
};

FeatureMap extract_scalogram(const AudioClip& clip, ChannelMode mode, const WaveletScaleParams& params,
                             const StftConfig& stft, Exec exec = Exec::parallel);
FeatureMap extract_fbank(const AudioClip& clip, ChannelMode mode, bool with_deltas,
                         Exec exec = Exec::parallel);
FeatureMap extract_longterm_fbank(const AudioClip& clip, ChannelMode mode, Exec exec = Exec::parallel);

inline constexpr double kStdFloor = 1e-6;

struct NormStats {
  std::size_t channels = 0;
  std::size_t filters = 0;
  std::vector<double> mean;  // channels x filters
  std::vector<double> std;   // channels x filters, floored at kStdFloor
  std::string corpus_id;
};

NormStats fit_normalization(std::span<const FeatureMap> corpus, std::string corpus_id = {});
FeatureMap apply_normalization(const FeatureMap& map, const NormStats& stats);

nlohmann::json to_json(const NormStats& stats);
NormStats norm_stats_from_json(const nlohmann::json& j);

// Binary feature file: "SCLF", u16 version, u8 kind, u32 L, u32 c, u32 n,
// f32 payload (frame, channel, filter order), CRC32 of everything before it.
// All integers little-endian. The kind byte keeps the kind in its low nibble;
// bit 6 marks ave-diff channels and bit 7 marks normalized data.
inline constexpr std::uint16_t kFeatureFormatVersion = 1;
std::vector<std::uint8_t> encode_features(const FeatureMap& map);
FeatureMap decode_features(std::span<const std::uint8_t> bytes);
void save_features(const FeatureMap& map, const std::filesystem::path& path);
FeatureMap load_features(const std::filesystem::path& path);

// Rounds every value to the nearest float, the precision of the file format.
void quantize_to_float(FeatureMap& map);

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) noexcept;
std::uint64_t fnv1a64(std::string_view text) noexcept;

}  // namespace scaloforge
