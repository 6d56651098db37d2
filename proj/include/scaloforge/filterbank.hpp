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
#include <span>
#include <vector>

#include <json.hpp>

namespace scaloforge {

// Long-term wavelet scale: constant-Q filters down to 2Q/T_max plus an
// evenly-spaced low-frequency band below it.
struct WaveletScaleParams {
  double f_high = 24000.0;  // Hz
  double f_low = 0.5;       // Hz
  double t_max = 0.341;     // seconds
  int q = 35;               // filters per octave

  void validate() const;
  double boundary_frequency() const noexcept { return 2.0 * q / t_max; }
};

enum class FilterShape : std::uint8_t { gaussian = 0, triangle = 1 };
enum class ScaleKind : std::uint8_t { wavelet = 0, mel = 1 };

struct FilterBank {
  ScaleKind scale_kind = ScaleKind::wavelet;
  FilterShape shape = FilterShape::gaussian;
  std::vector<double> centers;     // Hz, strictly increasing
  std::vector<double> bandwidths;  // Hz, positive
  int constant_q_count = 0;        // K (N_mel for the Mel scale)
  int evenly_spaced_count = 0;     // P (0 for the Mel scale)
  // Triangle feet of the first and last filter.
  double lower_edge = 0.0;
  double upper_edge = 0.0;
  nlohmann::json params;

  std::size_t size() const noexcept { return centers.size(); }
};

// Closed-form value of 1 + Q log2(T_max f_h / 2Q) before flooring.
double constant_q_count_real(const WaveletScaleParams& params);
int count_constant_q(const WaveletScaleParams& params);
int count_evenly_spaced(int q);

FilterBank build_wavelet_scale(const WaveletScaleParams& params,
                               FilterShape shape = FilterShape::gaussian);

// m(f) = 781 log2(1 + f/700) and its inverse.
double hz_to_mel(double hz) noexcept;
double mel_to_hz(double mel) noexcept;

FilterBank build_mel_scale(double f_low, double f_high, int n_mel);

// Filter gains sampled on the non-negative FFT bins. Rows are stored as
// contiguous runs of non-zero weights; everything outside a run is zero.
class DigitalFilterMatrix {
 public:
  struct Row {
    std::size_t first_bin = 0;
    std::vector<double> weights;
  };

  DigitalFilterMatrix() = default;
  DigitalFilterMatrix(std::vector<Row> rows, std::size_t fft_size, int sample_rate);

  std::size_t num_filters() const noexcept { return rows_.size(); }
  std::size_t num_bins() const noexcept { return fft_size_ / 2 + 1; }
  std::size_t fft_size() const noexcept { return fft_size_; }
  int sample_rate() const noexcept { return sample_rate_; }
  double bin_frequency(std::size_t bin) const noexcept {
    return static_cast<double>(bin) * sample_rate_ / static_cast<double>(fft_size_);
  }

  const Row& row(std::size_t j) const { return rows_.at(j); }
  double weight(std::size_t j, std::size_t bin) const;
  // Row-major J x B copy.
  std::vector<double> dense() const;

 private:
  std::vector<Row> rows_;
  std::size_t fft_size_ = 0;
  int sample_rate_ = 0;
};

// Gaussian weights below this are stored as exact zeros.
inline constexpr double kGaussianCutoff = 1e-8;
// A row whose peak weight falls below this is rejected as degenerate.
inline constexpr double kDegenerateRowPeak = 1e-6;

DigitalFilterMatrix digitize(const FilterBank& bank, std::size_t fft_size, int sample_rate);

nlohmann::json to_json(const FilterBank& bank);
FilterBank filterbank_from_json(const nlohmann::json& j);

}  // namespace scaloforge
