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

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <json.hpp>

#include "scaloforge/features.hpp"
#include "scaloforge/kernels.hpp"

// Brute-force references for the STFT-domain scalogram. Nothing here goes
// through apply_filterbank or the digitized filter matrix.
namespace scaloforge::oracle {

// Closed-form inverse transform of the Gaussian passband
// exp(-(f - center)^2 / (2 bandwidth^2)): a complex exponential at `center`
// under a Gaussian envelope of time-std 1 / (2 pi bandwidth).
struct TimeDomainWavelet {
  std::vector<std::complex<double>> taps;  // taps[i] sits at t = (i - centre) / rate
  std::size_t centre = 0;
  double center_hz = 0.0;
  double bandwidth_hz = 0.0;
  double sigma = 0.0;  // envelope std, seconds
  int sample_rate = 0;

  double support_seconds() const noexcept {
    return static_cast<double>(taps.size()) / sample_rate;
  }
  double peak_magnitude() const noexcept { return std::abs(taps[centre]); }
};

inline constexpr double kTruncationStds = 4.0;

TimeDomainWavelet synthesize_wavelet(double center_hz, double bandwidth_hz, int rate,
                                     double truncation_stds = kTruncationStds);

// Frames whose convolution support lies wholly inside the signal, excluding
// any frame that reaches past the last sample.
struct FrameRange {
  std::size_t first = 0;
  std::size_t last = 0;  // exclusive
  std::size_t size() const noexcept { return last > first ? last - first : 0; }
};

FrameRange interior_frames(std::size_t num_samples, const TimeDomainWavelet& wavelet,
                           const StftConfig& framing, int rate);

// Mean |y|^2 per STFT frame of the direct (O(N M)) convolution. Without an
// explicit range every frame of the framing is computed.
std::vector<double> convolve_energy(std::span<const double> signal, const TimeDomainWavelet& wavelet,
                                    const StftConfig& framing, int rate, Exec exec = Exec::parallel);
std::vector<double> convolve_energy(std::span<const double> signal, const TimeDomainWavelet& wavelet,
                                    const StftConfig& framing, int rate, FrameRange range,
                                    Exec exec = Exec::parallel);

struct PathComparison {
  std::size_t filter_index = 0;
  std::vector<double> stft_path;  // mean-normalized, interior frames
  std::vector<double> time_path;  // mean-normalized, interior frames
  double max_rel_err = 0.0;
  std::size_t first_frame = 0;
  std::size_t frames_compared = 0;
  bool at_floor = false;  // both paths silent; comparison skipped

  nlohmann::json report() const;
};

// Energy below this (per frame, either path) counts as silence.
inline constexpr double kSilenceFloor = 1e-20;

// Compares the STFT-path trajectory of one filter (all frames, as produced by
// the extractor) with the time-domain convolution over interior frames.
PathComparison compare_paths(std::span<const double> signal, int rate,
                             std::span<const double> stft_energies, std::size_t filter_index,
                             const TimeDomainWavelet& wavelet, const StftConfig& framing,
                             Exec exec = Exec::parallel);

struct CosineSimilarity {
  double mean = 0.0;
  std::size_t pairs = 0;
  std::size_t excluded = 0;  // pairs skipped for a zero-norm frame
};

CosineSimilarity adjacent_cosine_similarity(const FeatureMap& map, std::size_t stride);

// Index of the largest value in each row of `energies` (frames x candidates),
// restricted to the listed candidate columns. Ties go to the lowest column.
std::vector<std::size_t> argmax_per_frame(const Matrix& energies, std::span<const std::size_t> candidates);

}  // namespace scaloforge::oracle
