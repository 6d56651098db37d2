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


#include "scaloforge/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "scaloforge/error.hpp"

namespace scaloforge::oracle {

TimeDomainWavelet synthesize_wavelet(double center_hz, double bandwidth_hz, int rate, double truncation_stds) {
  if (rate <= 0) fail(ErrorCode::invalid_argument, "sample rate must be positive");
  if (!(center_hz < rate / 2.0)) fail(ErrorCode::aliasing, "wavelet center at or above Nyquist");
  if (!(bandwidth_hz > 0.0)) fail(ErrorCode::invalid_argument, "bandwidth must be positive");
  TimeDomainWavelet w;
  w.center_hz = center_hz;
  w.bandwidth_hz = bandwidth_hz;
  w.sigma = 1.0 / (2.0 * std::numbers::pi * bandwidth_hz);
  w.sample_rate = rate;
  const auto half = static_cast<std::size_t>(std::ceil(truncation_stds * w.sigma * rate));
  w.centre = half;
  w.taps.resize(2 * half + 1);
  // Continuous inverse transform scaled by 1/rate, i.e. the value an inverse
  // DFT of the sampled passband approaches.
  const double gain = bandwidth_hz * std::sqrt(2.0 * std::numbers::pi) / rate;
  for (std::size_t i = 0; i < w.taps.size(); ++i) {
    const double t = (static_cast<double>(i) - static_cast<double>(half)) / rate;
    const double envelope = gain * std::exp(-0.5 * (t / w.sigma) * (t / w.sigma));
    const double phase = 2.0 * std::numbers::pi * center_hz * t;
    w.taps[i] = std::polar(envelope, phase);
  }
  return w;
}

FrameRange interior_frames(std::size_t num_samples, const TimeDomainWavelet& wavelet,
                           const StftConfig& framing, int rate) {
  const std::size_t frames = framing.frame_count(num_samples, rate);
  const std::size_t window = framing.window_samples(rate);
  const std::size_t shift = framing.shift_samples(rate);
  const std::size_t reach = wavelet.centre;
  FrameRange range{frames, frames};
  for (std::size_t t = 0; t < frames; ++t) {
    const std::size_t start = t * shift;
    if (start >= reach && start + window + reach <= num_samples) {
      if (range.first == frames) range.first = t;
      range.last = t + 1;
    }
  }
  if (range.first == frames) range = {0, 0};
  return range;
}

std::vector<double> convolve_energy(std::span<const double> signal, const TimeDomainWavelet& wavelet,
                                    const StftConfig& framing, int rate, Exec exec) {
  const std::size_t frames = framing.frame_count(signal.size(), rate);
  return convolve_energy(signal, wavelet, framing, rate, FrameRange{0, frames}, exec);
}

std::vector<double> convolve_energy(std::span<const double> signal, const TimeDomainWavelet& wavelet,
                                    const StftConfig& framing, int rate, FrameRange range, Exec exec) {
  if (wavelet.sample_rate != rate) fail(ErrorCode::invalid_argument, "wavelet and signal rates differ");
  if (signal.size() < wavelet.taps.size()) {
    fail(ErrorCode::length, "signal is shorter than the wavelet support");
  }
  const std::size_t frames = framing.frame_count(signal.size(), rate);
  if (range.last > frames || range.first > range.last) fail(ErrorCode::invalid_argument, "frame range out of bounds");
  kernels::FramePlan plan{framing.window_samples(rate), framing.shift_samples(rate), frames,
                          framing.resolved_fft_size(rate)};
  std::vector<double> out(range.size());
  kernels::wavelet_frame_energy(signal, wavelet.taps, wavelet.centre, plan, range.first, range.last, out, exec);
  return out;
}

nlohmann::json PathComparison::report() const {
  return {{"filter_index", filter_index},
          {"max_rel_err", max_rel_err},
          {"frames_compared", frames_compared},
          {"at_floor", at_floor}};
}

PathComparison compare_paths(std::span<const double> signal, int rate,
                             std::span<const double> stft_energies, std::size_t filter_index,
                             const TimeDomainWavelet& wavelet, const StftConfig& framing, Exec exec) {
  const std::size_t frames = framing.frame_count(signal.size(), rate);
  if (stft_energies.size() != frames) {
    fail(ErrorCode::shape, "STFT trajectory has " + std::to_string(stft_energies.size()) +
                               " frames, framing yields " + std::to_string(frames));
  }
  const FrameRange range = interior_frames(signal.size(), wavelet, framing, rate);
  PathComparison cmp;
  cmp.filter_index = filter_index;
  cmp.first_frame = range.first;
  if (range.size() == 0) return cmp;
  const std::vector<double> time = convolve_energy(signal, wavelet, framing, rate, range, exec);
  const auto stft = stft_energies.subspan(range.first, range.size());

  double stft_mean = 0.0;
  double time_mean = 0.0;
  for (std::size_t k = 0; k < range.size(); ++k) {
    stft_mean += stft[k];
    time_mean += time[k];
  }
  stft_mean /= static_cast<double>(range.size());
  time_mean /= static_cast<double>(range.size());
  if (stft_mean <= kSilenceFloor && time_mean <= kSilenceFloor) {
    cmp.at_floor = true;
    return cmp;
  }
  cmp.frames_compared = range.size();
  cmp.stft_path.resize(range.size());
  cmp.time_path.resize(range.size());
  for (std::size_t k = 0; k < range.size(); ++k) {
    cmp.stft_path[k] = stft_mean > 0.0 ? stft[k] / stft_mean : 0.0;
    cmp.time_path[k] = time_mean > 0.0 ? time[k] / time_mean : 0.0;
    const double denom = std::max(std::abs(cmp.time_path[k]), 1e-300);
    cmp.max_rel_err = std::max(cmp.max_rel_err, std::abs(cmp.stft_path[k] - cmp.time_path[k]) / denom);
  }
  return cmp;
}

CosineSimilarity adjacent_cosine_similarity(const FeatureMap& map, std::size_t stride) {
  if (stride == 0) fail(ErrorCode::invalid_argument, "stride must be positive");
  if (map.frames < stride + 1) {
    fail(ErrorCode::length, "map has " + std::to_string(map.frames) + " frames, stride " +
                                std::to_string(stride) + " needs at least " + std::to_string(stride + 1));
  }
  CosineSimilarity out;
  double total = 0.0;
  for (std::size_t t = 0; t + stride < map.frames; ++t) {
    const auto a = map.frame(t);
    const auto b = map.frame(t + stride);
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      dot += a[k] * b[k];
      na += a[k] * a[k];
      nb += b[k] * b[k];
    }
    if (na == 0.0 || nb == 0.0) {
      ++out.excluded;
      continue;
    }
    total += dot / std::sqrt(na * nb);
    ++out.pairs;
  }
  out.mean = out.pairs > 0 ? total / static_cast<double>(out.pairs) : 0.0;
  return out;
}

std::vector<std::size_t> argmax_per_frame(const Matrix& energies, std::span<const std::size_t> candidates) {
  if (candidates.empty()) fail(ErrorCode::invalid_argument, "no candidate columns");
  std::vector<std::size_t> out(energies.rows);
  for (std::size_t t = 0; t < energies.rows; ++t) {
    std::size_t best = candidates.front();
    for (std::size_t c : candidates) {
      if (energies(t, c) > energies(t, best) || (energies(t, c) == energies(t, best) && c < best)) best = c;
    }
    out[t] = best;
  }
  return out;
}

}  // namespace scaloforge::oracle
