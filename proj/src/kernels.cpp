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


#include "scaloforge/kernels.hpp"

#include <algorithm>
#include <vector>

#include "scaloforge/error.hpp"

namespace scaloforge::kernels {
namespace {

void check_stft_buffers(std::span<const double> window, const FramePlan& plan, const RealFft& fft,
                        std::span<double> out) {
  if (window.size() != plan.window || plan.window > plan.fft_size || fft.size() != plan.fft_size) {
    fail(ErrorCode::shape, "STFT window/FFT size mismatch");
  }
  if (out.size() != plan.frames * fft.num_bins()) fail(ErrorCode::shape, "STFT output size mismatch");
}

void frame_magnitude(std::span<const double> signal, std::span<const double> window,
                     const FramePlan& plan, std::size_t t, const RealFft& fft,
                     std::vector<double>& frame, std::vector<double>& scratch, std::span<double> out) {
  std::fill(frame.begin(), frame.end(), 0.0);
  const std::size_t start = t * plan.shift;
  const std::size_t stop = std::min(signal.size(), start + plan.window);
  for (std::size_t n = start; n < stop; ++n) frame[n - start] = signal[n] * window[n - start];
  fft.magnitudes(frame, out, scratch);
}

}  // namespace

void stft_magnitude_serial(std::span<const double> signal, std::span<const double> window,
                           const FramePlan& plan, const RealFft& fft, std::span<double> out) {
  check_stft_buffers(window, plan, fft, out);
  const std::size_t bins = fft.num_bins();
  std::vector<double> frame(plan.fft_size);
  std::vector<double> scratch(2 * bins);
  for (std::size_t t = 0; t < plan.frames; ++t) {
    frame_magnitude(signal, window, plan, t, fft, frame, scratch, out.subspan(t * bins, bins));
  }
}

void stft_magnitude_parallel(std::span<const double> signal, std::span<const double> window,
                             const FramePlan& plan, const RealFft& fft, std::span<double> out) {
  check_stft_buffers(window, plan, fft, out);
  const std::size_t bins = fft.num_bins();
  const auto frames = static_cast<std::ptrdiff_t>(plan.frames);
#pragma omp parallel
  {
    std::vector<double> frame(plan.fft_size);
    std::vector<double> scratch(2 * bins);
#pragma omp for schedule(static)
    for (std::ptrdiff_t t = 0; t < frames; ++t) {
      const auto ut = static_cast<std::size_t>(t);
      frame_magnitude(signal, window, plan, ut, fft, frame, scratch, out.subspan(ut * bins, bins));
    }
  }
}

void filterbank_energy_serial(std::span<const double> magnitudes, std::size_t frames,
                              const DigitalFilterMatrix& filters, std::span<double> out) {
  const std::size_t bins = filters.num_bins();
  const std::size_t count = filters.num_filters();
  if (magnitudes.size() != frames * bins) {
    fail(ErrorCode::shape, "spectrogram has " + std::to_string(magnitudes.size() / std::max<std::size_t>(frames, 1)) +
                               " bins per frame, filter matrix expects " + std::to_string(bins));
  }
  if (out.size() != frames * count) fail(ErrorCode::shape, "energy buffer size mismatch");
  const std::vector<double> weights = filters.dense();
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t j = 0; j < count; ++j) {
      double sum = 0.0;
      for (std::size_t b = 0; b < bins; ++b) {
        const double m = magnitudes[t * bins + b];
        sum += weights[j * bins + b] * (m * m);
      }
      out[t * count + j] = sum;
    }
  }
}

void filterbank_energy_parallel(std::span<const double> magnitudes, std::size_t frames,
                                const DigitalFilterMatrix& filters, std::span<double> out) {
  const std::size_t bins = filters.num_bins();
  const std::size_t count = filters.num_filters();
  if (magnitudes.size() != frames * bins) {
    fail(ErrorCode::shape, "spectrogram has " + std::to_string(magnitudes.size() / std::max<std::size_t>(frames, 1)) +
                               " bins per frame, filter matrix expects " + std::to_string(bins));
  }
  if (out.size() != frames * count) fail(ErrorCode::shape, "energy buffer size mismatch");
  const auto total = static_cast<std::ptrdiff_t>(frames * count);
#pragma omp parallel
  {
    std::vector<double> power(bins);
    std::size_t cached_frame = frames;
#pragma omp for schedule(static)
    for (std::ptrdiff_t idx = 0; idx < total; ++idx) {
      const std::size_t t = static_cast<std::size_t>(idx) / count;
      const std::size_t j = static_cast<std::size_t>(idx) % count;
      if (t != cached_frame) {
        for (std::size_t b = 0; b < bins; ++b) {
          const double m = magnitudes[t * bins + b];
          power[b] = m * m;
        }
        cached_frame = t;
      }
      const auto& row = filters.row(j);
      const double* p = power.data() + row.first_bin;
      double sum = 0.0;
      for (std::size_t i = 0; i < row.weights.size(); ++i) sum += row.weights[i] * p[i];
      out[static_cast<std::size_t>(idx)] = sum;
    }
  }
}

void wavelet_frame_energy_serial(std::span<const double> signal,
                                 std::span<const std::complex<double>> taps, std::size_t centre,
                                 const FramePlan& plan, std::size_t first_frame,
                                 std::size_t last_frame, std::span<double> out) {
  if (out.size() != last_frame - first_frame) fail(ErrorCode::shape, "energy buffer size mismatch");
  const auto size = static_cast<std::ptrdiff_t>(signal.size());
  for (std::size_t t = first_frame; t < last_frame; ++t) {
    double sum = 0.0;
    for (std::size_t k = 0; k < plan.window; ++k) {
      const auto n = static_cast<std::ptrdiff_t>(t * plan.shift + k);
      std::complex<double> y = 0.0;
      for (std::size_t i = 0; i < taps.size(); ++i) {
        const std::ptrdiff_t m = n + static_cast<std::ptrdiff_t>(centre) - static_cast<std::ptrdiff_t>(i);
        if (m >= 0 && m < size) y += taps[i] * signal[static_cast<std::size_t>(m)];
      }
      sum += std::norm(y);
    }
    out[t - first_frame] = sum / static_cast<double>(plan.window);
  }
}

void wavelet_frame_energy_parallel(std::span<const double> signal,
                                   std::span<const std::complex<double>> taps, std::size_t centre,
                                   const FramePlan& plan, std::size_t first_frame,
                                   std::size_t last_frame, std::span<double> out) {
  if (out.size() != last_frame - first_frame) fail(ErrorCode::shape, "energy buffer size mismatch");
  if (first_frame >= last_frame) return;
  std::vector<double> re(taps.size()), im(taps.size());
  for (std::size_t i = 0; i < taps.size(); ++i) {
    re[i] = taps[i].real();
    im[i] = taps[i].imag();
  }
  // |y|^2 is computed once over the union of the requested frames.
  const std::size_t begin = first_frame * plan.shift;
  const std::size_t end = (last_frame - 1) * plan.shift + plan.window;
  std::vector<double> power(end - begin);
  const auto size = static_cast<std::ptrdiff_t>(signal.size());
  const auto taps_len = static_cast<std::ptrdiff_t>(taps.size());
  const auto count = static_cast<std::ptrdiff_t>(power.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(begin) + k + static_cast<std::ptrdiff_t>(centre);
    // Valid taps satisfy 0 <= n - i < size.
    const std::ptrdiff_t i_lo = std::max<std::ptrdiff_t>(0, n - size + 1);
    const std::ptrdiff_t i_hi = std::min<std::ptrdiff_t>(taps_len, n + 1);
    double yr = 0.0;
    double yi = 0.0;
    for (std::ptrdiff_t i = i_lo; i < i_hi; ++i) {
      const double x = signal[static_cast<std::size_t>(n - i)];
      yr += re[static_cast<std::size_t>(i)] * x;
      yi += im[static_cast<std::size_t>(i)] * x;
    }
    power[static_cast<std::size_t>(k)] = yr * yr + yi * yi;
  }
  for (std::size_t t = first_frame; t < last_frame; ++t) {
    double sum = 0.0;
    const std::size_t offset = t * plan.shift - begin;
    for (std::size_t k = 0; k < plan.window; ++k) sum += power[offset + k];
    out[t - first_frame] = sum / static_cast<double>(plan.window);
  }
}

}  // namespace scaloforge::kernels
