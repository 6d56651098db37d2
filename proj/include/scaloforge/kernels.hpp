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

#include "scaloforge/fft.hpp"
#include "scaloforge/filterbank.hpp"

namespace scaloforge {

// Selects between the straightforward serial reference kernels and their
// OpenMP counterparts. Both produce the same values; the serial versions are
// kept as the testing baseline.
enum class Exec { serial, parallel };

namespace kernels {

// Frame t covers samples [t * shift, t * shift + window); samples past the
// end of the signal read as zero.
struct FramePlan {
  std::size_t window = 0;
  std::size_t shift = 0;
  std::size_t frames = 0;
  std::size_t fft_size = 0;
};

// out is frames x (fft_size/2 + 1), row-major.
void stft_magnitude_serial(std::span<const double> signal, std::span<const double> window,
                           const FramePlan& plan, const RealFft& fft, std::span<double> out);
void stft_magnitude_parallel(std::span<const double> signal, std::span<const double> window,
                             const FramePlan& plan, const RealFft& fft, std::span<double> out);

// out(t, j) = sum_b w(j, b) * mag(t, b)^2. The serial version walks the dense
// J x B weight matrix; the parallel one only visits each row's support.
void filterbank_energy_serial(std::span<const double> magnitudes, std::size_t frames,
                              const DigitalFilterMatrix& filters, std::span<double> out);
void filterbank_energy_parallel(std::span<const double> magnitudes, std::size_t frames,
                                const DigitalFilterMatrix& filters, std::span<double> out);

// Direct complex convolution y[n] = sum_i taps[i] x[n + centre - i] followed
// by the mean of |y|^2 over each frame in [first_frame, last_frame).
// out[k] receives frame first_frame + k.
void wavelet_frame_energy_serial(std::span<const double> signal,
                                 std::span<const std::complex<double>> taps, std::size_t centre,
                                 const FramePlan& plan, std::size_t first_frame,
                                 std::size_t last_frame, std::span<double> out);
void wavelet_frame_energy_parallel(std::span<const double> signal,
                                   std::span<const std::complex<double>> taps, std::size_t centre,
                                   const FramePlan& plan, std::size_t first_frame,
                                   std::size_t last_frame, std::span<double> out);

inline void stft_magnitude(std::span<const double> signal, std::span<const double> window,
                           const FramePlan& plan, const RealFft& fft, std::span<double> out, Exec exec) {
  exec == Exec::serial ? stft_magnitude_serial(signal, window, plan, fft, out)
                       : stft_magnitude_parallel(signal, window, plan, fft, out);
}

inline void filterbank_energy(std::span<const double> magnitudes, std::size_t frames,
                              const DigitalFilterMatrix& filters, std::span<double> out, Exec exec) {
  exec == Exec::serial ? filterbank_energy_serial(magnitudes, frames, filters, out)
                       : filterbank_energy_parallel(magnitudes, frames, filters, out);
}

inline void wavelet_frame_energy(std::span<const double> signal,
                                 std::span<const std::complex<double>> taps, std::size_t centre,
                                 const FramePlan& plan, std::size_t first_frame,
                                 std::size_t last_frame, std::span<double> out, Exec exec) {
  exec == Exec::serial
      ? wavelet_frame_energy_serial(signal, taps, centre, plan, first_frame, last_frame, out)
      : wavelet_frame_energy_parallel(signal, taps, centre, plan, first_frame, last_frame, out);
}

}  // namespace kernels
}  // namespace scaloforge
