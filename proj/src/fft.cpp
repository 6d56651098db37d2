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


#include "scaloforge/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <vector>

#include "scaloforge/error.hpp"

namespace scaloforge {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr unsigned kPlanFlags = FFTW_ESTIMATE | FFTW_UNALIGNED;

}  // namespace

struct RealFft::Plan {
  fftw_plan handle = nullptr;
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    if (handle) fftw_destroy_plan(handle);
  }
};

RealFft::RealFft(std::size_t size) : size_(size), plan_(std::make_unique<Plan>()) {
  if (size < 2) fail(ErrorCode::invalid_argument, "FFT size must be at least 2");
  std::vector<double> in(size);
  std::vector<double> out(2 * num_bins());
  std::lock_guard lock(planner_mutex());
  plan_->handle = fftw_plan_dft_r2c_1d(static_cast<int>(size), in.data(),
                                       reinterpret_cast<fftw_complex*>(out.data()), kPlanFlags);
  if (!plan_->handle) fail(ErrorCode::invalid_argument, "FFTW could not plan size " + std::to_string(size));
}

RealFft::~RealFft() = default;
RealFft::RealFft(RealFft&&) noexcept = default;
RealFft& RealFft::operator=(RealFft&&) noexcept = default;

void RealFft::magnitudes(std::span<const double> input, std::span<double> out,
                         std::span<double> scratch) const {
  if (input.size() != size_ || out.size() != num_bins() || scratch.size() < 2 * num_bins()) {
    fail(ErrorCode::shape, "FFT buffer sizes do not match plan size " + std::to_string(size_));
  }
  // FFTW takes a non-const input pointer but does not modify it for
  // out-of-place r2c transforms.
  fftw_execute_dft_r2c(plan_->handle, const_cast<double*>(input.data()),
                       reinterpret_cast<fftw_complex*>(scratch.data()));
  for (std::size_t b = 0; b < out.size(); ++b) out[b] = std::hypot(scratch[2 * b], scratch[2 * b + 1]);
}

struct OrthoDct::Plans {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (inverse) fftw_destroy_plan(inverse);
  }
};

OrthoDct::OrthoDct(std::size_t size) : size_(size), plans_(std::make_unique<Plans>()) {
  if (size < 2) fail(ErrorCode::invalid_argument, "DCT size must be at least 2");
  std::vector<double> a(size), b(size);
  const int n = static_cast<int>(size);
  std::lock_guard lock(planner_mutex());
  plans_->forward = fftw_plan_r2r_1d(n, a.data(), b.data(), FFTW_REDFT10, kPlanFlags);
  plans_->inverse = fftw_plan_r2r_1d(n, a.data(), b.data(), FFTW_REDFT01, kPlanFlags);
  if (!plans_->forward || !plans_->inverse) {
    fail(ErrorCode::invalid_argument, "FFTW could not plan DCT size " + std::to_string(size));
  }
}

OrthoDct::~OrthoDct() = default;
OrthoDct::OrthoDct(OrthoDct&&) noexcept = default;
OrthoDct& OrthoDct::operator=(OrthoDct&&) noexcept = default;

// REDFT10 computes 2 * sum x_n cos(pi k (2n+1) / 2N); REDFT01 computes
// X_0 + 2 * sum_{k>=1} X_k cos(...). The scalings below make the pair
// orthonormal.
void OrthoDct::forward(std::span<const double> in, std::span<double> out) const {
  if (in.size() != size_ || out.size() != size_) fail(ErrorCode::shape, "DCT buffer size mismatch");
  std::vector<double> tmp(in.begin(), in.end());
  fftw_execute_r2r(plans_->forward, tmp.data(), out.data());
  const double n = static_cast<double>(size_);
  out[0] *= 0.5 * std::sqrt(1.0 / n);
  const double s = 0.5 * std::sqrt(2.0 / n);
  for (std::size_t k = 1; k < size_; ++k) out[k] *= s;
}

void OrthoDct::inverse(std::span<const double> in, std::span<double> out) const {
  if (in.size() != size_ || out.size() != size_) fail(ErrorCode::shape, "DCT buffer size mismatch");
  const double n = static_cast<double>(size_);
  std::vector<double> tmp(size_);
  tmp[0] = in[0] * std::sqrt(1.0 / n);
  const double s = 0.5 * std::sqrt(2.0 / n);
  for (std::size_t k = 1; k < size_; ++k) tmp[k] = in[k] * s;
  fftw_execute_r2r(plans_->inverse, tmp.data(), out.data());
}

}  // namespace scaloforge
