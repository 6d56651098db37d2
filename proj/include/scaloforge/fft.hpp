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
#include <memory>
#include <span>

namespace scaloforge {

// Thin owners of FFTW plans. Planning is serialized internally; execution is
// reentrant, so one plan may be shared by many threads with private buffers.
class RealFft {
 public:
  explicit RealFft(std::size_t size);
  ~RealFft();
  RealFft(RealFft&&) noexcept;
  RealFft& operator=(RealFft&&) noexcept;
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const noexcept { return size_; }
  std::size_t num_bins() const noexcept { return size_ / 2 + 1; }

  // |X[b]| for b in [0, size/2]. `input` holds `size` samples; `scratch`
  // must hold 2 * num_bins() doubles.
  void magnitudes(std::span<const double> input, std::span<double> out, std::span<double> scratch) const;

 private:
  struct Plan;
  std::size_t size_ = 0;
  std::unique_ptr<Plan> plan_;
};

// Orthonormal DCT-II and its inverse (DCT-III) of a fixed length.
class OrthoDct {
 public:
  explicit OrthoDct(std::size_t size);
  ~OrthoDct();
  OrthoDct(OrthoDct&&) noexcept;
  OrthoDct& operator=(OrthoDct&&) noexcept;
  OrthoDct(const OrthoDct&) = delete;
  OrthoDct& operator=(const OrthoDct&) = delete;

  std::size_t size() const noexcept { return size_; }
  void forward(std::span<const double> in, std::span<double> out) const;
  void inverse(std::span<const double> in, std::span<double> out) const;

 private:
  struct Plans;
  std::size_t size_ = 0;
  std::unique_ptr<Plans> plans_;
};

}  // namespace scaloforge
