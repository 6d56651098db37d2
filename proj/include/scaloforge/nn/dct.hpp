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
#include <string>
#include <vector>

#include "scaloforge/fft.hpp"
#include "scaloforge/nn/layers.hpp"

namespace scaloforge::nn {

// Temporal module operating on chunks of T frames x N features:
//   Y  = X*X with each column's temporal mean removed (second-order statistic)
//   X~ = IDCT(W_X . DCT(X)),  Y~ = IDCT(W_Y . DCT(Y))   (column-wise, along time)
//   out[t] = A [X~[t], Y~[t]] + b                        (A: N x 2N)
// The DCT is the orthonormal type II transform and its type III inverse.
// Input tensors have shape [batch, T, N] (or any shape whose row holds T*N
// values); a chunk length other than T raises a chunk error.
class DctTemporal final : public Layer {
 public:
  DctTemporal(std::size_t chunk, std::size_t features, Rng& init, std::string name = "dct");

  Tensor forward(const Tensor& input, bool training) override;
  Tensor backward(const Tensor& grad_output) override;
  std::vector<Parameter> parameters() override;
  LayerSpec spec() const override;

  // W_X = W_Y = 1, A = [I 0], b = 0: the module reproduces its input.
  void set_identity_projection();

  std::size_t chunk() const noexcept { return chunk_; }
  std::size_t features() const noexcept { return features_; }
  Tensor& weight_x() noexcept { return wx_; }
  Tensor& weight_y() noexcept { return wy_; }
  Tensor& projection() noexcept { return proj_; }
  Tensor& bias() noexcept { return bias_; }

 private:
  void check_input(const Tensor& input) const;
  // Column-wise transforms of a T x N block.
  void dct_columns(const double* in, double* out) const;
  void idct_columns(const double* in, double* out) const;

  std::size_t chunk_, features_;
  std::string name_;
  OrthoDct dct_;
  Tensor wx_, wy_, proj_, bias_;
  // Caches per batch row.
  Tensor input_;
  std::vector<double> ux_, uy_, xt_, yt_;
};

}  // namespace scaloforge::nn
