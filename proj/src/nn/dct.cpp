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


#include "scaloforge/nn/dct.hpp"

#include <algorithm>
#include <cmath>

#include "scaloforge/error.hpp"

namespace scaloforge::nn {

DctTemporal::DctTemporal(std::size_t chunk, std::size_t features, Rng& init, std::string name)
    : chunk_(chunk), features_(features), name_(std::move(name)), dct_(chunk),
      wx_({chunk, features}, 1.0), wy_({chunk, features}, 1.0),
      proj_({features, 2 * features}), bias_({features}) {
  if (chunk == 0 || features == 0) fail(ErrorCode::invalid_argument, name_ + ": sizes must be positive");
  const double scale = std::sqrt(2.0 / static_cast<double>(2 * features));
  for (double& v : proj_.value) v = init.normal() * scale;
  for (Tensor* t : {&wx_, &wy_, &proj_, &bias_}) t->zero_grad();
}

void DctTemporal::set_identity_projection() {
  std::fill(wx_.value.begin(), wx_.value.end(), 1.0);
  std::fill(wy_.value.begin(), wy_.value.end(), 1.0);
  std::fill(proj_.value.begin(), proj_.value.end(), 0.0);
  std::fill(bias_.value.begin(), bias_.value.end(), 0.0);
  for (std::size_t n = 0; n < features_; ++n) proj_.value[n * 2 * features_ + n] = 1.0;
}

void DctTemporal::check_input(const Tensor& input) const {
  if (input.shape.size() >= 3 && input.shape[1] != chunk_) {
    fail(ErrorCode::chunk, name_ + ": chunk of " + std::to_string(input.shape[1]) + " frames, expected " +
                               std::to_string(chunk_));
  }
  if (input.row_size() != chunk_ * features_) {
    fail(ErrorCode::chunk, name_ + ": input " + input.shape_string() + " does not hold " +
                               std::to_string(chunk_) + " x " + std::to_string(features_) + " chunks");
  }
}

void DctTemporal::dct_columns(const double* in, double* out) const {
  std::vector<double> col(chunk_), res(chunk_);
  for (std::size_t n = 0; n < features_; ++n) {
    for (std::size_t t = 0; t < chunk_; ++t) col[t] = in[t * features_ + n];
    dct_.forward(col, res);
    for (std::size_t t = 0; t < chunk_; ++t) out[t * features_ + n] = res[t];
  }
}

void DctTemporal::idct_columns(const double* in, double* out) const {
  std::vector<double> col(chunk_), res(chunk_);
  for (std::size_t n = 0; n < features_; ++n) {
    for (std::size_t t = 0; t < chunk_; ++t) col[t] = in[t * features_ + n];
    dct_.inverse(col, res);
    for (std::size_t t = 0; t < chunk_; ++t) out[t * features_ + n] = res[t];
  }
}

Tensor DctTemporal::forward(const Tensor& input, bool) {
  check_input(input);
  input_ = input;
  const std::size_t rows = input.rows();
  const std::size_t block = chunk_ * features_;
  ux_.assign(rows * block, 0.0);
  uy_.assign(rows * block, 0.0);
  xt_.assign(rows * block, 0.0);
  yt_.assign(rows * block, 0.0);
  Tensor out(input.shape);
  std::vector<double> y(block), v(block);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* x = input.value.data() + r * block;
    for (std::size_t n = 0; n < features_; ++n) {
      double mean = 0.0;
      for (std::size_t t = 0; t < chunk_; ++t) mean += x[t * features_ + n] * x[t * features_ + n];
      mean /= static_cast<double>(chunk_);
      for (std::size_t t = 0; t < chunk_; ++t) {
        y[t * features_ + n] = x[t * features_ + n] * x[t * features_ + n] - mean;
      }
    }
    double* ux = ux_.data() + r * block;
    double* uy = uy_.data() + r * block;
    double* xt = xt_.data() + r * block;
    double* yt = yt_.data() + r * block;
    dct_columns(x, ux);
    for (std::size_t i = 0; i < block; ++i) v[i] = wx_.value[i] * ux[i];
    idct_columns(v.data(), xt);
    dct_columns(y.data(), uy);
    for (std::size_t i = 0; i < block; ++i) v[i] = wy_.value[i] * uy[i];
    idct_columns(v.data(), yt);
    double* o = out.value.data() + r * block;
    const std::size_t width = 2 * features_;
    for (std::size_t t = 0; t < chunk_; ++t) {
      for (std::size_t m = 0; m < features_; ++m) {
        const double* a = proj_.value.data() + m * width;
        double acc = bias_.value[m];
        for (std::size_t n = 0; n < features_; ++n) {
          acc += a[n] * xt[t * features_ + n] + a[features_ + n] * yt[t * features_ + n];
        }
        o[t * features_ + m] = acc;
      }
    }
  }
  return out;
}

Tensor DctTemporal::backward(const Tensor& grad_output) {
  const std::size_t rows = input_.rows();
  const std::size_t block = chunk_ * features_;
  if (grad_output.size() != rows * block) {
    fail(ErrorCode::shape, name_ + " gradient: got " + grad_output.shape_string() + ", expected " +
                               input_.shape_string());
  }
  Tensor grad_in(input_.shape);
  const std::size_t width = 2 * features_;
  std::vector<double> gxt(block), gyt(block), gv(block), gu(block), gy(block), gx(block);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* g = grad_output.value.data() + r * block;
    const double* x = input_.value.data() + r * block;
    const double* ux = ux_.data() + r * block;
    const double* uy = uy_.data() + r * block;
    const double* xt = xt_.data() + r * block;
    const double* yt = yt_.data() + r * block;
    std::fill(gxt.begin(), gxt.end(), 0.0);
    std::fill(gyt.begin(), gyt.end(), 0.0);
    for (std::size_t t = 0; t < chunk_; ++t) {
      for (std::size_t m = 0; m < features_; ++m) {
        const double gm = g[t * features_ + m];
        if (gm == 0.0) continue;
        bias_.grad[m] += gm;
        double* ga = proj_.grad.data() + m * width;
        const double* a = proj_.value.data() + m * width;
        for (std::size_t n = 0; n < features_; ++n) {
          ga[n] += gm * xt[t * features_ + n];
          ga[features_ + n] += gm * yt[t * features_ + n];
          gxt[t * features_ + n] += gm * a[n];
          gyt[t * features_ + n] += gm * a[features_ + n];
        }
      }
    }
    // X~ = D^T (W . D X): the adjoint of the inverse transform is the forward one.
    dct_columns(gxt.data(), gv.data());
    for (std::size_t i = 0; i < block; ++i) {
      wx_.grad[i] += gv[i] * ux[i];
      gu[i] = gv[i] * wx_.value[i];
    }
    idct_columns(gu.data(), gx.data());
    dct_columns(gyt.data(), gv.data());
    for (std::size_t i = 0; i < block; ++i) {
      wy_.grad[i] += gv[i] * uy[i];
      gu[i] = gv[i] * wy_.value[i];
    }
    idct_columns(gu.data(), gy.data());
    double* gin = grad_in.value.data() + r * block;
    for (std::size_t n = 0; n < features_; ++n) {
      double mean = 0.0;
      for (std::size_t t = 0; t < chunk_; ++t) mean += gy[t * features_ + n];
      mean /= static_cast<double>(chunk_);
      for (std::size_t t = 0; t < chunk_; ++t) {
        const std::size_t i = t * features_ + n;
        gin[i] = gx[i] + 2.0 * x[i] * (gy[i] - mean);
      }
    }
  }
  return grad_in;
}

std::vector<Parameter> DctTemporal::parameters() {
  return {{name_ + ".weight_x", &wx_},
          {name_ + ".weight_y", &wy_},
          {name_ + ".projection", &proj_},
          {name_ + ".bias", &bias_}};
}

LayerSpec DctTemporal::spec() const {
  return {LayerKind::dct_temporal,
          {static_cast<std::uint32_t>(chunk_), static_cast<std::uint32_t>(features_)},
          0.0,
          0};
}

}  // namespace scaloforge::nn
