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


#include "scaloforge/nn/layers.hpp"

#include <cmath>

#include "scaloforge/error.hpp"

namespace scaloforge::nn {
namespace {

void he_init(Tensor& w, std::size_t fan_in, Rng& rng) {
  const double scale = std::sqrt(2.0 / static_cast<double>(fan_in));
  for (double& v : w.value) v = rng.normal() * scale;
}

}  // namespace

std::string_view to_string(LayerKind kind) noexcept {
  switch (kind) {
    case LayerKind::dense: return "dense";
    case LayerKind::conv1d: return "conv1d";
    case LayerKind::relu: return "relu";
    case LayerKind::leaky_relu: return "leaky_relu";
    case LayerKind::dropout: return "dropout";
    case LayerKind::grl: return "grl";
    case LayerKind::dct_temporal: return "dct_temporal";
  }
  return "unknown";
}

Dense::Dense(std::size_t in, std::size_t out, Rng& init, std::string name)
    : in_(in), out_(out), name_(std::move(name)), weight_({out, in}), bias_({out}) {
  if (in == 0 || out == 0) fail(ErrorCode::invalid_argument, name_ + ": sizes must be positive");
  he_init(weight_, in, init);
  weight_.zero_grad();
  bias_.zero_grad();
}

Tensor Dense::forward(const Tensor& input, bool) {
  require_row_size(input, in_, name_ + " input");
  input_ = input;
  const std::size_t n = input.rows();
  Tensor out({n, out_});
  for (std::size_t r = 0; r < n; ++r) {
    const double* x = input.value.data() + r * in_;
    for (std::size_t o = 0; o < out_; ++o) {
      const double* w = weight_.value.data() + o * in_;
      double acc = bias_.value[o];
      for (std::size_t i = 0; i < in_; ++i) acc += w[i] * x[i];
      out.value[r * out_ + o] = acc;
    }
  }
  return out;
}

Tensor Dense::backward(const Tensor& grad_output) {
  const std::size_t n = input_.rows();
  require_shape(grad_output, {n, out_}, name_ + " gradient");
  Tensor grad_in(input_.shape);
  for (std::size_t r = 0; r < n; ++r) {
    const double* x = input_.value.data() + r * in_;
    double* gx = grad_in.value.data() + r * in_;
    for (std::size_t o = 0; o < out_; ++o) {
      const double g = grad_output.value[r * out_ + o];
      if (g == 0.0) continue;
      bias_.grad[o] += g;
      double* gw = weight_.grad.data() + o * in_;
      const double* w = weight_.value.data() + o * in_;
      for (std::size_t i = 0; i < in_; ++i) {
        gw[i] += g * x[i];
        gx[i] += g * w[i];
      }
    }
  }
  return grad_in;
}

std::vector<Parameter> Dense::parameters() {
  return {{name_ + ".weight", &weight_}, {name_ + ".bias", &bias_}};
}

LayerSpec Dense::spec() const {
  return {LayerKind::dense, {static_cast<std::uint32_t>(in_), static_cast<std::uint32_t>(out_)}, 0.0, 0};
}

Conv1d::Conv1d(std::size_t in_channels, std::size_t out_channels, std::size_t kernel, std::size_t width,
               Rng& init, std::string name)
    : in_ch_(in_channels), out_ch_(out_channels), kernel_(kernel), width_(width), name_(std::move(name)),
      weight_({out_channels, in_channels, kernel}), bias_({out_channels}) {
  if (in_channels == 0 || out_channels == 0 || kernel == 0) {
    fail(ErrorCode::invalid_argument, name_ + ": sizes must be positive");
  }
  if (width < kernel) {
    fail(ErrorCode::shape, name_ + ": width " + std::to_string(width) + " is smaller than kernel " +
                               std::to_string(kernel));
  }
  he_init(weight_, in_channels * kernel, init);
  weight_.zero_grad();
  bias_.zero_grad();
}

Tensor Conv1d::forward(const Tensor& input, bool) {
  require_row_size(input, in_ch_ * width_, name_ + " input");
  input_ = input;
  const std::size_t n = input.rows();
  const std::size_t ow = output_width();
  Tensor out({n, out_ch_, ow});
  for (std::size_t r = 0; r < n; ++r) {
    const double* x = input.value.data() + r * in_ch_ * width_;
    double* y = out.value.data() + r * out_ch_ * ow;
    for (std::size_t o = 0; o < out_ch_; ++o) {
      for (std::size_t p = 0; p < ow; ++p) {
        double acc = bias_.value[o];
        for (std::size_t c = 0; c < in_ch_; ++c) {
          const double* w = weight_.value.data() + (o * in_ch_ + c) * kernel_;
          const double* xc = x + c * width_ + p;
          for (std::size_t k = 0; k < kernel_; ++k) acc += w[k] * xc[k];
        }
        y[o * ow + p] = acc;
      }
    }
  }
  return out;
}

Tensor Conv1d::backward(const Tensor& grad_output) {
  const std::size_t n = input_.rows();
  const std::size_t ow = output_width();
  if (grad_output.size() != n * out_ch_ * ow) {
    fail(ErrorCode::shape, name_ + " gradient: got " + grad_output.shape_string() + ", expected [" +
                               std::to_string(n) + ", " + std::to_string(out_ch_) + ", " +
                               std::to_string(ow) + "]");
  }
  Tensor grad_in(input_.shape);
  for (std::size_t r = 0; r < n; ++r) {
    const double* x = input_.value.data() + r * in_ch_ * width_;
    double* gx = grad_in.value.data() + r * in_ch_ * width_;
    const double* gy = grad_output.value.data() + r * out_ch_ * ow;
    for (std::size_t o = 0; o < out_ch_; ++o) {
      for (std::size_t p = 0; p < ow; ++p) {
        const double g = gy[o * ow + p];
        if (g == 0.0) continue;
        bias_.grad[o] += g;
        for (std::size_t c = 0; c < in_ch_; ++c) {
          const std::size_t base = (o * in_ch_ + c) * kernel_;
          for (std::size_t k = 0; k < kernel_; ++k) {
            weight_.grad[base + k] += g * x[c * width_ + p + k];
            gx[c * width_ + p + k] += g * weight_.value[base + k];
          }
        }
      }
    }
  }
  return grad_in;
}

std::vector<Parameter> Conv1d::parameters() {
  return {{name_ + ".weight", &weight_}, {name_ + ".bias", &bias_}};
}

LayerSpec Conv1d::spec() const {
  return {LayerKind::conv1d,
          {static_cast<std::uint32_t>(in_ch_), static_cast<std::uint32_t>(out_ch_),
           static_cast<std::uint32_t>(kernel_), static_cast<std::uint32_t>(width_)},
          0.0,
          0};
}

Tensor Relu::forward(const Tensor& input, bool) {
  input_ = input;
  Tensor out = input;
  out.grad.clear();
  for (double& v : out.value) v = v > 0.0 ? v : 0.0;
  return out;
}

Tensor Relu::backward(const Tensor& grad_output) {
  if (grad_output.size() != input_.size()) {
    fail(ErrorCode::shape, "relu gradient: got " + grad_output.shape_string() + ", expected " +
                               input_.shape_string());
  }
  Tensor g = grad_output;
  g.shape = input_.shape;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(input_.value[i] > 0.0)) g.value[i] = 0.0;
  }
  return g;
}

Tensor LeakyRelu::forward(const Tensor& input, bool) {
  input_ = input;
  Tensor out = input;
  out.grad.clear();
  for (double& v : out.value) v = v > 0.0 ? v : slope_ * v;
  return out;
}

Tensor LeakyRelu::backward(const Tensor& grad_output) {
  if (grad_output.size() != input_.size()) {
    fail(ErrorCode::shape, "leaky_relu gradient: got " + grad_output.shape_string() + ", expected " +
                               input_.shape_string());
  }
  Tensor g = grad_output;
  g.shape = input_.shape;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(input_.value[i] > 0.0)) g.value[i] *= slope_;
  }
  return g;
}

Dropout::Dropout(double rate, std::uint64_t seed) : rate_(rate), seed_(seed), rng_(seed) {
  if (!(rate >= 0.0 && rate < 1.0)) fail(ErrorCode::invalid_argument, "dropout rate must lie in [0, 1)");
}

Tensor Dropout::forward(const Tensor& input, bool training) {
  Tensor out = input;
  out.grad.clear();
  mask_.assign(input.size(), 1.0);
  if (!training || rate_ == 0.0) return out;
  const double keep_scale = 1.0 / (1.0 - rate_);
  for (std::size_t i = 0; i < out.size(); ++i) {
    mask_[i] = rng_.uniform() < rate_ ? 0.0 : keep_scale;
    out.value[i] *= mask_[i];
  }
  return out;
}

Tensor Dropout::backward(const Tensor& grad_output) {
  if (grad_output.size() != mask_.size()) fail(ErrorCode::shape, "dropout gradient size mismatch");
  Tensor g = grad_output;
  for (std::size_t i = 0; i < g.size(); ++i) g.value[i] *= mask_[i];
  return g;
}

GradientReversal::GradientReversal(double gain) : gain_(gain) {
  if (!(gain >= 0.0)) fail(ErrorCode::invalid_argument, "gradient reversal gain must be >= 0");
}

Tensor GradientReversal::forward(const Tensor& input, bool) {
  Tensor out = input;
  out.grad.clear();
  return out;
}

Tensor GradientReversal::backward(const Tensor& grad_output) { return grl_apply(grad_output, gain_); }

Tensor grl_apply(const Tensor& branch_grad, double gain) {
  if (!(gain >= 0.0)) fail(ErrorCode::invalid_argument, "gradient reversal gain must be >= 0");
  Tensor g = branch_grad;
  g.grad.clear();
  // 0 * -gain would give -0.0; keep a clean zero when the branch is detached.
  for (double& v : g.value) v = gain == 0.0 ? 0.0 : -gain * v;
  return g;
}

}  // namespace scaloforge::nn
