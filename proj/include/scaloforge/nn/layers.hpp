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

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "scaloforge/nn/tensor.hpp"
#include "scaloforge/random.hpp"

namespace scaloforge::nn {

enum class LayerKind : std::uint8_t {
  dense = 0,
  conv1d = 1,
  relu = 2,
  leaky_relu = 3,
  dropout = 4,
  grl = 5,
  dct_temporal = 6,
};

struct LayerSpec {
  LayerKind kind = LayerKind::dense;
  std::vector<std::uint32_t> sizes;
  double scalar = 0.0;  // leaky slope, dropout rate or reversal gain
  std::uint64_t seed = 0;

  bool operator==(const LayerSpec&) const = default;
};

std::string_view to_string(LayerKind kind) noexcept;

// Forward caches whatever backward needs; backward accumulates into the
// parameter gradients and returns the gradient with respect to the input.
class Layer {
 public:
  virtual ~Layer() = default;
  virtual Tensor forward(const Tensor& input, bool training) = 0;
  virtual Tensor backward(const Tensor& grad_output) = 0;
  virtual std::vector<Parameter> parameters() { return {}; }
  virtual LayerSpec spec() const = 0;
};

// y = x W^T + b with W of shape [out, in]; He-initialized.
class Dense final : public Layer {
 public:
  Dense(std::size_t in, std::size_t out, Rng& init, std::string name = "dense");

  Tensor forward(const Tensor& input, bool training) override;
  Tensor backward(const Tensor& grad_output) override;
  std::vector<Parameter> parameters() override;
  LayerSpec spec() const override;

  Tensor& weight() noexcept { return weight_; }
  Tensor& bias() noexcept { return bias_; }
  std::size_t in_features() const noexcept { return in_; }
  std::size_t out_features() const noexcept { return out_; }

 private:
  std::size_t in_, out_;
  std::string name_;
  Tensor weight_, bias_;
  Tensor input_;
};

// Valid (pad 0, stride 1) cross-correlation along the filter axis.
// Input rows hold in_channels x width values; outputs hold
// out_channels x (width - kernel + 1).
class Conv1d final : public Layer {
 public:
  Conv1d(std::size_t in_channels, std::size_t out_channels, std::size_t kernel, std::size_t width,
         Rng& init, std::string name = "conv1d");

  Tensor forward(const Tensor& input, bool training) override;
  Tensor backward(const Tensor& grad_output) override;
  std::vector<Parameter> parameters() override;
  LayerSpec spec() const override;

  Tensor& weight() noexcept { return weight_; }  // [out, in, kernel]
  Tensor& bias() noexcept { return bias_; }
  std::size_t output_width() const noexcept { return width_ - kernel_ + 1; }
  std::size_t output_size() const noexcept { return out_ch_ * output_width(); }

 private:
  std::size_t in_ch_, out_ch_, kernel_, width_;
  std::string name_;
  Tensor weight_, bias_;
  Tensor input_;
};

class Relu final : public Layer {
 public:
  Tensor forward(const Tensor& input, bool training) override;
  Tensor backward(const Tensor& grad_output) override;
  LayerSpec spec() const override { return {LayerKind::relu, {}, 0.0, 0}; }

 private:
  Tensor input_;
};

class LeakyRelu final : public Layer {
 public:
  explicit LeakyRelu(double slope = 0.2) : slope_(slope) {}
  Tensor forward(const Tensor& input, bool training) override;
  Tensor backward(const Tensor& grad_output) override;
  LayerSpec spec() const override { return {LayerKind::leaky_relu, {}, slope_, 0}; }

 private:
  double slope_;
  Tensor input_;
};

// Inverted dropout: kept units are scaled by 1/(1-rate) during training;
// evaluation is the identity.
class Dropout final : public Layer {
 public:
  Dropout(double rate, std::uint64_t seed);
  Tensor forward(const Tensor& input, bool training) override;
  Tensor backward(const Tensor& grad_output) override;
  LayerSpec spec() const override { return {LayerKind::dropout, {}, rate_, seed_}; }

 private:
  double rate_;
  std::uint64_t seed_;
  Rng rng_;
  std::vector<double> mask_;
};

// Identity forward; backward scales the incoming gradient by -gain.
class GradientReversal final : public Layer {
 public:
  explicit GradientReversal(double gain);
  Tensor forward(const Tensor& input, bool training) override;
  Tensor backward(const Tensor& grad_output) override;
  LayerSpec spec() const override { return {LayerKind::grl, {}, gain_, 0}; }
  double gain() const noexcept { return gain_; }

 private:
  double gain_;
};

// grad_trunk = -gain * grad_branch.
Tensor grl_apply(const Tensor& branch_grad, double gain);

}  // namespace scaloforge::nn
