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
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "scaloforge/nn/layers.hpp"
#include "scaloforge/nn/losses.hpp"

namespace scaloforge::nn {

// Frame mode classifies each frame and averages the per-frame log
// probabilities over a segment; segment mode classifies the time-mean of the
// segment's frames directly.
enum class Granularity { frame, segment };

std::string_view to_string(Granularity g) noexcept;
Granularity parse_granularity(std::string_view text);

struct ClassifierConfig {
  std::size_t channels = 2;
  std::size_t filters = 290;
  std::size_t classes = 10;
  std::size_t cities = 0;  // 0 disables the adversarial city branch
  std::size_t kernel = 3;
  std::size_t hidden = 64;
  std::size_t city_hidden = 32;
  double dropout = 0.2;
  double gamma_adv = 0.1;
  Granularity granularity = Granularity::frame;
  std::uint64_t seed = 0;

  void validate() const;
  std::size_t input_size() const noexcept { return channels * filters; }
};

nlohmann::json to_json(const ClassifierConfig& c);
ClassifierConfig classifier_config_from_json(const nlohmann::json& j);

// Desk-scale DCNN: two valid 1-D convolutions along the filter axis with
// channel doubling, the input concatenated with both activations, a dense
// hidden layer and the scene head. With cities > 0 a city head hangs off the
// hidden layer through gradient reversal.
class SceneClassifier {
 public:
  explicit SceneClassifier(const ClassifierConfig& config);

  const ClassifierConfig& config() const noexcept { return config_; }

  // Scene logits [B, classes] for inputs [B, channels * filters].
  Tensor forward(const Tensor& x, bool training);
  Tensor city_logits() const { return city_logits_; }

  struct Losses {
    double scene = 0.0;
    double city = 0.0;
  };
  // Forward + backward for one minibatch. The scene head minimizes the scene
  // cross-entropy; the city head minimizes the city cross-entropy while the
  // trunk receives -gamma_adv times its gradient. Gradients accumulate.
  Losses accumulate_gradients(const Tensor& x, const std::vector<int>& scenes,
                              const std::vector<int>* cities, bool training);

  // Row-wise log-softmax of the scene logits in evaluation mode.
  Tensor log_probs(const Tensor& x);

  std::vector<Parameter> parameters();
  std::vector<Parameter> trunk_parameters();
  std::vector<Parameter> city_parameters();
  std::vector<LayerSpec> layer_specs() const;

 private:
  void backward(const Tensor& grad_scene, const Tensor* grad_city);

  ClassifierConfig config_;
  std::unique_ptr<Conv1d> conv1_, conv2_;
  Relu relu1_, relu2_, relu3_;
  std::unique_ptr<Dense> hidden_, head_;
  std::unique_ptr<Dropout> dropout_;
  std::unique_ptr<GradientReversal> grl_;
  std::unique_ptr<Dense> city_hidden_, city_head_;
  Relu city_relu_;
  std::size_t x_size_ = 0, a1_size_ = 0, a2_size_ = 0;
  Tensor city_logits_;
};

struct GeneratorConfig {
  std::size_t noise_dim = 32;
  std::size_t classes = 10;
  std::size_t hidden = 128;
  std::size_t output_size = 580;
  double slope = 0.2;
  std::uint64_t seed = 0;
};

nlohmann::json to_json(const GeneratorConfig& c);
GeneratorConfig generator_config_from_json(const nlohmann::json& j);

// Conditional generator: h0 = z . E[y], then dense/leaky x2 and a linear
// output layer producing one frame.
class Generator {
 public:
  explicit Generator(const GeneratorConfig& config);

  const GeneratorConfig& config() const noexcept { return config_; }

  Tensor forward(const Tensor& z, const std::vector<int>& labels, bool training);
  // Accumulates parameter gradients; returns d/dz.
  Tensor backward(const Tensor& grad_output);

  Tensor sample_noise(std::size_t count, Rng& rng) const;

  std::vector<Parameter> parameters();
  std::vector<LayerSpec> layer_specs() const;

 private:
  GeneratorConfig config_;
  Tensor embedding_;
  std::unique_ptr<Dense> d1_, d2_, out_;
  LeakyRelu a1_, a2_;
  Tensor z_;
  std::vector<int> labels_;
};

struct DiscriminatorConfig {
  std::size_t input_size = 580;
  std::size_t classes = 10;
  std::size_t hidden = 128;
  double slope = 0.2;
  std::uint64_t seed = 0;
};

nlohmann::json to_json(const DiscriminatorConfig& c);
DiscriminatorConfig discriminator_config_from_json(const nlohmann::json& j);

// Shared dense/leaky trunk with a real/fake logit and scene logits.
class Discriminator {
 public:
  explicit Discriminator(const DiscriminatorConfig& config);

  const DiscriminatorConfig& config() const noexcept { return config_; }

  struct Output {
    Tensor source_logit;  // [B, 1]
    Tensor scene_logits;  // [B, classes]
  };
  Output forward(const Tensor& x, bool training);
  // Accumulates parameter gradients; returns d/dx.
  Tensor backward(const Tensor& grad_source, const Tensor& grad_scene);

  std::vector<Parameter> parameters();
  std::vector<LayerSpec> layer_specs() const;

 private:
  DiscriminatorConfig config_;
  std::unique_ptr<Dense> d1_, d2_, source_, scene_;
  LeakyRelu a1_, a2_;
};

}  // namespace scaloforge::nn
