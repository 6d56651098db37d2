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


#include "scaloforge/nn/models.hpp"

#include "scaloforge/error.hpp"
#include "scaloforge/random.hpp"

namespace scaloforge::nn {
namespace {

Tensor slice_columns(const Tensor& t, std::size_t offset, std::size_t width) {
  const std::size_t n = t.rows();
  const std::size_t stride = t.row_size();
  Tensor out({n, width});
  for (std::size_t r = 0; r < n; ++r) {
    std::copy_n(t.value.data() + r * stride + offset, width, out.value.data() + r * width);
  }
  return out;
}

void append(std::vector<Parameter>& dst, std::vector<Parameter> src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

}  // namespace

std::string_view to_string(Granularity g) noexcept {
  return g == Granularity::frame ? "frame" : "segment";
}

Granularity parse_granularity(std::string_view text) {
  if (text == "frame") return Granularity::frame;
  if (text == "segment") return Granularity::segment;
  fail(ErrorCode::invalid_argument, "unknown granularity '" + std::string(text) + "'");
}

void ClassifierConfig::validate() const {
  if (channels == 0 || classes < 2 || hidden == 0 || kernel == 0) {
    fail(ErrorCode::invalid_argument, "classifier: channels, hidden and kernel must be positive, classes >= 2");
  }
  if (filters < 2 * kernel - 1) {
    fail(ErrorCode::shape, "classifier: " + std::to_string(filters) + " filters too few for two kernels of " +
                               std::to_string(kernel));
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) fail(ErrorCode::invalid_argument, "classifier: dropout in [0, 1)");
  if (!(gamma_adv >= 0.0)) fail(ErrorCode::invalid_argument, "classifier: gamma_adv must be >= 0");
  if (cities == 1) fail(ErrorCode::invalid_argument, "classifier: a city branch needs at least 2 cities");
}

nlohmann::json to_json(const ClassifierConfig& c) {
  return {{"channels", c.channels}, {"filters", c.filters},       {"classes", c.classes},
          {"cities", c.cities},     {"kernel", c.kernel},         {"hidden", c.hidden},
          {"city_hidden", c.city_hidden}, {"dropout", c.dropout}, {"gamma_adv", c.gamma_adv},
          {"granularity", std::string(to_string(c.granularity))}, {"seed", c.seed}};
}

ClassifierConfig classifier_config_from_json(const nlohmann::json& j) {
  ClassifierConfig c;
  c.channels = j.at("channels").get<std::size_t>();
  c.filters = j.at("filters").get<std::size_t>();
  c.classes = j.at("classes").get<std::size_t>();
  c.cities = j.at("cities").get<std::size_t>();
  c.kernel = j.at("kernel").get<std::size_t>();
  c.hidden = j.at("hidden").get<std::size_t>();
  c.city_hidden = j.at("city_hidden").get<std::size_t>();
  c.dropout = j.at("dropout").get<double>();
  c.gamma_adv = j.at("gamma_adv").get<double>();
  c.granularity = parse_granularity(j.at("granularity").get<std::string>());
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

SceneClassifier::SceneClassifier(const ClassifierConfig& config) : config_(config) {
  config_.validate();
  Rng init(mix_seed(config.seed));
  const std::size_t c = config.channels;
  const std::size_t n = config.filters;
  const std::size_t k = config.kernel;
  conv1_ = std::make_unique<Conv1d>(c, 2 * c, k, n, init, "conv1");
  conv2_ = std::make_unique<Conv1d>(2 * c, 4 * c, k, n - k + 1, init, "conv2");
  x_size_ = c * n;
  a1_size_ = conv1_->output_size();
  a2_size_ = conv2_->output_size();
  hidden_ = std::make_unique<Dense>(x_size_ + a1_size_ + a2_size_, config.hidden, init, "hidden");
  head_ = std::make_unique<Dense>(config.hidden, config.classes, init, "scene_head");
  dropout_ = std::make_unique<Dropout>(config.dropout, mix_seed(config.seed ^ 0xd509u));
  if (config.cities > 0) {
    grl_ = std::make_unique<GradientReversal>(config.gamma_adv);
    city_hidden_ = std::make_unique<Dense>(config.hidden, config.city_hidden, init, "city_hidden");
    city_head_ = std::make_unique<Dense>(config.city_hidden, config.cities, init, "city_head");
  }
}

Tensor SceneClassifier::forward(const Tensor& x, bool training) {
  require_row_size(x, x_size_, "classifier input");
  const std::size_t b = x.rows();
  Tensor a1 = relu1_.forward(conv1_->forward(x, training), training);
  Tensor a2 = relu2_.forward(conv2_->forward(a1, training), training);
  const std::size_t width = x_size_ + a1_size_ + a2_size_;
  Tensor cat({b, width});
  for (std::size_t r = 0; r < b; ++r) {
    double* dst = cat.value.data() + r * width;
    std::copy_n(x.value.data() + r * x_size_, x_size_, dst);
    std::copy_n(a1.value.data() + r * a1_size_, a1_size_, dst + x_size_);
    std::copy_n(a2.value.data() + r * a2_size_, a2_size_, dst + x_size_ + a1_size_);
  }
  Tensor h = relu3_.forward(hidden_->forward(cat, training), training);
  if (grl_) {
    Tensor branch = grl_->forward(h, training);
    city_logits_ = city_head_->forward(city_relu_.forward(city_hidden_->forward(branch, training), training),
                                       training);
  }
  return head_->forward(dropout_->forward(h, training), training);
}

void SceneClassifier::backward(const Tensor& grad_scene, const Tensor* grad_city) {
  Tensor gh = dropout_->backward(head_->backward(grad_scene));
  if (grl_ && grad_city != nullptr) {
    Tensor gb = grl_->backward(city_hidden_->backward(city_relu_.backward(city_head_->backward(*grad_city))));
    for (std::size_t i = 0; i < gh.size(); ++i) gh.value[i] += gb.value[i];
  }
  Tensor gcat = hidden_->backward(relu3_.backward(gh));
  Tensor ga2 = slice_columns(gcat, x_size_ + a1_size_, a2_size_);
  Tensor ga1 = slice_columns(gcat, x_size_, a1_size_);
  Tensor g1 = conv2_->backward(relu2_.backward(ga2));
  for (std::size_t i = 0; i < ga1.size(); ++i) ga1.value[i] += g1.value[i];
  conv1_->backward(relu1_.backward(ga1));
}

SceneClassifier::Losses SceneClassifier::accumulate_gradients(const Tensor& x, const std::vector<int>& scenes,
                                                              const std::vector<int>* cities, bool training) {
  Losses losses;
  Tensor logits = forward(x, training);
  LossResult scene = softmax_cross_entropy(logits, scenes);
  losses.scene = scene.loss;
  if (grl_ && cities != nullptr) {
    LossResult city = softmax_cross_entropy(city_logits_, *cities);
    losses.city = city.loss;
    backward(scene.grad, &city.grad);
  } else {
    backward(scene.grad, nullptr);
  }
  return losses;
}

Tensor SceneClassifier::log_probs(const Tensor& x) { return log_softmax(forward(x, false)); }

std::vector<Parameter> SceneClassifier::trunk_parameters() {
  std::vector<Parameter> p;
  append(p, conv1_->parameters());
  append(p, conv2_->parameters());
  append(p, hidden_->parameters());
  return p;
}

std::vector<Parameter> SceneClassifier::city_parameters() {
  std::vector<Parameter> p;
  if (city_hidden_) {
    append(p, city_hidden_->parameters());
    append(p, city_head_->parameters());
  }
  return p;
}

std::vector<Parameter> SceneClassifier::parameters() {
  std::vector<Parameter> p = trunk_parameters();
  append(p, head_->parameters());
  append(p, city_parameters());
  return p;
}

std::vector<LayerSpec> SceneClassifier::layer_specs() const {
  std::vector<LayerSpec> s = {conv1_->spec(), relu1_.spec(),   conv2_->spec(), relu2_.spec(),
                              hidden_->spec(), relu3_.spec(), dropout_->spec(), head_->spec()};
  if (grl_) {
    s.push_back(grl_->spec());
    s.push_back(city_hidden_->spec());
    s.push_back(city_relu_.spec());
    s.push_back(city_head_->spec());
  }
  return s;
}

nlohmann::json to_json(const GeneratorConfig& c) {
  return {{"noise_dim", c.noise_dim}, {"classes", c.classes}, {"hidden", c.hidden},
          {"output_size", c.output_size}, {"slope", c.slope}, {"seed", c.seed}};
}

GeneratorConfig generator_config_from_json(const nlohmann::json& j) {
  GeneratorConfig c;
  c.noise_dim = j.at("noise_dim").get<std::size_t>();
  c.classes = j.at("classes").get<std::size_t>();
  c.hidden = j.at("hidden").get<std::size_t>();
  c.output_size = j.at("output_size").get<std::size_t>();
  c.slope = j.at("slope").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

Generator::Generator(const GeneratorConfig& config)
    : config_(config), embedding_({config.classes, config.noise_dim}), a1_(config.slope), a2_(config.slope) {
  if (config.noise_dim == 0 || config.classes == 0 || config.hidden == 0 || config.output_size == 0) {
    fail(ErrorCode::invalid_argument, "generator: sizes must be positive");
  }
  Rng init(mix_seed(config.seed ^ 0x9e4u));
  // Embeddings start near one so the conditioning initially passes the noise.
  for (double& v : embedding_.value) v = 1.0 + 0.1 * init.normal();
  embedding_.zero_grad();
  d1_ = std::make_unique<Dense>(config.noise_dim, config.hidden, init, "gen1");
  d2_ = std::make_unique<Dense>(config.hidden, config.hidden, init, "gen2");
  out_ = std::make_unique<Dense>(config.hidden, config.output_size, init, "gen_out");
}

Tensor Generator::forward(const Tensor& z, const std::vector<int>& labels, bool training) {
  require_row_size(z, config_.noise_dim, "generator noise");
  if (labels.size() != z.rows()) fail(ErrorCode::shape, "generator: label count does not match noise rows");
  z_ = z;
  labels_ = labels;
  Tensor h0({z.rows(), config_.noise_dim});
  for (std::size_t r = 0; r < z.rows(); ++r) {
    const int y = labels[r];
    if (y < 0 || static_cast<std::size_t>(y) >= config_.classes) {
      fail(ErrorCode::label_range, "generator label " + std::to_string(y) + " outside [0, " +
                                       std::to_string(config_.classes) + ")");
    }
    for (std::size_t i = 0; i < config_.noise_dim; ++i) {
      h0.value[r * config_.noise_dim + i] =
          z.value[r * config_.noise_dim + i] * embedding_.value[static_cast<std::size_t>(y) * config_.noise_dim + i];
    }
  }
  Tensor h1 = a1_.forward(d1_->forward(h0, training), training);
  Tensor h2 = a2_.forward(d2_->forward(h1, training), training);
  return out_->forward(h2, training);
}

Tensor Generator::backward(const Tensor& grad_output) {
  Tensor g0 = d1_->backward(a1_.backward(d2_->backward(a2_.backward(out_->backward(grad_output)))));
  Tensor gz(z_.shape);
  const std::size_t d = config_.noise_dim;
  for (std::size_t r = 0; r < z_.rows(); ++r) {
    const std::size_t y = static_cast<std::size_t>(labels_[r]);
    for (std::size_t i = 0; i < d; ++i) {
      const double g = g0.value[r * d + i];
      embedding_.grad[y * d + i] += g * z_.value[r * d + i];
      gz.value[r * d + i] = g * embedding_.value[y * d + i];
    }
  }
  return gz;
}

Tensor Generator::sample_noise(std::size_t count, Rng& rng) const {
  Tensor z({count, config_.noise_dim});
  for (double& v : z.value) v = rng.normal();
  return z;
}

std::vector<Parameter> Generator::parameters() {
  std::vector<Parameter> p = {{"gen.embedding", &embedding_}};
  append(p, d1_->parameters());
  append(p, d2_->parameters());
  append(p, out_->parameters());
  return p;
}

std::vector<LayerSpec> Generator::layer_specs() const {
  LayerSpec emb{LayerKind::dense,
                {static_cast<std::uint32_t>(config_.classes), static_cast<std::uint32_t>(config_.noise_dim)},
                0.0,
                0};
  return {emb, d1_->spec(), a1_.spec(), d2_->spec(), a2_.spec(), out_->spec()};
}

nlohmann::json to_json(const DiscriminatorConfig& c) {
  return {{"input_size", c.input_size}, {"classes", c.classes}, {"hidden", c.hidden},
          {"slope", c.slope}, {"seed", c.seed}};
}

DiscriminatorConfig discriminator_config_from_json(const nlohmann::json& j) {
  DiscriminatorConfig c;
  c.input_size = j.at("input_size").get<std::size_t>();
  c.classes = j.at("classes").get<std::size_t>();
  c.hidden = j.at("hidden").get<std::size_t>();
  c.slope = j.at("slope").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

Discriminator::Discriminator(const DiscriminatorConfig& config)
    : config_(config), a1_(config.slope), a2_(config.slope) {
  if (config.input_size == 0 || config.classes == 0 || config.hidden == 0) {
    fail(ErrorCode::invalid_argument, "discriminator: sizes must be positive");
  }
  Rng init(mix_seed(config.seed ^ 0xd15cu));
  d1_ = std::make_unique<Dense>(config.input_size, config.hidden, init, "disc1");
  d2_ = std::make_unique<Dense>(config.hidden, config.hidden, init, "disc2");
  source_ = std::make_unique<Dense>(config.hidden, 1, init, "disc_source");
  scene_ = std::make_unique<Dense>(config.hidden, config.classes, init, "disc_scene");
}

Discriminator::Output Discriminator::forward(const Tensor& x, bool training) {
  Tensor h = a2_.forward(d2_->forward(a1_.forward(d1_->forward(x, training), training), training), training);
  return {source_->forward(h, training), scene_->forward(h, training)};
}

Tensor Discriminator::backward(const Tensor& grad_source, const Tensor& grad_scene) {
  Tensor gh = source_->backward(grad_source);
  Tensor gs = scene_->backward(grad_scene);
  for (std::size_t i = 0; i < gh.size(); ++i) gh.value[i] += gs.value[i];
  return d1_->backward(a1_.backward(d2_->backward(a2_.backward(gh))));
}

std::vector<Parameter> Discriminator::parameters() {
  std::vector<Parameter> p;
  append(p, d1_->parameters());
  append(p, d2_->parameters());
  append(p, source_->parameters());
  append(p, scene_->parameters());
  return p;
}

std::vector<LayerSpec> Discriminator::layer_specs() const {
  return {d1_->spec(), a1_.spec(), d2_->spec(), a2_.spec(), source_->spec(), scene_->spec()};
}

}  // namespace scaloforge::nn
