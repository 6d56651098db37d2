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


#include "scaloforge/acgan.hpp"

#include <algorithm>
#include <cmath>

#include "scaloforge/error.hpp"
#include "scaloforge/nn/losses.hpp"
#include "scaloforge/random.hpp"

namespace scaloforge {
namespace {

void check_finite(double loss, std::size_t iteration, const char* what) {
  if (!std::isfinite(loss)) {
    fail(ErrorCode::collapse, std::string(what) + " loss is not finite at iteration " + std::to_string(iteration));
  }
}

}  // namespace

double clamp_probability(double p) noexcept { return std::clamp(p, kProbClamp, 1.0 - kProbClamp); }

double acgan_source_loss(const std::vector<double>& d_real, const std::vector<double>& d_fake) {
  double loss = 0.0;
  for (double p : d_real) loss -= std::log(clamp_probability(p));
  for (double p : d_fake) loss -= std::log(1.0 - clamp_probability(p));
  return loss;
}

double acgan_scene_loss(const nn::Tensor& p_real, const nn::Tensor& p_fake, const std::vector<int>& labels) {
  const std::size_t c = p_real.row_size();
  if (p_real.rows() != labels.size() || p_fake.rows() != labels.size() || p_fake.row_size() != c) {
    fail(ErrorCode::shape, "scene loss: real " + p_real.shape_string() + " and fake " + p_fake.shape_string() +
                               " rows must match " + std::to_string(labels.size()) + " labels");
  }
  double loss = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int y = labels[i];
    if (y < 0 || static_cast<std::size_t>(y) >= c) {
      fail(ErrorCode::label_range, "scene label " + std::to_string(y) + " outside [0, " + std::to_string(c) + ")");
    }
    loss -= std::log(clamp_probability(p_real.value[i * c + static_cast<std::size_t>(y)]));
    loss -= std::log(clamp_probability(p_fake.value[i * c + static_cast<std::size_t>(y)]));
  }
  return loss;
}

std::vector<std::size_t> checkpoint_epochs(const AcganConfig& config) {
  std::vector<std::size_t> out;
  for (double f : config.checkpoint_fractions) {
    const auto e = static_cast<std::size_t>(std::llround(f * static_cast<double>(config.epochs)));
    const std::size_t clamped = std::clamp<std::size_t>(e, 1, config.epochs);
    if (std::find(out.begin(), out.end(), clamped) == out.end()) out.push_back(clamped);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

// Sum-reduced source and scene terms for one batch through D; accumulates
// D's gradients and returns d/dx. `real` selects the target of the source
// head (1 for real, 0 for fake).
double source_scene_pass(nn::Discriminator& d, const nn::Tensor& x, const std::vector<int>& labels, bool real,
                         double gamma_aux, double& scene_out, nn::Tensor& grad_x) {
  nn::Discriminator::Output o = d.forward(x, true);
  const std::size_t n = x.rows();
  const std::size_t c = o.scene_logits.row_size();
  nn::Tensor g_source({n, 1});
  double source = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = clamp_probability(nn::sigmoid(o.source_logit.value[i]));
    const double raw = nn::sigmoid(o.source_logit.value[i]);
    const bool clamped = raw != p;
    if (real) {
      source -= std::log(p);
      g_source.value[i] = clamped ? 0.0 : raw - 1.0;  // d(-log s)/dx = s - 1
    } else {
      source -= std::log(1.0 - p);
      g_source.value[i] = clamped ? 0.0 : raw;  // d(-log(1 - s))/dx = s
    }
  }
  nn::Tensor logp = nn::log_softmax(o.scene_logits);
  nn::Tensor g_scene({n, c});
  double scene = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto y = static_cast<std::size_t>(labels[i]);
    if (labels[i] < 0 || y >= c) fail(ErrorCode::label_range, "scene label " + std::to_string(labels[i]));
    const double py = std::exp(logp.value[i * c + y]);
    const bool clamped = py < kProbClamp || py > 1.0 - kProbClamp;
    scene -= std::log(clamp_probability(py));
    if (clamped) continue;
    for (std::size_t j = 0; j < c; ++j) {
      g_scene.value[i * c + j] = gamma_aux * (std::exp(logp.value[i * c + j]) - (j == y ? 1.0 : 0.0));
    }
  }
  grad_x = d.backward(g_source, g_scene);
  scene_out = scene;
  return source;
}

}  // namespace

AcganBatchLoss discriminator_objective(nn::Discriminator& d, const nn::Tensor& real,
                                       const std::vector<int>& real_labels, const nn::Tensor& fake,
                                       const std::vector<int>& fake_labels, double gamma_aux) {
  AcganBatchLoss loss;
  loss.gamma_aux = gamma_aux;
  nn::Tensor unused;
  double scene_real = 0.0, scene_fake = 0.0;
  loss.source += source_scene_pass(d, real, real_labels, true, gamma_aux, scene_real, unused);
  loss.source += source_scene_pass(d, fake, fake_labels, false, gamma_aux, scene_fake, unused);
  loss.scene = scene_real + scene_fake;
  return loss;
}

double generator_objective(nn::Discriminator& d, const nn::Tensor& fake, const std::vector<int>& labels,
                           double gamma_aux, nn::Tensor& grad_fake) {
  nn::Discriminator::Output o = d.forward(fake, true);
  const std::size_t n = fake.rows();
  const std::size_t c = o.scene_logits.row_size();
  nn::Tensor g_source({n, 1});
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double raw = nn::sigmoid(o.source_logit.value[i]);
    const double p = clamp_probability(raw);
    loss += std::log(1.0 - p);
    // d log(1 - s(x)) / dx = -s
    g_source.value[i] = raw != p ? 0.0 : -raw;
  }
  nn::Tensor logp = nn::log_softmax(o.scene_logits);
  nn::Tensor g_scene({n, c});
  for (std::size_t i = 0; i < n; ++i) {
    const auto y = static_cast<std::size_t>(labels[i]);
    const double py = std::exp(logp.value[i * c + y]);
    loss -= gamma_aux * std::log(clamp_probability(py));
    if (py < kProbClamp || py > 1.0 - kProbClamp) continue;
    for (std::size_t j = 0; j < c; ++j) {
      g_scene.value[i * c + j] = gamma_aux * (std::exp(logp.value[i * c + j]) - (j == y ? 1.0 : 0.0));
    }
  }
  grad_fake = d.backward(g_source, g_scene);
  return loss;
}

AcganBatchLoss acgan_training_step(nn::Discriminator& d, nn::Generator& g, nn::Adam& d_opt, nn::Adam& g_opt,
                                   const nn::Tensor& real, const std::vector<int>& labels,
                                   const AcganConfig& config, Rng& rng, std::size_t iteration) {
  const std::size_t n = real.rows();
  const std::vector<nn::Parameter> dp = d.parameters();
  const std::vector<nn::Parameter> gp = g.parameters();
  // Discriminator step on real vs fresh fakes with the same labels.
  nn::zero_grads(dp);
  nn::Tensor fake = g.forward(g.sample_noise(n, rng), labels, false);
  AcganBatchLoss loss = discriminator_objective(d, real, labels, fake, labels, config.gamma_aux);
  check_finite(loss.total(), iteration, "discriminator");
  const double scale = 1.0 / static_cast<double>(n);
  for (const nn::Parameter& p : dp) {
    for (double& v : p.tensor->grad) v *= scale;
  }
  d_opt.step(dp);
  nn::zero_grads(dp);
  // Generator steps; D only relays gradients.
  for (std::size_t s = 0; s < config.generator_steps; ++s) {
    nn::zero_grads(gp);
    std::vector<int> ys(n);
    for (std::size_t i = 0; i < n; ++i) ys[i] = labels[rng.below(labels.size())];
    nn::Tensor f = g.forward(g.sample_noise(n, rng), ys, true);
    nn::Tensor grad_fake;
    const double gl = generator_objective(d, f, ys, config.gamma_aux, grad_fake);
    check_finite(gl, iteration, "generator");
    for (double& v : grad_fake.value) v *= scale;
    g.backward(grad_fake);
    g_opt.step(gp);
    nn::zero_grads(dp);
  }
  nn::zero_grads(gp);
  return loss;
}

AcganResult train_acgan(const std::vector<nn::LabeledMap>& train, std::size_t classes, const AcganConfig& config) {
  if (train.empty()) fail(ErrorCode::invalid_argument, "acgan: empty training set");
  if (config.epochs == 0 || config.batch_size == 0) {
    fail(ErrorCode::invalid_argument, "acgan: epochs and batch size must be positive");
  }
  const std::size_t width = train.front().map.frame_size();
  std::vector<double> frames;
  std::vector<int> labels;
  for (const nn::LabeledMap& m : train) {
    if (m.map.frame_size() != width) fail(ErrorCode::shape, "acgan: heterogeneous frame sizes");
    frames.insert(frames.end(), m.map.data.begin(), m.map.data.end());
    labels.insert(labels.end(), m.map.frames, m.scene);
  }
  nn::GeneratorConfig gc{config.noise_dim, classes, config.hidden, width, 0.2, mix_seed(config.seed ^ 0x6e)};
  nn::DiscriminatorConfig dc{width, classes, config.hidden, 0.2, mix_seed(config.seed ^ 0xd1)};
  nn::Generator g(gc);
  nn::Discriminator d(dc);
  nn::Adam g_opt(config.g_adam), d_opt(config.d_adam);
  Rng rng(mix_seed(config.seed ^ 0xa6a5));
  const std::vector<std::size_t> snaps = checkpoint_epochs(config);

  AcganResult result;
  std::vector<std::size_t> order(labels.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::size_t iteration = 0;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(order);
    AcganBatchLoss mean;
    mean.gamma_aux = config.gamma_aux;
    std::size_t batches = 0;
    for (std::size_t b = 0; b < order.size(); b += config.batch_size) {
      const std::size_t e = std::min(order.size(), b + config.batch_size);
      nn::Tensor real({e - b, width});
      std::vector<int> ys;
      for (std::size_t i = b; i < e; ++i) {
        std::copy_n(frames.data() + order[i] * width, width, real.value.data() + (i - b) * width);
        ys.push_back(labels[order[i]]);
      }
      AcganBatchLoss l = acgan_training_step(d, g, d_opt, g_opt, real, ys, config, rng, iteration++);
      mean.source += l.source / static_cast<double>(e - b);
      mean.scene += l.scene / static_cast<double>(e - b);
      ++batches;
    }
    mean.source /= static_cast<double>(batches);
    mean.scene /= static_cast<double>(batches);
    result.epoch_losses.push_back(mean);
    if (std::find(snaps.begin(), snaps.end(), epoch) != snaps.end()) {
      auto snap = std::make_unique<nn::Generator>(gc);
      const auto src = g.parameters();
      const auto dst = snap->parameters();
      for (std::size_t i = 0; i < src.size(); ++i) dst[i].tensor->value = src[i].tensor->value;
      result.generators.push_back(std::move(snap));
      result.snapshot_epochs.push_back(epoch);
    }
  }
  return result;
}

}  // namespace scaloforge
