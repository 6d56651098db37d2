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
#include <vector>

#include "scaloforge/nn/models.hpp"
#include "scaloforge/nn/optim.hpp"
#include "scaloforge/nn/training.hpp"

namespace scaloforge {

inline constexpr double kProbClamp = 1e-7;

double clamp_probability(double p) noexcept;

// -sum_i [log D_real_i + log(1 - D_fake_i)], probabilities clamped to
// [1e-7, 1 - 1e-7].
double acgan_source_loss(const std::vector<double>& d_real, const std::vector<double>& d_fake);

// -sum_i [log p_real_i(y_i) + log p_fake_i(y_i)] on N x C probability rows.
double acgan_scene_loss(const nn::Tensor& p_real, const nn::Tensor& p_fake, const std::vector<int>& labels);

struct AcganBatchLoss {
  double source = 0.0;
  double scene = 0.0;
  double gamma_aux = 0.0;
  double total() const noexcept { return source + gamma_aux * scene; }
};

struct AcganConfig {
  std::size_t epochs = 20;
  std::size_t batch_size = 64;
  std::size_t generator_steps = 3;  // generator updates per discriminator update
  double gamma_aux = 0.2;
  nn::AdamConfig d_adam{2e-4, 0.5, 0.999, 1e-8};
  nn::AdamConfig g_adam{2e-4, 0.5, 0.999, 1e-8};
  std::size_t noise_dim = 32;
  std::size_t hidden = 128;
  std::uint64_t seed = 0;
  // Fractions of `epochs` after which a generator snapshot is kept.
  std::vector<double> checkpoint_fractions{0.7, 0.8, 0.9, 1.0};
};

// Epochs (1-based) at which generator snapshots are taken.
std::vector<std::size_t> checkpoint_epochs(const AcganConfig& config);

// Discriminator objective L_source + gamma_aux * L_scene on one real batch
// and one fake batch, with gradients accumulated into D (and, when
// `generator_grad` is non-null, the gradient with respect to the fake
// inputs written there).
AcganBatchLoss discriminator_objective(nn::Discriminator& d, const nn::Tensor& real,
                                       const std::vector<int>& real_labels, const nn::Tensor& fake,
                                       const std::vector<int>& fake_labels, double gamma_aux);

// Generator objective sum log(1 - D(G)) + gamma_aux * (-sum log p_fake(y)),
// i.e. the fake-sample terms of -L_source + gamma_aux * L_scene. Returns the
// loss and d loss / d fake in `grad_fake`; D's gradients are touched but must
// be discarded by the caller.
double generator_objective(nn::Discriminator& d, const nn::Tensor& fake, const std::vector<int>& labels,
                           double gamma_aux, nn::Tensor& grad_fake);

struct AcganResult {
  std::vector<std::unique_ptr<nn::Generator>> generators;  // snapshots, in epoch order
  std::vector<std::size_t> snapshot_epochs;
  std::vector<AcganBatchLoss> epoch_losses;  // mean discriminator losses per epoch
};

// Trains a conditional GAN on the frames of `train`. One discriminator step
// is followed by `generator_steps` generator steps; the generator's
// gradients flow through D without updating it. A non-finite loss raises a
// collapse error naming the iteration.
AcganResult train_acgan(const std::vector<nn::LabeledMap>& train, std::size_t classes,
                        const AcganConfig& config);

// One D step followed by the G steps, as used by train_acgan.
AcganBatchLoss acgan_training_step(nn::Discriminator& d, nn::Generator& g, nn::Adam& d_opt, nn::Adam& g_opt,
                                   const nn::Tensor& real, const std::vector<int>& labels,
                                   const AcganConfig& config, Rng& rng, std::size_t iteration);

}  // namespace scaloforge
