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
#include <limits>
#include <string_view>
#include <vector>

#include "scaloforge/nn/tensor.hpp"

namespace scaloforge::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Bias-corrected Adam. Moments are created lazily for the parameter list
// given on the first step; later steps must pass the same list.
class Adam {
 public:
  explicit Adam(AdamConfig config = {});

  // Applies one update using each parameter's accumulated grad.
  // A non-finite gradient raises a divergence error naming the parameter.
  void step(const std::vector<Parameter>& params);

  double learning_rate() const noexcept { return config_.lr; }
  void set_learning_rate(double lr) noexcept { config_.lr = lr; }
  std::size_t step_count() const noexcept { return steps_; }
  const AdamConfig& config() const noexcept { return config_; }

 private:
  AdamConfig config_;
  std::size_t steps_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

enum class EarlyStopMode { slow, fast };
enum class EarlyStopAction { keep_going, halve_lr, stop };

std::string_view to_string(EarlyStopAction action) noexcept;

// Tracks non-improving epochs since the best validation loss. Every
// `halve_after` such epochs the learning rate is halved; after `stop_after`
// training stops. Slow = (5, 15), fast = (3, 6).
class EarlyStopPolicy {
 public:
  explicit EarlyStopPolicy(EarlyStopMode mode);
  EarlyStopPolicy(std::size_t halve_after, std::size_t stop_after);

  EarlyStopAction update(double val_loss);

  EarlyStopMode mode() const noexcept { return mode_; }
  std::size_t halve_after() const noexcept { return halve_after_; }
  std::size_t stop_after() const noexcept { return stop_after_; }
  double best_loss() const noexcept { return best_; }
  std::size_t epochs_since_best() const noexcept { return since_best_; }
  bool improved_last() const noexcept { return since_best_ == 0; }

 private:
  EarlyStopMode mode_ = EarlyStopMode::slow;
  std::size_t halve_after_;
  std::size_t stop_after_;
  double best_ = std::numeric_limits<double>::infinity();
  std::size_t since_best_ = 0;
};

}  // namespace scaloforge::nn
