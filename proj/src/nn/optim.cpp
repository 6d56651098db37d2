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


#include "scaloforge/nn/optim.hpp"

#include <cmath>

#include "scaloforge/error.hpp"

namespace scaloforge::nn {

Adam::Adam(AdamConfig config) : config_(config) {
  if (!(config.lr > 0.0)) fail(ErrorCode::invalid_argument, "adam: learning rate must be positive");
}

void Adam::step(const std::vector<Parameter>& params) {
  if (m_.empty()) {
    m_.resize(params.size());
    v_.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i].assign(params[i].tensor->size(), 0.0);
      v_[i].assign(params[i].tensor->size(), 0.0);
    }
  }
  if (m_.size() != params.size()) fail(ErrorCode::shape, "adam: parameter list changed between steps");
  for (const Parameter& p : params) {
    for (double g : p.tensor->grad) {
      if (!std::isfinite(g)) fail(ErrorCode::divergence, "non-finite gradient in " + p.name);
    }
  }
  ++steps_;
  const double t = static_cast<double>(steps_);
  const double c1 = 1.0 - std::pow(config_.beta1, t);
  const double c2 = 1.0 - std::pow(config_.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& w = *params[i].tensor;
    if (m_[i].size() != w.size()) fail(ErrorCode::shape, "adam: moment shape mismatch for " + params[i].name);
    for (std::size_t k = 0; k < w.size(); ++k) {
      const double g = w.grad[k];
      m_[i][k] = config_.beta1 * m_[i][k] + (1.0 - config_.beta1) * g;
      v_[i][k] = config_.beta2 * v_[i][k] + (1.0 - config_.beta2) * g * g;
      const double mh = m_[i][k] / c1;
      const double vh = v_[i][k] / c2;
      w.value[k] -= config_.lr * mh / (std::sqrt(vh) + config_.epsilon);
    }
  }
}

std::string_view to_string(EarlyStopAction action) noexcept {
  switch (action) {
    case EarlyStopAction::keep_going: return "continue";
    case EarlyStopAction::halve_lr: return "halve_lr";
    case EarlyStopAction::stop: return "stop";
  }
  return "unknown";
}

EarlyStopPolicy::EarlyStopPolicy(EarlyStopMode mode)
    : mode_(mode),
      halve_after_(mode == EarlyStopMode::slow ? 5 : 3),
      stop_after_(mode == EarlyStopMode::slow ? 15 : 6) {}

EarlyStopPolicy::EarlyStopPolicy(std::size_t halve_after, std::size_t stop_after)
    : halve_after_(halve_after), stop_after_(stop_after) {
  if (halve_after == 0 || stop_after == 0) {
    fail(ErrorCode::invalid_argument, "early stop: counts must be positive");
  }
}

EarlyStopAction EarlyStopPolicy::update(double val_loss) {
  if (!std::isfinite(val_loss)) fail(ErrorCode::divergence, "early stop: non-finite validation loss");
  if (val_loss < best_) {
    best_ = val_loss;
    since_best_ = 0;
    return EarlyStopAction::keep_going;
  }
  ++since_best_;
  if (since_best_ >= stop_after_) return EarlyStopAction::stop;
  if (since_best_ % halve_after_ == 0) return EarlyStopAction::halve_lr;
  return EarlyStopAction::keep_going;
}

}  // namespace scaloforge::nn
