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

// Finite-difference helpers shared by the gradient tests and the acceptance
// runner.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "scaloforge/nn/layers.hpp"
#include "scaloforge/nn/tensor.hpp"
#include "scaloforge/random.hpp"

namespace scaloforge::testing {

inline constexpr double kFiniteDifferenceStep = 1e-5;
// Gradients smaller than this are compared in absolute rather than relative
// terms.
inline constexpr double kRelativeFloor = 1e-4;

// Central differences of f with respect to every element of `values`; the
// values are restored afterwards.
inline std::vector<double> numeric_gradient(std::vector<double>& values, const std::function<double()>& f,
                                            double step = kFiniteDifferenceStep) {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double saved = values[i];
    values[i] = saved + step;
    const double up = f();
    values[i] = saved - step;
    const double down = f();
    values[i] = saved;
    out[i] = (up - down) / (2.0 * step);
  }
  return out;
}

// max_i |a_i - n_i| / max(|a_i|, |n_i|, floor).
inline double max_relative_error(const std::vector<double>& analytic, const std::vector<double>& numeric,
                                 double floor = kRelativeFloor) {
  if (analytic.size() != numeric.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double scale = std::max({std::abs(analytic[i]), std::abs(numeric[i]), floor});
    worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / scale);
  }
  return worst;
}

inline nn::Tensor random_tensor(std::vector<std::size_t> shape, Rng& rng, double scale = 1.0) {
  nn::Tensor t(std::move(shape));
  for (double& v : t.value) v = scale * rng.normal();
  return t;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Checks a layer's input and parameter gradients against central
// differences of the scalar probe loss sum(r * layer(x)) for a random r.
// Returns the worst relative error over all checked entries.
inline double check_layer_gradients(nn::Layer& layer, nn::Tensor x, Rng& rng) {
  const nn::Tensor probe_out = layer.forward(x, false);
  const nn::Tensor r = random_tensor(probe_out.shape, rng);
  const auto params = layer.parameters();
  nn::zero_grads(params);
  layer.forward(x, false);
  const nn::Tensor dx = layer.backward(r);
  std::vector<std::vector<double>> analytic_params;
  for (const auto& p : params) analytic_params.push_back(p.tensor->grad);

  auto loss = [&] { return dot(layer.forward(x, false).value, r.value); };
  double worst = max_relative_error(dx.value, numeric_gradient(x.value, loss));
  for (std::size_t k = 0; k < params.size(); ++k) {
    worst = std::max(worst, max_relative_error(analytic_params[k], numeric_gradient(params[k].tensor->value, loss)));
  }
  return worst;
}

}  // namespace scaloforge::testing
