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


#include "scaloforge/nn/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "scaloforge/error.hpp"

namespace scaloforge::nn {

Tensor log_softmax(const Tensor& logits) {
  const std::size_t n = logits.rows();
  const std::size_t c = logits.row_size();
  Tensor out(logits.shape);
  for (std::size_t r = 0; r < n; ++r) {
    const double* x = logits.value.data() + r * c;
    double m = x[0];
    for (std::size_t j = 1; j < c; ++j) m = std::max(m, x[j]);
    double s = 0.0;
    for (std::size_t j = 0; j < c; ++j) s += std::exp(x[j] - m);
    const double lse = m + std::log(s);
    for (std::size_t j = 0; j < c; ++j) out.value[r * c + j] = x[j] - lse;
  }
  return out;
}

Tensor softmax(const Tensor& logits) {
  Tensor out = log_softmax(logits);
  for (double& v : out.value) v = std::exp(v);
  return out;
}

LossResult softmax_cross_entropy(const Tensor& logits, const std::vector<int>& labels) {
  const std::size_t n = logits.rows();
  const std::size_t c = logits.row_size();
  if (labels.size() != n) {
    fail(ErrorCode::shape, "cross-entropy: " + std::to_string(labels.size()) + " labels for " +
                               std::to_string(n) + " rows");
  }
  const Tensor logp = log_softmax(logits);
  LossResult res;
  res.grad = Tensor(logits.shape);
  const double inv_n = n == 0 ? 0.0 : 1.0 / static_cast<double>(n);
  for (std::size_t r = 0; r < n; ++r) {
    const int y = labels[r];
    if (y < 0 || static_cast<std::size_t>(y) >= c) {
      fail(ErrorCode::label_range,
           "label " + std::to_string(y) + " outside [0, " + std::to_string(c) + ")");
    }
    res.loss -= logp.value[r * c + static_cast<std::size_t>(y)];
    for (std::size_t j = 0; j < c; ++j) {
      const double p = std::exp(logp.value[r * c + j]);
      res.grad.value[r * c + j] = (p - (static_cast<int>(j) == y ? 1.0 : 0.0)) * inv_n;
    }
  }
  res.loss *= inv_n;
  return res;
}

double sigmoid(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

LossResult sigmoid_cross_entropy(const Tensor& logits, const std::vector<double>& targets) {
  const std::size_t n = logits.size();
  if (targets.size() != n) fail(ErrorCode::shape, "sigmoid cross-entropy: target count mismatch");
  LossResult res;
  res.grad = Tensor(logits.shape);
  const double inv_n = n == 0 ? 0.0 : 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = logits.value[i];
    const double t = targets[i];
    // log(1 + e^-|x|) + max(x, 0) - x t
    res.loss += std::max(x, 0.0) - x * t + std::log1p(std::exp(-std::abs(x)));
    res.grad.value[i] = (sigmoid(x) - t) * inv_n;
  }
  res.loss *= inv_n;
  return res;
}

std::size_t argmax(const double* values, std::size_t count) noexcept {
  std::size_t best = 0;
  for (std::size_t i = 1; i < count; ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

std::vector<int> argmax_rows(const Tensor& t) {
  const std::size_t n = t.rows();
  const std::size_t c = t.row_size();
  std::vector<int> out(n);
  for (std::size_t r = 0; r < n; ++r) out[r] = static_cast<int>(argmax(t.value.data() + r * c, c));
  return out;
}

}  // namespace scaloforge::nn
