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
#include <vector>

#include "scaloforge/nn/tensor.hpp"

namespace scaloforge::nn {

struct LossResult {
  double loss = 0.0;
  Tensor grad;  // d loss / d logits, same shape as the logits
};

// Row-wise numerically stable (log-)softmax of an N x C tensor.
Tensor softmax(const Tensor& logits);
Tensor log_softmax(const Tensor& logits);

// Mean cross-entropy over rows; grad = (softmax - onehot) / N.
// Labels outside [0, C) raise a label-range error.
LossResult softmax_cross_entropy(const Tensor& logits, const std::vector<int>& labels);

// Mean binary cross-entropy on logits with targets in {0, 1}.
LossResult sigmoid_cross_entropy(const Tensor& logits, const std::vector<double>& targets);

double sigmoid(double x) noexcept;

// Index of the largest element; ties resolve to the lowest index.
std::size_t argmax(const double* values, std::size_t count) noexcept;
std::vector<int> argmax_rows(const Tensor& t);

}  // namespace scaloforge::nn
