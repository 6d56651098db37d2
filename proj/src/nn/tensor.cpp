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


#include "scaloforge/nn/tensor.hpp"

#include <algorithm>

#include "scaloforge/error.hpp"

namespace scaloforge::nn {

std::size_t element_count(const std::vector<std::size_t>& shape) noexcept {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return shape.empty() ? 0 : n;
}

Tensor::Tensor(std::vector<std::size_t> dims, double fill)
    : shape(std::move(dims)), value(element_count(shape), fill) {}

void Tensor::zero_grad() { grad.assign(value.size(), 0.0); }

std::string Tensor::shape_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

void require_shape(const Tensor& t, const std::vector<std::size_t>& expected, std::string_view what) {
  if (t.shape != expected) {
    Tensor probe;
    probe.shape = expected;
    fail(ErrorCode::shape, std::string(what) + ": got " + t.shape_string() + ", expected " + probe.shape_string());
  }
}

void require_row_size(const Tensor& t, std::size_t row_size, std::string_view what) {
  if (t.rows() == 0 || t.row_size() != row_size || t.rows() * row_size != t.size()) {
    fail(ErrorCode::shape, std::string(what) + ": got " + t.shape_string() + ", expected [N, " +
                               std::to_string(row_size) + "]");
  }
}

void zero_grads(const std::vector<Parameter>& params) {
  for (const auto& p : params) p.tensor->zero_grad();
}

}  // namespace scaloforge::nn
