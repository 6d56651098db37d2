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
#include <string>
#include <string_view>
#include <vector>

namespace scaloforge::nn {

// Dense row-major array with an optional gradient buffer of the same shape.
// Layer outputs and upstream gradients travel as plain Tensors (values only);
// parameters keep their accumulated gradient in `grad`.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> value;
  std::vector<double> grad;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> dims, double fill = 0.0);

  std::size_t size() const noexcept { return value.size(); }
  std::size_t rows() const noexcept { return shape.empty() ? 0 : shape.front(); }
  std::size_t row_size() const noexcept { return rows() == 0 ? 0 : size() / rows(); }
  double& operator[](std::size_t i) { return value[i]; }
  double operator[](std::size_t i) const { return value[i]; }

  void zero_grad();
  std::string shape_string() const;
};

struct Parameter {
  std::string name;
  Tensor* tensor = nullptr;
};

std::size_t element_count(const std::vector<std::size_t>& shape) noexcept;

// Throws a shape error naming both shapes.
void require_shape(const Tensor& t, const std::vector<std::size_t>& expected, std::string_view what);
void require_row_size(const Tensor& t, std::size_t row_size, std::string_view what);

void zero_grads(const std::vector<Parameter>& params);

}  // namespace scaloforge::nn
