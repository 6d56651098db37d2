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
#include <string_view>
#include <vector>

#include "scaloforge/signal_io.hpp"

namespace scaloforge {

enum class SplitKind { fixed, random, city };

std::string_view to_string(SplitKind kind) noexcept;
SplitKind parse_split_kind(std::string_view text);

struct SplitStrategy {
  SplitKind kind = SplitKind::city;
  std::uint64_t seed = 0;
};

struct SubsetSplit {
  std::vector<std::size_t> train;  // ascending indices
  std::vector<std::size_t> test;
  std::uint64_t seed = 0;          // seed actually used for this iteration
};

// k-th element of the seed chain s_0 = mix(seed), s_{k+1} = mix(s_k).
std::uint64_t chain_seed(std::uint64_t seed, std::size_t k) noexcept;

// Splits items (given by their city index) into two halves for iteration k.
//   fixed  - one permutation from the strategy seed; halves swap on odd k
//   random - a fresh permutation from the k-th chain seed
//   city   - cities shuffled with the k-th chain seed, stably ordered by
//            descending size and each assigned to the currently smaller
//            subset, so no city lands in both
// The city strategy with fewer than two distinct cities raises a strategy
// error.
SubsetSplit split_dataset(const std::vector<int>& cities, const SplitStrategy& strategy, std::size_t k);
SubsetSplit split_dataset(const DatasetManifest& manifest, const SplitStrategy& strategy, std::size_t k);

}  // namespace scaloforge
