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


#include "scaloforge/split.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "scaloforge/error.hpp"
#include "scaloforge/random.hpp"

namespace scaloforge {

std::string_view to_string(SplitKind kind) noexcept {
  switch (kind) {
    case SplitKind::fixed: return "fixed";
    case SplitKind::random: return "random";
    case SplitKind::city: return "city";
  }
  return "unknown";
}

SplitKind parse_split_kind(std::string_view text) {
  if (text == "fixed") return SplitKind::fixed;
  if (text == "random") return SplitKind::random;
  if (text == "city") return SplitKind::city;
  fail(ErrorCode::strategy, "unknown split strategy '" + std::string(text) + "'");
}

std::uint64_t chain_seed(std::uint64_t seed, std::size_t k) noexcept {
  std::uint64_t s = mix_seed(seed);
  for (std::size_t i = 0; i < k; ++i) s = mix_seed(s);
  return s;
}

namespace {

SubsetSplit halves(std::size_t count, std::uint64_t seed, bool swap) {
  std::vector<std::size_t> order(count);
  for (std::size_t i = 0; i < count; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  SubsetSplit s;
  s.seed = seed;
  const std::size_t half = count / 2;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(half));
  s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(half), order.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  if (swap) std::swap(s.train, s.test);
  return s;
}

}  // namespace

SubsetSplit split_dataset(const std::vector<int>& cities, const SplitStrategy& strategy, std::size_t k) {
  switch (strategy.kind) {
    case SplitKind::fixed:
      return halves(cities.size(), strategy.seed, k % 2 == 1);
    case SplitKind::random:
      return halves(cities.size(), chain_seed(strategy.seed, k), false);
    case SplitKind::city:
      break;
  }
  std::map<int, std::size_t> sizes;
  for (int c : cities) ++sizes[c];
  if (sizes.size() < 2) {
    fail(ErrorCode::strategy, "city split needs at least 2 cities, found " + std::to_string(sizes.size()));
  }
  std::vector<std::pair<int, std::size_t>> order(sizes.begin(), sizes.end());
  SubsetSplit s;
  s.seed = chain_seed(strategy.seed, k);
  Rng rng(s.seed);
  rng.shuffle(order);
  std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::map<int, bool> to_train;
  std::size_t n_train = 0, n_test = 0;
  for (const auto& [city, size] : order) {
    const bool train = n_train <= n_test;
    to_train[city] = train;
    (train ? n_train : n_test) += size;
  }
  for (std::size_t i = 0; i < cities.size(); ++i) (to_train[cities[i]] ? s.train : s.test).push_back(i);
  return s;
}

SubsetSplit split_dataset(const DatasetManifest& manifest, const SplitStrategy& strategy, std::size_t k) {
  std::vector<int> cities;
  cities.reserve(manifest.entries.size());
  for (const ManifestEntry& e : manifest.entries) cities.push_back(static_cast<int>(e.city));
  return split_dataset(cities, strategy, k);
}

}  // namespace scaloforge
