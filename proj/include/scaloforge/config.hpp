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

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "scaloforge/features.hpp"
#include "scaloforge/kernels.hpp"
#include "scaloforge/nn/models.hpp"
#include "scaloforge/nn/training.hpp"
#include "scaloforge/scheme.hpp"

namespace scaloforge {

// Flat TOML-style document: `[section]` headers, `key = value` lines,
// `#` comments. Values are quoted strings, bare words, numbers, booleans or
// one-line `[a, b, c]` arrays. Keys are stored with their section prefix
// (`feature.kind`).
struct FlatConfig {
  std::map<std::string, std::string> values;  // raw value text
  std::map<std::string, int> lines;           // source line per key
};

FlatConfig parse_flat_config(std::string_view text);

struct ExperimentConfig {
  FeatureConfig feature;
  ChannelMode channel_mode = ChannelMode::ave_diff;
  Exec exec = Exec::parallel;

  nn::ClassifierConfig classifier;
  bool city_branch = false;
  nn::TrainOptions training{60, 64, {}, nn::EarlyStopMode::slow, 0};
  double validation_fraction = 0.1;

  SchemeConfig augment;

  std::vector<std::uint64_t> seeds{1, 2, 3};

  std::filesystem::path manifest;  // may be overridden on the command line
  std::filesystem::path features;  // relative to the output directory when not absolute
  std::filesystem::path models;
  std::vector<std::filesystem::path> fuse_systems;  // log-prob tables; empty = all in the output dir
  std::filesystem::path base_dir;                   // directory of the config file
};

// Builds the experiment from a flat config. Unknown keys, malformed values
// and repeated seeds raise config errors naming the field path.
ExperimentConfig experiment_from_flat(const FlatConfig& flat, const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment(const std::filesystem::path& path);

// Every accepted key, for documentation and validation.
const std::vector<std::string_view>& known_config_keys();

}  // namespace scaloforge
