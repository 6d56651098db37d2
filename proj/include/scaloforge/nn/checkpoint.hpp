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
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "scaloforge/nn/layers.hpp"
#include "scaloforge/nn/models.hpp"

namespace scaloforge::nn {

inline constexpr std::uint16_t kCheckpointVersion = 1;

// Versioned model checkpoint:
//   "SCLM" | u16 version | str model | str config-json | u32 #layers
//   | per layer: u8 kind, u32 #sizes, u32 sizes..., f64 scalar, u64 seed
//   | u32 #params | per param: str name, u32 count, f32 values...
//   | u32 CRC32 of everything before it
// Strings are a u32 byte length followed by the bytes; integers are
// little-endian.
struct Checkpoint {
  std::string model;
  nlohmann::json config;
  std::vector<LayerSpec> layers;
  std::vector<std::string> param_names;
  std::vector<std::vector<float>> param_values;
};

Checkpoint make_checkpoint(std::string model, nlohmann::json config, std::vector<LayerSpec> layers,
                           const std::vector<Parameter>& params);

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Copies checkpoint values into live parameters; names, counts and layer
// specs must match exactly.
void restore_parameters(const Checkpoint& ckpt, const std::vector<LayerSpec>& layers,
                        const std::vector<Parameter>& params);

Checkpoint checkpoint_of(SceneClassifier& clf);
std::unique_ptr<SceneClassifier> classifier_from_checkpoint(const Checkpoint& ckpt);
Checkpoint checkpoint_of(Generator& gen);
std::unique_ptr<Generator> generator_from_checkpoint(const Checkpoint& ckpt);

}  // namespace scaloforge::nn
