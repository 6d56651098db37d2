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

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace scaloforge {

// Process exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;
inline constexpr int kExitConfig = 2;

struct CommandOptions {
  std::filesystem::path config;
  std::optional<std::filesystem::path> manifest;  // overrides paths.manifest
  std::filesystem::path out = ".";
};

// Each command writes its outputs under `out` plus a run record,
// run_<command>.json, listing the command, inputs, seeds and FNV-1a hashes
// of every output file.
// Diagnostics go to `log`. Return values are exit codes.
//
//   extract  - one feature file per manifest entry (features/<id>.sclf) and
//              normalization statistics fitted on the train entries
//   train    - per seed: models/clf_seed<s>.sclm and curve_seed<s>.csv
//   augment  - per seed: the augmentation scheme on the train entries,
//              audit_seed<s>.jsonl, accepted samples, models/aug_seed<s>.sclm
//   evaluate - per model: logprobs_<model>.csv, predictions, report and
//              confusion matrix on the test entries
//   fuse     - average voting over log-prob tables, fused predictions and,
//              with a manifest, a report
int cmd_extract(const CommandOptions& options, std::ostream& log);
int cmd_train(const CommandOptions& options, std::ostream& log);
int cmd_augment(const CommandOptions& options, std::ostream& log);
int cmd_evaluate(const CommandOptions& options, std::ostream& log);
int cmd_fuse(const CommandOptions& options, std::ostream& log);

// Dispatches by name; unknown commands are config errors.
int run_command(const std::string& name, const CommandOptions& options, std::ostream& log);

}  // namespace scaloforge
