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


#include <iostream>
#include <string>
#include <utility>

#include <CLI11.hpp>

#include "scaloforge/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"scaloforge: scalogram features and ACGAN-based data augmentation for acoustic scenes"};
  app.require_subcommand(1, 1);

  scaloforge::CommandOptions options;
  std::string manifest;
  const std::pair<const char*, const char*> commands[] = {
      {"extract", "Compute normalized feature maps for every manifest entry"},
      {"train", "Train one scene classifier per seed on the extracted features"},
      {"augment", "Run the iterative ACGAN augmentation scheme per seed"},
      {"evaluate", "Score trained models on the test split"},
      {"fuse", "Average-vote fusion of per-system log-probabilities"},
  };
  for (const auto& [name, description] : commands) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->add_option("--config", options.config, "Experiment config file")->required();
    sub->add_option("--manifest", manifest, "Dataset manifest (overrides paths.manifest)");
    sub->add_option("--out", options.out, "Output directory")->capture_default_str();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : scaloforge::kExitConfig;
  }
  if (!manifest.empty()) options.manifest = manifest;
  const std::string command = app.get_subcommands().front()->get_name();
  return scaloforge::run_command(command, options, std::cerr);
}
