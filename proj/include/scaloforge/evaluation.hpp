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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "scaloforge/features.hpp"
#include "scaloforge/nn/models.hpp"
#include "scaloforge/signal_io.hpp"

namespace scaloforge {

// Segment log-probabilities of a normalized feature map; unnormalized input
// raises a contract error.
std::vector<double> segment_log_probability(nn::SceneClassifier& clf, const FeatureMap& map);

// Per-segment log-probabilities of one system. CSV: `id,logp_0,...,logp_{C-1}`
// with values printed to 17 significant digits.
struct LogProbTable {
  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows;

  std::size_t classes() const noexcept { return rows.empty() ? 0 : rows.front().size(); }
  std::string to_csv() const;
  static LogProbTable from_csv(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static LogProbTable load(const std::filesystem::path& path);
};

struct Predictions {
  std::vector<std::string> ids;
  std::vector<int> labels;

  // CSV: `id,scene_index,scene_label` (label column from the vocabulary when given).
  std::string to_csv(const std::vector<std::string>& vocabulary = {}) const;
};

// Argmax per row; ties resolve to the lowest class index.
Predictions predict(const LogProbTable& table);

// Weighted mean of the systems' log-probabilities followed by argmax. All
// tables must list the same ids in the same order (misalignment error
// otherwise). Weights default to uniform. Per-cell sums are accumulated in a
// canonical order so the result does not depend on the order of systems.
LogProbTable average_log_probs(const std::vector<LogProbTable>& systems, const std::vector<double>& weights = {});
Predictions fuse_average_voting(const std::vector<LogProbTable>& systems, const std::vector<double>& weights = {});

struct EvalReport {
  std::size_t classes = 0;
  std::size_t total = 0;
  double overall = 0.0;
  std::vector<double> classwise;  // NaN-free: classes without support report 0
  double classwise_mean = 0.0;
  std::vector<std::size_t> support;
  std::vector<std::vector<std::size_t>> confusion;  // [truth][prediction]
  std::optional<double> seen_accuracy;
  std::optional<double> unseen_accuracy;
  std::size_t seen_count = 0;
  std::size_t unseen_count = 0;

  nlohmann::json to_json() const;
  std::string confusion_csv(const std::vector<std::string>& vocabulary = {}) const;
};

// Core metric computation. `seen[i]` tells whether segment i's city occurs
// in the training data; pass an empty vector to skip the city breakdown.
EvalReport evaluate_labels(const std::vector<int>& truth, const std::vector<int>& predicted, std::size_t classes,
                           const std::vector<bool>& seen = {});

// Scores the predictions against the manifest's test entries (all entries
// when none is flagged test). Seen cities are those of the train entries.
// A test entry without a prediction raises a missing-prediction error.
EvalReport evaluate(const Predictions& predictions, const DatasetManifest& manifest);

}  // namespace scaloforge
