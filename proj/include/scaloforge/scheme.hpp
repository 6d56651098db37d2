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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "scaloforge/acgan.hpp"
#include "scaloforge/nn/models.hpp"
#include "scaloforge/nn/training.hpp"
#include "scaloforge/sample_filter.hpp"
#include "scaloforge/split.hpp"

namespace scaloforge {

enum class FilterMode { framewise, segmentwise };

struct SchemeConfig {
  SplitStrategy split;
  std::size_t max_iterations = 10;
  std::size_t max_streak = 3;  // terminate once the rejection streak exceeds this
  nn::ClassifierConfig classifier;
  nn::TrainOptions subset_training{30, 64, {}, nn::EarlyStopMode::fast, 0};
  nn::TrainOptions final_training{60, 64, {}, nn::EarlyStopMode::slow, 0};
  AcganConfig acgan;
  FilterMode filter_mode = FilterMode::framewise;
  double margin = 0.03;
  std::size_t n_sample = 8;
  std::size_t t_sample = 10;
  double validation_fraction = 0.1;  // real-data holdout for the final classifier
  std::uint64_t seed = 0;
};

enum class Verdict { accept, reject };

struct IterationRecord {
  std::size_t k = 0;
  SplitKind strategy = SplitKind::city;
  std::uint64_t split_seed = 0;
  double acc_a = 0.0;
  std::optional<double> acc_b;  // empty when clf_B was never trained
  std::size_t n_filtered = 0;
  Verdict verdict = Verdict::reject;
  std::size_t streak = 0;  // rejection streak after this iteration
  std::string cause;       // why a rejection happened

  nlohmann::json to_json() const;
};

struct AugmentationState {
  std::size_t k = 0;
  std::vector<nn::LabeledMap> accepted;  // accumulated fake database
  std::vector<IterationRecord> records;
  std::size_t streak = 0;
  bool terminated = false;
  std::string termination_reason;

  // One JSON object per iteration, newline-terminated.
  std::string audit_trail() const;
};

// One pass of the scheme: split, train clf_A (fast early stop on the test
// subset) and the ACGAN on the training subset, filter generated samples
// through clf_A, train clf_B on training subset + new samples + previously
// accepted samples, and accept the new samples only if clf_B is strictly more
// accurate on the test subset. An empty filter result or a training
// divergence rejects the iteration.
void run_iteration(AugmentationState& state, const std::vector<nn::LabeledMap>& real, const SchemeConfig& config);

struct SchemeResult {
  AugmentationState state;
  std::unique_ptr<nn::SceneClassifier> classifier;
  nn::FitResult fit;
  bool no_augmentation = true;

  nlohmann::json report() const;
};

// Iterates until termination, then trains the final classifier (slow early
// stop, seeded validation holdout of the real data) on real + accepted
// samples.
SchemeResult run_scheme(const std::vector<nn::LabeledMap>& real, const SchemeConfig& config);

// Final-classifier training alone; with no fakes this is the
// no-augmentation baseline.
std::unique_ptr<nn::SceneClassifier> train_final_classifier(const std::vector<nn::LabeledMap>& real,
                                                            const std::vector<nn::LabeledMap>& fakes,
                                                            const SchemeConfig& config, nn::FitResult* fit = nullptr);

// Synthetic benchmark: Gaussian clusters, one per class on its own axis,
// observed in several cities whose recordings share a random city-specific
// mean shift. Each point is a
// one-frame, one-channel map of `dims` filters.
struct ClusterBenchmarkConfig {
  std::size_t classes = 4;
  std::size_t cities = 2;
  std::size_t dims = 8;
  std::size_t train = 2000;
  std::size_t test = 500;
  double class_separation = 2.0;  // distance of each class mean from the origin
  double city_shift = 0.5;        // std of the city mean shifts
  double spread = 1.0;            // within-cluster std
  std::uint64_t seed = 0;
};

struct ClusterBenchmark {
  std::vector<nn::LabeledMap> train;
  std::vector<nn::LabeledMap> test;
};

ClusterBenchmark make_cluster_benchmark(const ClusterBenchmarkConfig& config);

}  // namespace scaloforge
