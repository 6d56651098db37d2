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
#include <string>
#include <vector>

#include "scaloforge/features.hpp"
#include "scaloforge/nn/models.hpp"
#include "scaloforge/nn/optim.hpp"

namespace scaloforge::nn {

// A feature map with its labels; city is -1 when unknown.
struct LabeledMap {
  std::string id;
  int scene = 0;
  int city = -1;
  FeatureMap map;
};

struct TrainOptions {
  std::size_t max_epochs = 30;
  std::size_t batch_size = 64;
  AdamConfig adam;
  EarlyStopMode early_stop = EarlyStopMode::slow;
  std::uint64_t seed = 0;
};

struct CurvePoint {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double lr = 0.0;
};

struct TrainingCurve {
  std::vector<CurvePoint> points;
  std::string to_csv() const;
};

struct FitResult {
  TrainingCurve curve;
  std::size_t epochs_run = 0;
  std::size_t best_epoch = 0;
  double best_val_loss = 0.0;
};

// Minibatch Adam on the classifier's rows (frames or pooled segments),
// early-stopped on the validation loss (the training loss when `val` is
// empty). The parameters of the best epoch are restored on return.
FitResult fit_classifier(SceneClassifier& clf, const std::vector<LabeledMap>& train,
                         const std::vector<LabeledMap>& val, const TrainOptions& options);

// Rows the classifier sees for one map: every frame, or the time-mean.
Tensor classifier_rows(const FeatureMap& map, Granularity granularity);

// Segment log-probabilities: mean of per-frame log-softmax in frame mode,
// the head's log-softmax on the pooled input in segment mode.
std::vector<double> segment_log_probs(SceneClassifier& clf, const FeatureMap& map);

// Per-row class probabilities of the classifier rows of a map.
Tensor row_probabilities(SceneClassifier& clf, const FeatureMap& map);

int predict_scene(SceneClassifier& clf, const FeatureMap& map);

// Overall accuracy (correct segments / segments); 0 for an empty set.
double accuracy(SceneClassifier& clf, const std::vector<LabeledMap>& maps);

// Mean cross-entropy over all rows in evaluation mode.
double mean_loss(SceneClassifier& clf, const std::vector<LabeledMap>& maps);

}  // namespace scaloforge::nn
