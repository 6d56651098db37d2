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


#include "scaloforge/nn/training.hpp"

#include <cmath>
#include <cstdio>

#include "scaloforge/error.hpp"
#include "scaloforge/nn/losses.hpp"
#include "scaloforge/random.hpp"

namespace scaloforge::nn {
namespace {

struct RowSet {
  std::vector<double> data;
  std::vector<int> scenes;
  std::vector<int> cities;
  std::size_t width = 0;
  bool all_cities = true;

  std::size_t size() const { return scenes.size(); }
};

RowSet gather_rows(const std::vector<LabeledMap>& maps, Granularity g, std::size_t width) {
  RowSet set;
  set.width = width;
  for (const LabeledMap& m : maps) {
    Tensor rows = classifier_rows(m.map, g);
    require_row_size(rows, width, "training map " + m.id);
    set.data.insert(set.data.end(), rows.value.begin(), rows.value.end());
    for (std::size_t r = 0; r < rows.rows(); ++r) {
      set.scenes.push_back(m.scene);
      set.cities.push_back(m.city);
      if (m.city < 0) set.all_cities = false;
    }
  }
  return set;
}

Tensor batch_of(const RowSet& set, const std::vector<std::size_t>& order, std::size_t begin, std::size_t end,
                std::vector<int>& scenes, std::vector<int>& cities) {
  Tensor x({end - begin, set.width});
  scenes.clear();
  cities.clear();
  for (std::size_t i = begin; i < end; ++i) {
    const std::size_t r = order[i];
    std::copy_n(set.data.data() + r * set.width, set.width, x.value.data() + (i - begin) * set.width);
    scenes.push_back(set.scenes[r]);
    cities.push_back(set.cities[r]);
  }
  return x;
}

double rows_loss(SceneClassifier& clf, const RowSet& set) {
  if (set.size() == 0) return 0.0;
  constexpr std::size_t kChunk = 512;
  double total = 0.0;
  std::vector<std::size_t> order(set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<int> scenes, cities;
  for (std::size_t b = 0; b < set.size(); b += kChunk) {
    const std::size_t e = std::min(set.size(), b + kChunk);
    Tensor x = batch_of(set, order, b, e, scenes, cities);
    Tensor logp = clf.log_probs(x);
    const std::size_t c = logp.row_size();
    for (std::size_t r = 0; r < scenes.size(); ++r) {
      total -= logp.value[r * c + static_cast<std::size_t>(scenes[r])];
    }
  }
  return total / static_cast<double>(set.size());
}

std::vector<std::vector<double>> snapshot(const std::vector<Parameter>& params) {
  std::vector<std::vector<double>> s;
  for (const Parameter& p : params) s.push_back(p.tensor->value);
  return s;
}

}  // namespace

std::string TrainingCurve::to_csv() const {
  std::string out = "epoch,train_loss,val_loss,lr\n";
  char line[128];
  for (const CurvePoint& p : points) {
    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g\n", p.epoch, p.train_loss, p.val_loss, p.lr);
    out += line;
  }
  return out;
}

Tensor classifier_rows(const FeatureMap& map, Granularity granularity) {
  const std::size_t width = map.frame_size();
  if (map.frames == 0) fail(ErrorCode::shape, "feature map has no frames");
  if (granularity == Granularity::frame) {
    Tensor x({map.frames, width});
    x.value = map.data;
    return x;
  }
  Tensor x({1, width});
  for (std::size_t t = 0; t < map.frames; ++t) {
    for (std::size_t i = 0; i < width; ++i) x.value[i] += map.data[t * width + i];
  }
  for (double& v : x.value) v /= static_cast<double>(map.frames);
  return x;
}

FitResult fit_classifier(SceneClassifier& clf, const std::vector<LabeledMap>& train,
                         const std::vector<LabeledMap>& val, const TrainOptions& options) {
  if (train.empty()) fail(ErrorCode::invalid_argument, "fit_classifier: empty training set");
  if (options.batch_size == 0 || options.max_epochs == 0) {
    fail(ErrorCode::invalid_argument, "fit_classifier: batch size and epochs must be positive");
  }
  const Granularity g = clf.config().granularity;
  const std::size_t width = clf.config().input_size();
  const RowSet train_rows = gather_rows(train, g, width);
  const RowSet val_rows = gather_rows(val, g, width);
  const bool use_city = clf.config().cities > 0 && train_rows.all_cities;

  std::vector<Parameter> params = clf.parameters();
  zero_grads(params);
  Adam adam(options.adam);
  EarlyStopPolicy policy(options.early_stop);
  Rng rng(mix_seed(options.seed ^ 0x7a1du));

  FitResult result;
  std::vector<std::vector<double>> best = snapshot(params);
  std::vector<std::size_t> order(train_rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<int> scenes, cities;

  for (std::size_t epoch = 1; epoch <= options.max_epochs; ++epoch) {
    rng.shuffle(order);
    double train_loss = 0.0;
    for (std::size_t b = 0; b < order.size(); b += options.batch_size) {
      const std::size_t e = std::min(order.size(), b + options.batch_size);
      Tensor x = batch_of(train_rows, order, b, e, scenes, cities);
      SceneClassifier::Losses l = clf.accumulate_gradients(x, scenes, use_city ? &cities : nullptr, true);
      train_loss += l.scene * static_cast<double>(e - b);
      adam.step(params);
      zero_grads(params);
    }
    train_loss /= static_cast<double>(order.size());
    const double val_loss = val_rows.size() > 0 ? rows_loss(clf, val_rows) : rows_loss(clf, train_rows);
    result.curve.points.push_back({epoch, train_loss, val_loss, adam.learning_rate()});
    result.epochs_run = epoch;
    const EarlyStopAction action = policy.update(val_loss);
    if (policy.improved_last()) {
      best = snapshot(params);
      result.best_epoch = epoch;
      result.best_val_loss = val_loss;
    }
    if (action == EarlyStopAction::stop) break;
    if (action == EarlyStopAction::halve_lr) adam.set_learning_rate(adam.learning_rate() * 0.5);
  }
  for (std::size_t i = 0; i < params.size(); ++i) params[i].tensor->value = best[i];
  return result;
}

Tensor row_probabilities(SceneClassifier& clf, const FeatureMap& map) {
  return softmax(clf.forward(classifier_rows(map, clf.config().granularity), false));
}

std::vector<double> segment_log_probs(SceneClassifier& clf, const FeatureMap& map) {
  const Tensor logp = clf.log_probs(classifier_rows(map, clf.config().granularity));
  const std::size_t c = logp.row_size();
  std::vector<double> out(c, 0.0);
  for (std::size_t r = 0; r < logp.rows(); ++r) {
    for (std::size_t j = 0; j < c; ++j) out[j] += logp.value[r * c + j];
  }
  for (double& v : out) v /= static_cast<double>(logp.rows());
  return out;
}

int predict_scene(SceneClassifier& clf, const FeatureMap& map) {
  const std::vector<double> lp = segment_log_probs(clf, map);
  return static_cast<int>(argmax(lp.data(), lp.size()));
}

double accuracy(SceneClassifier& clf, const std::vector<LabeledMap>& maps) {
  if (maps.empty()) return 0.0;
  std::size_t correct = 0;
  for (const LabeledMap& m : maps) {
    if (predict_scene(clf, m.map) == m.scene) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(maps.size());
}

double mean_loss(SceneClassifier& clf, const std::vector<LabeledMap>& maps) {
  return rows_loss(clf, gather_rows(maps, clf.config().granularity, clf.config().input_size()));
}

}  // namespace scaloforge::nn
