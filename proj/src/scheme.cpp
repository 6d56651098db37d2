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


#include "scaloforge/scheme.hpp"

#include <algorithm>
#include <cmath>

#include "scaloforge/error.hpp"
#include "scaloforge/nn/losses.hpp"
#include "scaloforge/random.hpp"

namespace scaloforge {
namespace {

std::uint64_t derive(std::uint64_t seed, std::size_t k, std::uint64_t salt) {
  return mix_seed(mix_seed(seed ^ salt) + static_cast<std::uint64_t>(k));
}

std::vector<nn::LabeledMap> pick(const std::vector<nn::LabeledMap>& maps, const std::vector<std::size_t>& idx) {
  std::vector<nn::LabeledMap> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(maps[i]);
  return out;
}

nn::SceneClassifier make_classifier(const SchemeConfig& config, std::uint64_t seed) {
  nn::ClassifierConfig c = config.classifier;
  c.seed = seed;
  return nn::SceneClassifier(c);
}

// Probability rows for whole segments (rows hold L*c*n values): the softmax
// of the segment log-probabilities, so each row is a distribution.
nn::Tensor segment_probabilities(nn::SceneClassifier& clf, const nn::Tensor& rows, const SampleFilterConfig& f) {
  const std::size_t classes = clf.config().classes;
  nn::Tensor out({rows.rows(), classes});
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    FeatureMap m(f.frames, f.channels, f.filters);
    std::copy_n(rows.value.data() + r * rows.row_size(), rows.row_size(), m.data.begin());
    const std::vector<double> lp = nn::segment_log_probs(clf, m);
    nn::Tensor logits({1, classes});
    logits.value = lp;
    const nn::Tensor p = nn::softmax(logits);
    std::copy_n(p.value.data(), classes, out.value.data() + r * classes);
  }
  return out;
}

}  // namespace

nlohmann::json IterationRecord::to_json() const {
  nlohmann::json j;
  j["k"] = k;
  j["strategy"] = std::string(to_string(strategy));
  j["split_seed"] = split_seed;
  j["acc_A"] = acc_a;
  j["acc_B"] = acc_b ? nlohmann::json(*acc_b) : nlohmann::json(nullptr);
  j["n_filtered"] = n_filtered;
  j["verdict"] = verdict == Verdict::accept ? "accept" : "reject";
  j["streak"] = streak;
  if (!cause.empty()) j["cause"] = cause;
  return j;
}

std::string AugmentationState::audit_trail() const {
  std::string out;
  for (const IterationRecord& r : records) out += r.to_json().dump() + "\n";
  return out;
}

void run_iteration(AugmentationState& state, const std::vector<nn::LabeledMap>& real, const SchemeConfig& config) {
  if (state.terminated) fail(ErrorCode::contract, "run_iteration called on a terminated scheme");
  if (real.empty()) fail(ErrorCode::invalid_argument, "run_iteration: no real samples");
  const std::size_t k = state.k;
  IterationRecord rec;
  rec.k = k;
  rec.strategy = config.split.kind;

  std::vector<int> cities;
  for (const nn::LabeledMap& m : real) cities.push_back(m.city);
  const SubsetSplit split = split_dataset(cities, config.split, k);
  rec.split_seed = split.seed;
  const std::vector<nn::LabeledMap> train = pick(real, split.train);
  const std::vector<nn::LabeledMap> test = pick(real, split.test);

  try {
    nn::TrainOptions opts = config.subset_training;
    opts.seed = derive(config.seed, k, 0xa);
    nn::SceneClassifier clf_a = make_classifier(config, derive(config.seed, k, 0xa1));
    nn::fit_classifier(clf_a, train, test, opts);
    rec.acc_a = nn::accuracy(clf_a, test);

    AcganConfig gan = config.acgan;
    gan.seed = derive(config.seed, k, 0x6a);
    AcganResult gans = train_acgan(train, config.classifier.classes, gan);

    const FeatureMap& shape = real.front().map;
    SampleFilterConfig fc{config.classifier.classes, config.margin, config.n_sample, config.t_sample,
                          shape.frames, shape.channels, shape.filters};
    std::vector<SampleSource> sources;
    Rng noise(derive(config.seed, k, 0x2));
    for (const auto& g : gans.generators) {
      nn::Generator* gen = g.get();
      const std::size_t per_row = config.filter_mode == FilterMode::framewise ? 1 : fc.frames;
      sources.push_back([gen, per_row, &noise](int scene, std::size_t count) {
        const std::size_t n = count * per_row;
        nn::Tensor frames = gen->forward(gen->sample_noise(n, noise), std::vector<int>(n, scene), false);
        nn::Tensor out({count, per_row * frames.row_size()});
        out.value = std::move(frames.value);
        return out;
      });
    }
    FilteredSamples lambda;
    if (config.filter_mode == FilterMode::framewise) {
      lambda = sample_filter_framewise([&](const nn::Tensor& rows) { return nn::softmax(clf_a.forward(rows, false)); },
                                       sources, fc);
    } else {
      lambda = sample_filter_segmentwise(
          [&](const nn::Tensor& rows) { return segment_probabilities(clf_a, rows, fc); }, sources, fc);
    }
    rec.n_filtered = lambda.size();

    if (lambda.size() == 0) {
      rec.verdict = Verdict::reject;
      rec.cause = "no sample passed the filter";
    } else {
      std::vector<nn::LabeledMap> fakes;
      for (std::size_t i = 0; i < lambda.size(); ++i) {
        nn::LabeledMap m;
        m.id = "fake-" + std::to_string(k) + "-" + std::to_string(i);
        m.scene = lambda.scenes[i];
        m.city = -1;
        m.map = std::move(lambda.maps[i]);
        m.map.channel_mode = shape.channel_mode;
        fakes.push_back(std::move(m));
      }
      std::vector<nn::LabeledMap> train_b = train;
      train_b.insert(train_b.end(), fakes.begin(), fakes.end());
      train_b.insert(train_b.end(), state.accepted.begin(), state.accepted.end());
      opts.seed = derive(config.seed, k, 0xb);
      nn::SceneClassifier clf_b = make_classifier(config, derive(config.seed, k, 0xb1));
      nn::fit_classifier(clf_b, train_b, test, opts);
      rec.acc_b = nn::accuracy(clf_b, test);
      if (*rec.acc_b > rec.acc_a) {
        rec.verdict = Verdict::accept;
        state.accepted.insert(state.accepted.end(), std::make_move_iterator(fakes.begin()),
                              std::make_move_iterator(fakes.end()));
      } else {
        rec.verdict = Verdict::reject;
        rec.cause = "clf_B not more accurate than clf_A";
      }
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::divergence && e.code() != ErrorCode::collapse) throw;
    rec.verdict = Verdict::reject;
    rec.cause = e.what();
  }

  state.streak = rec.verdict == Verdict::accept ? 0 : state.streak + 1;
  rec.streak = state.streak;
  state.records.push_back(std::move(rec));
  state.k = k + 1;
  if (state.streak > config.max_streak) {
    state.terminated = true;
    state.termination_reason = "rejection streak exceeded " + std::to_string(config.max_streak);
  } else if (state.k >= config.max_iterations) {
    state.terminated = true;
    state.termination_reason = "maximum iterations reached";
  }
}

std::unique_ptr<nn::SceneClassifier> train_final_classifier(const std::vector<nn::LabeledMap>& real,
                                                            const std::vector<nn::LabeledMap>& fakes,
                                                            const SchemeConfig& config, nn::FitResult* fit) {
  std::vector<std::size_t> order(real.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(derive(config.seed, 0, 0xf1));
  rng.shuffle(order);
  const auto n_val = static_cast<std::size_t>(std::floor(config.validation_fraction * static_cast<double>(real.size())));
  std::vector<std::size_t> val_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<std::size_t> train_idx(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
  std::sort(val_idx.begin(), val_idx.end());
  std::sort(train_idx.begin(), train_idx.end());
  std::vector<nn::LabeledMap> train = pick(real, train_idx);
  train.insert(train.end(), fakes.begin(), fakes.end());
  const std::vector<nn::LabeledMap> val = pick(real, val_idx);
  auto clf = std::make_unique<nn::SceneClassifier>(make_classifier(config, derive(config.seed, 0, 0xf2)));
  nn::TrainOptions opts = config.final_training;
  opts.seed = derive(config.seed, 0, 0xf3);
  nn::FitResult r = nn::fit_classifier(*clf, train, val, opts);
  if (fit != nullptr) *fit = std::move(r);
  return clf;
}

SchemeResult run_scheme(const std::vector<nn::LabeledMap>& real, const SchemeConfig& config) {
  SchemeResult result;
  while (!result.state.terminated) run_iteration(result.state, real, config);
  result.no_augmentation = result.state.accepted.empty();
  result.classifier = train_final_classifier(real, result.state.accepted, config, &result.fit);
  return result;
}

nlohmann::json SchemeResult::report() const {
  nlohmann::json j;
  j["iterations"] = state.records.size();
  j["accepted_samples"] = state.accepted.size();
  j["no_augmentation"] = no_augmentation;
  j["termination_reason"] = state.termination_reason;
  j["final_epochs"] = fit.epochs_run;
  j["final_best_val_loss"] = fit.best_val_loss;
  nlohmann::json trail = nlohmann::json::array();
  for (const IterationRecord& r : state.records) trail.push_back(r.to_json());
  j["audit_trail"] = std::move(trail);
  return j;
}

ClusterBenchmark make_cluster_benchmark(const ClusterBenchmarkConfig& config) {
  if (config.classes < 2 || config.cities < 1 || config.dims == 0) {
    fail(ErrorCode::invalid_argument, "cluster benchmark: need >= 2 classes, >= 1 city and dims > 0");
  }
  Rng rng(mix_seed(config.seed ^ 0xc157eu));
  // Class means sit on the coordinate axes (alternating sign once the axes
  // run out) so the class geometry does not depend on the seed.
  std::vector<std::vector<double>> class_means(config.classes, std::vector<double>(config.dims, 0.0));
  for (std::size_t c = 0; c < config.classes; ++c) {
    const double sign = (c / config.dims) % 2 == 0 ? 1.0 : -1.0;
    class_means[c][c % config.dims] = sign * config.class_separation;
  }
  std::vector<std::vector<double>> city_shift(config.cities, std::vector<double>(config.dims));
  for (auto& m : city_shift) {
    for (double& v : m) v = config.city_shift * rng.normal();
  }
  auto make = [&](std::size_t count, const char* prefix) {
    std::vector<nn::LabeledMap> out;
    for (std::size_t i = 0; i < count; ++i) {
      nn::LabeledMap m;
      m.id = std::string(prefix) + "-" + std::to_string(i);
      m.scene = static_cast<int>(i % config.classes);
      m.city = static_cast<int>(rng.below(config.cities));
      m.map = FeatureMap(1, 1, config.dims);
      m.map.kind = FeatureKind::synthetic;
      m.map.normalized = true;
      for (std::size_t d = 0; d < config.dims; ++d) {
        m.map.data[d] = class_means[static_cast<std::size_t>(m.scene)][d] +
                        city_shift[static_cast<std::size_t>(m.city)][d] + config.spread * rng.normal();
      }
      out.push_back(std::move(m));
    }
    return out;
  };
  ClusterBenchmark b;
  b.train = make(config.train, "train");
  b.test = make(config.test, "test");
  return b;
}

}  // namespace scaloforge
