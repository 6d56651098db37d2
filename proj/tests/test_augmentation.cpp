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


#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "gradcheck.hpp"
#include "scaloforge/acgan.hpp"
#include "scaloforge/error.hpp"
#include "scaloforge/nn/checkpoint.hpp"
#include "scaloforge/sample_filter.hpp"
#include "scaloforge/scheme.hpp"
#include "scaloforge/split.hpp"

namespace scaloforge {
namespace {

using testing::max_relative_error;
using testing::numeric_gradient;
using testing::random_tensor;

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::io;
}

std::vector<int> random_labels(std::size_t n, std::size_t classes, Rng& rng) {
  std::vector<int> out(n);
  for (int& y : out) y = static_cast<int>(rng.below(classes));
  return out;
}

// ---------------------------------------------------------------- losses

TEST(AcganLosses, UndecidedDiscriminatorCostsTwoLogTwoPerPair) {
  const std::vector<double> half(5, 0.5);
  EXPECT_NEAR(acgan_source_loss(half, half), 5 * 2.0 * std::log(2.0), 1e-12);
  EXPECT_NEAR(acgan_source_loss({1.0}, {0.0}), 2.0 * -std::log(1.0 - kProbClamp), 1e-15);
  EXPECT_NEAR(acgan_source_loss({0.0}, {}), -std::log(kProbClamp), 1e-9);
}

TEST(AcganLosses, SceneLossIsNegativeLogLikelihoodOfBothBatches) {
  nn::Tensor p_real({2, 2}), p_fake({2, 2});
  p_real.value = {0.25, 0.75, 0.5, 0.5};
  p_fake.value = {0.9, 0.1, 0.2, 0.8};
  const double expected = -std::log(0.75) - std::log(0.1) - std::log(0.5) - std::log(0.2);
  EXPECT_NEAR(acgan_scene_loss(p_real, p_fake, {1, 0}), expected, 1e-12);
  EXPECT_EQ(code_of([&] { acgan_scene_loss(p_real, p_fake, {1, 2}); }), ErrorCode::label_range);
  EXPECT_EQ(code_of([&] { acgan_scene_loss(p_real, p_fake, {1}); }), ErrorCode::shape);
}

TEST(AcganLosses, ClampKeepsProbabilitiesAwayFromZeroAndOne) {
  EXPECT_EQ(clamp_probability(0.0), kProbClamp);
  EXPECT_EQ(clamp_probability(1.0), 1.0 - kProbClamp);
  EXPECT_EQ(clamp_probability(0.3), 0.3);
}

TEST(AcganLosses, ObjectiveAgreesWithTheLossHelpers) {
  Rng rng(3);
  nn::Discriminator d({4, 3, 5, 0.2, 9});
  const nn::Tensor real = random_tensor({3, 4}, rng), fake = random_tensor({3, 4}, rng);
  const auto labels = random_labels(3, 3, rng);
  auto probs = [&](const nn::Tensor& x, std::vector<double>& source, nn::Tensor& scene) {
    const auto o = d.forward(x, false);
    source.clear();
    for (double v : o.source_logit.value) source.push_back(nn::sigmoid(v));
    scene = nn::softmax(o.scene_logits);
  };
  std::vector<double> sr, sf;
  nn::Tensor pr, pf;
  probs(real, sr, pr);
  probs(fake, sf, pf);
  const AcganBatchLoss loss = discriminator_objective(d, real, labels, fake, labels, 0.2);
  EXPECT_NEAR(loss.source, acgan_source_loss(sr, sf), 1e-12);
  EXPECT_NEAR(loss.scene, acgan_scene_loss(pr, pf, labels), 1e-12);
  EXPECT_NEAR(loss.total(), loss.source + 0.2 * loss.scene, 1e-15);
}

// ---------------------------------------------------------------- gradients

TEST(AcganGradients, DiscriminatorObjective) {
  for (int i = 0; i < 10; ++i) {
    Rng rng(20 + i);
    const double gamma = 0.1 + 0.1 * i;
    nn::Discriminator d({4, 3, 6, 0.2, 30 + static_cast<std::uint64_t>(i)});
    const nn::Tensor real = random_tensor({4, 4}, rng), fake = random_tensor({3, 4}, rng);
    const auto rl = random_labels(4, 3, rng), fl = random_labels(3, 3, rng);
    const auto params = d.parameters();
    nn::zero_grads(params);
    discriminator_objective(d, real, rl, fake, fl, gamma);
    std::vector<std::vector<double>> analytic;
    for (const auto& p : params) analytic.push_back(p.tensor->grad);
    auto total = [&] { return discriminator_objective(d, real, rl, fake, fl, gamma).total(); };
    double worst = 0.0;
    for (std::size_t k = 0; k < params.size(); ++k) {
      worst = std::max(worst, max_relative_error(analytic[k], numeric_gradient(params[k].tensor->value, total)));
    }
    EXPECT_LT(worst, 1e-4) << "instance " << i;
  }
}

TEST(AcganGradients, GeneratorObjectiveWithRespectToFakes) {
  for (int i = 0; i < 10; ++i) {
    Rng rng(40 + i);
    const double gamma = 0.2 + 0.1 * i;
    nn::Discriminator d({5, 4, 6, 0.2, 50 + static_cast<std::uint64_t>(i)});
    nn::Tensor fake = random_tensor({3, 5}, rng);
    const auto labels = random_labels(3, 4, rng);
    nn::Tensor grad;
    generator_objective(d, fake, labels, gamma, grad);
    nn::Tensor scratch;
    auto loss = [&] { return generator_objective(d, fake, labels, gamma, scratch); };
    EXPECT_LT(max_relative_error(grad.value, numeric_gradient(fake.value, loss)), 1e-4) << "instance " << i;
  }
}

TEST(AcganTraining, CheckpointEpochsFollowTheFractions) {
  AcganConfig c;
  c.epochs = 20;
  EXPECT_EQ(checkpoint_epochs(c), (std::vector<std::size_t>{14, 16, 18, 20}));
  c.epochs = 2;
  EXPECT_EQ(checkpoint_epochs(c), (std::vector<std::size_t>{1, 2}));
}

TEST(AcganTraining, IsDeterministicAndSnapshotsAtTheCheckpointEpochs) {
  const ClusterBenchmark b = make_cluster_benchmark({3, 2, 4, 90, 10, 2.0, 0.5, 0.5, 4});
  AcganConfig c;
  c.epochs = 5;
  c.batch_size = 16;
  c.hidden = 12;
  c.noise_dim = 4;
  c.seed = 8;
  const AcganResult r1 = train_acgan(b.train, 3, c);
  const AcganResult r2 = train_acgan(b.train, 3, c);
  EXPECT_EQ(r1.snapshot_epochs, checkpoint_epochs(c));
  ASSERT_EQ(r1.generators.size(), r1.snapshot_epochs.size());
  ASSERT_EQ(r1.epoch_losses.size(), 5u);
  for (std::size_t i = 0; i < r1.generators.size(); ++i) {
    EXPECT_EQ(nn::encode_checkpoint(nn::checkpoint_of(*r1.generators[i])),
              nn::encode_checkpoint(nn::checkpoint_of(*r2.generators[i])));
  }
  for (const auto& l : r1.epoch_losses) EXPECT_TRUE(std::isfinite(l.total()));
  EXPECT_EQ(code_of([&] { train_acgan({}, 3, c); }), ErrorCode::invalid_argument);
}

// ---------------------------------------------------------------- sample filter

// Rows carry their own target probability in column 0 and their scene in
// column 1; the scorer reads them back, so every filter decision is known.
struct StubWorld {
  std::size_t classes;
  double margin;
  Rng rng{77};

  SampleSource source(std::size_t width, double boundary_rate) {
    return [this, width, boundary_rate](int scene, std::size_t count) {
      nn::Tensor t({count, width});
      const double centre = 1.0 / static_cast<double>(classes);
      for (std::size_t i = 0; i < count; ++i) {
        double p = centre + rng.uniform(-2.0, 2.0) * margin;
        if (rng.uniform() < boundary_rate) p = rng.uniform() < 0.5 ? centre - margin : centre + margin;
        t.value[i * width] = p;
        t.value[i * width + 1] = scene;
      }
      return t;
    };
  }

  ProbabilityScorer scorer() const {
    return [this](const nn::Tensor& rows) {
      nn::Tensor probs({rows.rows(), classes});
      for (std::size_t i = 0; i < rows.rows(); ++i) {
        const double p = rows.value[i * rows.row_size()];
        const auto z = static_cast<std::size_t>(rows.value[i * rows.row_size() + 1]);
        for (std::size_t c = 0; c < classes; ++c) {
          probs.value[i * classes + c] = c == z ? p : (1.0 - p) / static_cast<double>(classes - 1);
        }
      }
      return probs;
    };
  }
};

TEST(SampleFilter, MarginIsAnOpenInterval) {
  EXPECT_TRUE(within_margin(0.5, 2, 0.25));
  EXPECT_FALSE(within_margin(0.25, 2, 0.25));
  EXPECT_FALSE(within_margin(0.75, 2, 0.25));
  EXPECT_FALSE(within_margin(0.1, 10, 0.0));
}

TEST(SampleFilter, FramewiseRetainsOnlyFramesInsideTheMargin) {
  // 2 classes, margin 1/4: both interval ends are exact in binary.
  StubWorld world{2, 0.25};
  SampleFilterConfig cfg;
  cfg.classes = 2;
  cfg.margin = 0.25;
  cfg.n_sample = 8;
  cfg.t_sample = 10;
  cfg.frames = 1250;  // quota = 1250 * 8 = 10^4 frames per scene
  cfg.channels = 1;
  cfg.filters = 2;
  const FilteredSamples out = sample_filter_framewise(world.scorer(), {world.source(2, 0.1)}, cfg);
  EXPECT_EQ(out.stats.quota, 10000u);
  ASSERT_EQ(out.size(), 16u);
  for (std::size_t s = 0; s < out.size(); ++s) {
    EXPECT_EQ(out.maps[s].frames, 1250u);
    EXPECT_EQ(out.maps[s].kind, FeatureKind::synthetic);
    for (std::size_t t = 0; t < 1250; ++t) {
      const double p = out.maps[s].at(t, 0, 0);
      EXPECT_GT(p, 0.25);
      EXPECT_LT(p, 0.75);
      EXPECT_EQ(out.maps[s].at(t, 0, 1), out.scenes[s]);
    }
  }
  for (std::size_t z = 0; z < 2; ++z) {
    EXPECT_EQ(out.stats.retained[z][0], 10000u);
    EXPECT_LE(out.stats.attempts[z][0], cfg.t_sample);
    EXPECT_EQ(out.stats.generated[z][0], 10000u * out.stats.attempts[z][0]);
  }
}

TEST(SampleFilter, FramewiseRespectsRoundAndSampleCaps) {
  StubWorld world{4, 0.03};
  SampleFilterConfig cfg;
  cfg.classes = 4;
  cfg.margin = 0.03;
  cfg.n_sample = 5;
  cfg.t_sample = 2;
  cfg.frames = 7;
  cfg.channels = 1;
  cfg.filters = 3;
  const std::vector<SampleSource> gens{world.source(3, 0.0), world.source(3, 0.0), world.source(3, 0.0)};
  const FilteredSamples out = sample_filter_framewise(world.scorer(), gens, cfg);
  EXPECT_EQ(out.stats.quota, 7u * 5u / 3u);
  std::vector<std::size_t> per_scene(4, 0);
  for (int z : out.scenes) ++per_scene[static_cast<std::size_t>(z)];
  for (std::size_t z = 0; z < 4; ++z) {
    std::size_t kept = 0;
    for (std::size_t g = 0; g < 3; ++g) {
      EXPECT_LE(out.stats.attempts[z][g], 2u);
      EXPECT_LE(out.stats.retained[z][g], out.stats.quota);
      kept += out.stats.retained[z][g];
    }
    EXPECT_EQ(per_scene[z], kept / 7);
    EXPECT_LE(per_scene[z], cfg.n_sample);
  }
}

TEST(SampleFilter, ZeroMarginRetainsNothing) {
  StubWorld world{4, 0.03};
  SampleFilterConfig cfg{4, 0.0, 8, 3, 4, 1, 2};
  const FilteredSamples out = sample_filter_framewise(world.scorer(), {world.source(2, 0.0)}, cfg);
  EXPECT_EQ(out.size(), 0u);
  for (const auto& row : out.stats.attempts) EXPECT_EQ(row[0], 3u);
}

TEST(SampleFilter, SegmentwiseSplitsTheQuotaAcrossGenerators) {
  StubWorld world{3, 0.1};
  SampleFilterConfig cfg{3, 0.1, 8, 4, 2, 1, 2};
  auto accept_all = [](const nn::Tensor& rows) { return nn::Tensor({rows.rows(), 3}, 1.0 / 3.0); };
  const std::vector<SampleSource> gens{world.source(4, 0.0), world.source(4, 0.0), world.source(4, 0.0)};
  const FilteredSamples all = sample_filter_segmentwise(accept_all, gens, cfg);
  ASSERT_EQ(all.size(), 24u);
  for (std::size_t z = 0; z < 3; ++z) {
    EXPECT_EQ(all.stats.retained[z], (std::vector<std::size_t>{3, 3, 2}));
    EXPECT_EQ(all.stats.attempts[z], (std::vector<std::size_t>{1, 1, 1}));
  }
  const FilteredSamples some = sample_filter_segmentwise(world.scorer(), gens, cfg);
  for (std::size_t i = 0; i < some.size(); ++i) {
    const double p = some.maps[i].data[0];
    EXPECT_TRUE(p > 1.0 / 3.0 - 0.1 && p < 1.0 / 3.0 + 0.1);
  }
}

TEST(SampleFilter, RejectsBadConfigurationAndShapes) {
  StubWorld world{4, 0.03};
  SampleFilterConfig cfg{4, 0.3, 8, 3, 4, 1, 2};  // margin above 1/C
  EXPECT_EQ(code_of([&] { sample_filter_framewise(world.scorer(), {world.source(2, 0.0)}, cfg); }),
            ErrorCode::invalid_argument);
  cfg.margin = 0.03;
  EXPECT_EQ(code_of([&] { sample_filter_framewise(world.scorer(), {}, cfg); }), ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([&] { sample_filter_framewise(world.scorer(), {world.source(5, 0.0)}, cfg); }),
            ErrorCode::shape);
}

// ---------------------------------------------------------------- splits

bool is_partition(const SubsetSplit& s, std::size_t n) {
  std::vector<std::size_t> all = s.train;
  all.insert(all.end(), s.test.begin(), s.test.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (all[i] != i) return false;
  }
  return all.size() == n && std::is_sorted(s.train.begin(), s.train.end()) &&
         std::is_sorted(s.test.begin(), s.test.end());
}

TEST(Split, FixedSwapsHalvesOnOddIterations) {
  const std::vector<int> cities(21, 0);
  const SplitStrategy st{SplitKind::fixed, 4};
  const SubsetSplit s0 = split_dataset(cities, st, 0), s1 = split_dataset(cities, st, 1),
                    s2 = split_dataset(cities, st, 2);
  EXPECT_TRUE(is_partition(s0, 21));
  EXPECT_EQ(s1.train, s0.test);
  EXPECT_EQ(s1.test, s0.train);
  EXPECT_EQ(s2.train, s0.train);
  EXPECT_LE(std::max(s0.train.size(), s0.test.size()) - std::min(s0.train.size(), s0.test.size()), 1u);
}

TEST(Split, RandomDrawsAFreshPartitionEachIteration) {
  const std::vector<int> cities(40, 0);
  const SplitStrategy st{SplitKind::random, 9};
  const SubsetSplit a = split_dataset(cities, st, 0), b = split_dataset(cities, st, 1);
  EXPECT_TRUE(is_partition(a, 40));
  EXPECT_TRUE(is_partition(b, 40));
  EXPECT_NE(a.train, b.train);
  EXPECT_EQ(split_dataset(cities, st, 1).train, b.train);
  EXPECT_EQ(a.seed, chain_seed(9, 0));
  EXPECT_EQ(b.seed, chain_seed(9, 1));
}

TEST(Split, CitiesNeverStraddleTheHalves) {
  Rng rng(5);
  std::vector<int> cities(300);
  for (int& c : cities) c = static_cast<int>(rng.below(7));
  for (std::size_t k = 0; k < 10; ++k) {
    const SubsetSplit s = split_dataset(cities, {SplitKind::city, 3}, k);
    EXPECT_TRUE(is_partition(s, 300));
    std::set<int> a, b;
    for (std::size_t i : s.train) a.insert(cities[i]);
    for (std::size_t i : s.test) b.insert(cities[i]);
    for (int c : a) EXPECT_FALSE(b.count(c)) << "city " << c << " at k=" << k;
    EXPECT_FALSE(s.train.empty());
    EXPECT_FALSE(s.test.empty());
  }
}

TEST(Split, CityStrategyNeedsTwoCities) {
  EXPECT_EQ(code_of([] { split_dataset(std::vector<int>(10, 2), {SplitKind::city, 0}, 0); }), ErrorCode::strategy);
  EXPECT_EQ(code_of([] { parse_split_kind("alphabetical"); }), ErrorCode::strategy);
  EXPECT_EQ(parse_split_kind("city"), SplitKind::city);
  EXPECT_EQ(to_string(SplitKind::fixed), "fixed");
}

// ---------------------------------------------------------------- scheme

SchemeConfig tiny_scheme(std::uint64_t seed) {
  SchemeConfig c;
  c.split = {SplitKind::city, seed};
  c.max_iterations = 3;
  c.classifier.channels = 1;
  c.classifier.filters = 8;
  c.classifier.classes = 3;
  c.classifier.hidden = 8;
  c.classifier.dropout = 0.0;
  c.subset_training = {3, 32, {}, nn::EarlyStopMode::fast, 0};
  c.final_training = {3, 32, {}, nn::EarlyStopMode::slow, 0};
  c.acgan.epochs = 2;
  c.acgan.batch_size = 32;
  c.acgan.hidden = 12;
  c.acgan.noise_dim = 4;
  c.margin = 0.15;
  c.n_sample = 4;
  c.t_sample = 3;
  c.seed = seed;
  return c;
}

TEST(Scheme, RunIsDeterministicAndItsAuditTrailIsConsistent) {
  const ClusterBenchmark b = make_cluster_benchmark({3, 3, 8, 150, 30, 2.0, 0.5, 1.0, 2});
  const SchemeConfig cfg = tiny_scheme(6);
  const SchemeResult r1 = run_scheme(b.train, cfg);
  const SchemeResult r2 = run_scheme(b.train, cfg);
  EXPECT_EQ(r1.state.audit_trail(), r2.state.audit_trail());
  EXPECT_EQ(nn::encode_checkpoint(nn::checkpoint_of(*r1.classifier)),
            nn::encode_checkpoint(nn::checkpoint_of(*r2.classifier)));

  const auto& recs = r1.state.records;
  ASSERT_EQ(recs.size(), 3u);  // 3 rejections cannot exceed a streak of 3
  EXPECT_EQ(r1.state.termination_reason, "maximum iterations reached");
  std::size_t streak = 0, accepted = 0;
  for (std::size_t k = 0; k < recs.size(); ++k) {
    EXPECT_EQ(recs[k].k, k);
    streak = recs[k].verdict == Verdict::accept ? 0 : streak + 1;
    EXPECT_EQ(recs[k].streak, streak);
    if (recs[k].verdict == Verdict::accept) {
      ASSERT_TRUE(recs[k].acc_b.has_value());
      EXPECT_GT(*recs[k].acc_b, recs[k].acc_a);
      accepted += recs[k].n_filtered;
    } else {
      EXPECT_FALSE(recs[k].cause.empty());
      if (recs[k].acc_b) EXPECT_LE(*recs[k].acc_b, recs[k].acc_a);
    }
  }
  EXPECT_EQ(r1.state.accepted.size(), accepted);
  EXPECT_EQ(r1.no_augmentation, accepted == 0);
  for (const auto& m : r1.state.accepted) EXPECT_EQ(m.city, -1);

  std::size_t lines = 0;
  for (char ch : r1.state.audit_trail()) lines += ch == '\n';
  EXPECT_EQ(lines, recs.size());
  const auto report = r1.report();
  EXPECT_EQ(report["iterations"], 3);
  EXPECT_EQ(report["audit_trail"].size(), 3u);
}

TEST(Scheme, EqualAccuracyIsARejection) {
  // Far-apart, tight clusters: clf_A and clf_B both classify the test half
  // perfectly, so no iteration can show a strict improvement.
  const ClusterBenchmark b = make_cluster_benchmark({3, 2, 8, 120, 10, 20.0, 0.1, 0.1, 3});
  SchemeConfig cfg = tiny_scheme(1);
  cfg.margin = 0.3;
  cfg.subset_training = {40, 8, {0.02, 0.9, 0.999, 1e-8}, nn::EarlyStopMode::fast, 0};
  AugmentationState state;
  run_iteration(state, b.train, cfg);
  ASSERT_EQ(state.records.size(), 1u);
  const IterationRecord& rec = state.records[0];
  EXPECT_EQ(rec.acc_a, 1.0);
  EXPECT_EQ(rec.verdict, Verdict::reject);
  ASSERT_TRUE(rec.acc_b.has_value());
  EXPECT_EQ(*rec.acc_b, 1.0);
  EXPECT_EQ(rec.cause, "clf_B not more accurate than clf_A");
  EXPECT_TRUE(state.accepted.empty());
  EXPECT_EQ(state.streak, 1u);
}

TEST(Scheme, StopsOnceTheStreakExceedsItsLimit) {
  const ClusterBenchmark b = make_cluster_benchmark({3, 2, 8, 90, 10, 2.0, 0.5, 1.0, 5});
  SchemeConfig cfg = tiny_scheme(2);
  cfg.margin = 0.0;  // nothing passes the filter, so every iteration rejects
  cfg.max_iterations = 10;
  cfg.acgan.epochs = 1;
  AugmentationState state;
  while (!state.terminated) run_iteration(state, b.train, cfg);
  EXPECT_EQ(state.records.size(), 4u);
  EXPECT_EQ(state.streak, 4u);
  for (const auto& r : state.records) {
    EXPECT_EQ(r.cause, "no sample passed the filter");
    EXPECT_FALSE(r.acc_b.has_value());
  }
  EXPECT_EQ(code_of([&] { run_iteration(state, b.train, cfg); }), ErrorCode::contract);
}

TEST(Scheme, ClusterBenchmarkIsSeededAndAxisAligned) {
  const ClusterBenchmarkConfig cfg{4, 3, 8, 400, 100, 2.0, 0.0, 0.0, 1};
  const ClusterBenchmark a = make_cluster_benchmark(cfg), b = make_cluster_benchmark(cfg);
  ASSERT_EQ(a.train.size(), 400u);
  ASSERT_EQ(a.test.size(), 100u);
  for (std::size_t i = 0; i < a.train.size(); ++i) {
    EXPECT_EQ(a.train[i].map.data, b.train[i].map.data);
    const auto c = static_cast<std::size_t>(a.train[i].scene);
    for (std::size_t d = 0; d < 8; ++d) EXPECT_EQ(a.train[i].map.data[d], d == c ? 2.0 : 0.0);
  }
  EXPECT_EQ(code_of([] { make_cluster_benchmark({1, 1, 2, 1, 1, 1.0, 0.0, 1.0, 0}); }),
            ErrorCode::invalid_argument);
}

}  // namespace
}  // namespace scaloforge
