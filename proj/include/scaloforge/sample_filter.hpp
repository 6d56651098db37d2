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
#include <functional>
#include <vector>

#include "scaloforge/features.hpp"
#include "scaloforge/nn/tensor.hpp"

namespace scaloforge {

struct SampleFilterConfig {
  std::size_t classes = 10;  // C
  double margin = 0.03;      // m_p
  std::size_t n_sample = 8;  // maximum samples per scene
  std::size_t t_sample = 10; // maximum generation rounds per scene and generator
  std::size_t frames = 58;   // L
  std::size_t channels = 2;
  std::size_t filters = 290;

  void validate() const;
  std::size_t frame_size() const noexcept { return channels * filters; }
};

// Open-interval test 1/C - m_p < p < 1/C + m_p.
bool within_margin(double probability, std::size_t classes, double margin) noexcept;

// Produces `count` generated rows of the requested scene: frames
// (count x c*n) for the frame-wise filter, whole segments
// (count x L*c*n) for the segment-wise one.
using SampleSource = std::function<nn::Tensor(int scene, std::size_t count)>;
// Class probabilities (rows x C) of the given rows under clf_A; for the
// segment-wise filter each row is a whole segment.
using ProbabilityScorer = std::function<nn::Tensor(const nn::Tensor& rows)>;

struct FilterStats {
  // [scene][generator]
  std::vector<std::vector<std::size_t>> attempts;
  std::vector<std::vector<std::size_t>> retained;
  std::vector<std::vector<std::size_t>> generated;
  std::size_t quota = 0;  // per-generator frame quota (frame-wise) or base quota
};

struct FilteredSamples {
  std::vector<int> scenes;
  std::vector<FeatureMap> maps;  // each L x c x n, kind synthetic, normalized
  FilterStats stats;

  std::size_t size() const noexcept { return maps.size(); }
};

// Frame-wise filter. For every scene z and generator G: draw rounds of
// N_frame = floor(L * N_sample / |G|) frames until N_frame frames passed the
// margin test on class z or T_sample rounds were used; the retained count
// never exceeds N_frame. Retained frames of each scene are packed into
// floor(#frames / L) samples; leftover frames are dropped.
FilteredSamples sample_filter_framewise(const ProbabilityScorer& clf_a, const std::vector<SampleSource>& generators,
                                        const SampleFilterConfig& config);

// Segment-wise filter: the same loop on whole segments. Each generator's
// quota is N_sample / |G| with the remainder given to the first generators,
// so at most N_sample segments per scene are retained.
FilteredSamples sample_filter_segmentwise(const ProbabilityScorer& clf_a,
                                          const std::vector<SampleSource>& generators,
                                          const SampleFilterConfig& config);

}  // namespace scaloforge
