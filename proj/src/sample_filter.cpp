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


#include "scaloforge/sample_filter.hpp"

#include <string>

#include "scaloforge/error.hpp"

namespace scaloforge {
namespace {

FilterStats empty_stats(std::size_t classes, std::size_t gens) {
  FilterStats s;
  s.attempts.assign(classes, std::vector<std::size_t>(gens, 0));
  s.retained = s.attempts;
  s.generated = s.attempts;
  return s;
}

void check_rows(const nn::Tensor& t, std::size_t rows, std::size_t width, const char* what) {
  if (t.rows() != rows || t.row_size() != width) {
    fail(ErrorCode::shape, std::string(what) + ": got " + t.shape_string() + ", expected [" + std::to_string(rows) +
                               ", " + std::to_string(width) + "]");
  }
}

FeatureMap empty_map(const SampleFilterConfig& c) {
  FeatureMap m(c.frames, c.channels, c.filters);
  m.kind = FeatureKind::synthetic;
  m.normalized = true;
  return m;
}

}  // namespace

void SampleFilterConfig::validate() const {
  if (classes < 2) fail(ErrorCode::invalid_argument, "sample filter: at least 2 classes required");
  if (!(margin >= 0.0 && margin < 1.0 / static_cast<double>(classes))) {
    fail(ErrorCode::invalid_argument, "sample filter: margin must lie in [0, 1/C)");
  }
  if (n_sample == 0 || t_sample == 0 || frames == 0 || channels == 0 || filters == 0) {
    fail(ErrorCode::invalid_argument, "sample filter: counts and sizes must be positive");
  }
}

bool within_margin(double probability, std::size_t classes, double margin) noexcept {
  const double centre = 1.0 / static_cast<double>(classes);
  return centre - margin < probability && probability < centre + margin;
}

FilteredSamples sample_filter_framewise(const ProbabilityScorer& clf_a, const std::vector<SampleSource>& generators,
                                        const SampleFilterConfig& config) {
  config.validate();
  if (generators.empty()) fail(ErrorCode::invalid_argument, "sample filter: no generators");
  const std::size_t gens = generators.size();
  const std::size_t width = config.frame_size();
  const std::size_t quota = config.frames * config.n_sample / gens;
  FilteredSamples out;
  out.stats = empty_stats(config.classes, gens);
  out.stats.quota = quota;
  if (quota == 0) return out;
  for (std::size_t z = 0; z < config.classes; ++z) {
    std::vector<double> kept;
    for (std::size_t g = 0; g < gens; ++g) {
      std::size_t n = 0, t = 0;
      while (t < config.t_sample && n < quota) {
        nn::Tensor frames = generators[g](static_cast<int>(z), quota);
        check_rows(frames, quota, width, "generated frames");
        nn::Tensor probs = clf_a(frames);
        check_rows(probs, quota, config.classes, "frame probabilities");
        out.stats.generated[z][g] += quota;
        for (std::size_t i = 0; i < quota && n < quota; ++i) {
          if (within_margin(probs.value[i * config.classes + z], config.classes, config.margin)) {
            kept.insert(kept.end(), frames.value.begin() + static_cast<std::ptrdiff_t>(i * width),
                        frames.value.begin() + static_cast<std::ptrdiff_t>((i + 1) * width));
            ++n;
          }
        }
        ++t;
      }
      out.stats.attempts[z][g] = t;
      out.stats.retained[z][g] = n;
    }
    const std::size_t per_sample = config.frames * width;
    const std::size_t samples = kept.size() / per_sample;
    for (std::size_t s = 0; s < samples; ++s) {
      FeatureMap m = empty_map(config);
      std::copy_n(kept.begin() + static_cast<std::ptrdiff_t>(s * per_sample), per_sample, m.data.begin());
      out.maps.push_back(std::move(m));
      out.scenes.push_back(static_cast<int>(z));
    }
  }
  return out;
}

FilteredSamples sample_filter_segmentwise(const ProbabilityScorer& clf_a,
                                          const std::vector<SampleSource>& generators,
                                          const SampleFilterConfig& config) {
  config.validate();
  if (generators.empty()) fail(ErrorCode::invalid_argument, "sample filter: no generators");
  const std::size_t gens = generators.size();
  const std::size_t width = config.frames * config.frame_size();
  FilteredSamples out;
  out.stats = empty_stats(config.classes, gens);
  out.stats.quota = config.n_sample / gens;
  for (std::size_t z = 0; z < config.classes; ++z) {
    for (std::size_t g = 0; g < gens; ++g) {
      const std::size_t quota = config.n_sample / gens + (g < config.n_sample % gens ? 1 : 0);
      std::size_t n = 0, t = 0;
      while (t < config.t_sample && n < quota) {
        nn::Tensor segs = generators[g](static_cast<int>(z), quota);
        check_rows(segs, quota, width, "generated segments");
        nn::Tensor probs = clf_a(segs);
        check_rows(probs, quota, config.classes, "segment probabilities");
        out.stats.generated[z][g] += quota;
        for (std::size_t i = 0; i < quota && n < quota; ++i) {
          if (within_margin(probs.value[i * config.classes + z], config.classes, config.margin)) {
            FeatureMap m = empty_map(config);
            std::copy_n(segs.value.begin() + static_cast<std::ptrdiff_t>(i * width), width, m.data.begin());
            out.maps.push_back(std::move(m));
            out.scenes.push_back(static_cast<int>(z));
            ++n;
          }
        }
        ++t;
      }
      out.stats.attempts[z][g] = t;
      out.stats.retained[z][g] = n;
    }
  }
  return out;
}

}  // namespace scaloforge
