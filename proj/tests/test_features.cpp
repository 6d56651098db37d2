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
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "scaloforge/error.hpp"
#include "scaloforge/features.hpp"
#include "scaloforge/kernels.hpp"
#include "scaloforge/oracle.hpp"
#include "scaloforge/random.hpp"

namespace scaloforge {
namespace {

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

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

AudioClip noise(double duration, int rate, std::uint64_t seed, double amplitude = 1.0) {
  SynthSpec spec;
  spec.kind = SignalKind::white_noise;
  spec.duration = duration;
  spec.rate = rate;
  spec.seed = seed;
  spec.channels = 2;
  spec.amplitude = amplitude;
  return synth_signal(spec);
}

FeatureMap random_map(std::size_t l, std::size_t c, std::size_t n, std::uint64_t seed) {
  FeatureMap map(l, c, n);
  Rng rng(seed);
  for (double& v : map.data) v = rng.normal();
  quantize_to_float(map);
  return map;
}

TEST(ShapeLaw, TenSecondStereoClipAtFortyEightKilohertz) {
  const AudioClip clip = noise(10.0, 48000, 3);
  auto start = std::chrono::steady_clock::now();
  const FeatureMap scalogram = extract_scalogram(clip, ChannelMode::ave_diff, WaveletScaleParams{},
                                                 FeatureConfig::scalogram().stft);
  const double t_scalogram = seconds_since(start);
  start = std::chrono::steady_clock::now();
  const FeatureMap fbank = extract_fbank(clip, ChannelMode::ave_diff, true);
  const double t_fbank = seconds_since(start);

  EXPECT_EQ(scalogram.frames, 58u);
  EXPECT_EQ(scalogram.channels, 2u);
  EXPECT_EQ(scalogram.filters, 290u);
  EXPECT_EQ(fbank.frames, 500u);
  EXPECT_EQ(fbank.channels, 6u);
  EXPECT_EQ(fbank.filters, 128u);
  EXPECT_LT(t_scalogram, 5.0);
  EXPECT_LT(t_fbank, 5.0);

  const FeatureMap longterm = extract_longterm_fbank(clip, ChannelMode::ave_diff);
  EXPECT_EQ(longterm.frames, 58u);
  EXPECT_EQ(longterm.filters, 290u);
}

TEST(ShapeLaw, FrameCountIsFloorOfDurationOverShift) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    StftConfig cfg;
    cfg.window = rng.uniform(0.01, 0.2);
    cfg.shift = rng.uniform(0.005, cfg.window);
    const int rate = 16000;
    const std::size_t samples = cfg.window_samples(rate) + rng.below(40000);
    EXPECT_EQ(cfg.frame_count(samples, rate), samples / cfg.shift_samples(rate));
  }
  StftConfig cfg;
  EXPECT_EQ(code_of([&] { cfg.frame_count(100, 48000); }), ErrorCode::length);
  cfg.shift = 1.0;
  EXPECT_EQ(code_of([&] { cfg.validate(48000); }), ErrorCode::invalid_argument);
}

TEST(Stft, HannWindowIsPeriodic) {
  const auto w = hann_window(8);
  EXPECT_DOUBLE_EQ(w[0], 0.0);
  EXPECT_NEAR(w[4], 1.0, 1e-15);
  EXPECT_NEAR(w[2], 0.5, 1e-15);
  EXPECT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), 4.0, 1e-12);
  EXPECT_EQ(next_power_of_two(24576), 32768u);
  EXPECT_EQ(next_power_of_two(1024), 1024u);
}

TEST(Stft, BinCenteredToneHasClosedFormMagnitudes) {
  // Hann-windowed sine on bin k: |X[k]| = A N / 4, |X[k +- 1]| = A N / 8,
  // zero two bins away.
  SynthSpec spec;
  spec.kind = SignalKind::tone;
  spec.freq = 500.0;  // bin 64 of a 1024-point FFT at 8 kHz
  spec.duration = 1.0;
  spec.rate = 8000;
  spec.amplitude = 0.5;
  const AudioClip clip = synth_signal(spec);
  StftConfig cfg{0.128, 0.064, 0, WindowFunction::hann};
  const Spectrogram s = stft_magnitude(clip.channels[0], 8000, cfg);
  ASSERT_EQ(s.bins, 513u);
  for (std::size_t t = 0; t + 2 < s.frames; ++t) {
    EXPECT_NEAR(s.at(t, 64), 0.5 * 1024 / 4.0, 1e-8);
    EXPECT_NEAR(s.at(t, 63), 0.5 * 1024 / 8.0, 1e-8);
    EXPECT_NEAR(s.at(t, 65), 0.5 * 1024 / 8.0, 1e-8);
    EXPECT_NEAR(s.at(t, 62), 0.0, 1e-8);
  }
  EXPECT_DOUBLE_EQ(s.frame_times[3], 3 * 0.064);
}

TEST(Kernels, SerialAndParallelAgree) {
  const AudioClip clip = noise(4.0, 48000, 17);
  for (const FeatureConfig& cfg : {FeatureConfig::scalogram(), FeatureConfig::fbank(false)}) {
    const FeatureExtractor ex(cfg, 48000);
    const Spectrogram a = stft_magnitude(clip.channels[0], 48000, cfg.stft, Exec::serial);
    const Spectrogram b = stft_magnitude(clip.channels[0], 48000, cfg.stft, Exec::parallel);
    ASSERT_EQ(a.magnitudes.size(), b.magnitudes.size());
    EXPECT_EQ(a.magnitudes, b.magnitudes);
    const Matrix ea = apply_filterbank(a, ex.filters(), Exec::serial);
    const Matrix eb = apply_filterbank(a, ex.filters(), Exec::parallel);
    for (std::size_t i = 0; i < ea.data.size(); ++i) {
      EXPECT_NEAR(ea.data[i], eb.data[i], 1e-12 * std::abs(ea.data[i])) << "cell " << i;
    }
  }
}

TEST(Kernels, WaveletEnergySerialAndParallelAgree) {
  const AudioClip clip = noise(2.0, 16000, 23);
  const auto w = oracle::synthesize_wavelet(2000.0, 200.0, 16000);
  const StftConfig framing{0.064, 0.032, 0, WindowFunction::hann};
  const auto a = oracle::convolve_energy(clip.channels[0], w, framing, 16000, Exec::serial);
  const auto b = oracle::convolve_energy(clip.channels[0], w, framing, 16000, Exec::parallel);
  EXPECT_EQ(a, b);
}

TEST(Kernels, FilterbankEnergyMatchesDenseProduct) {
  const AudioClip clip = noise(1.0, 16000, 4);
  FeatureConfig cfg = FeatureConfig::fbank(false);
  cfg.n_mel = 24;
  const FeatureExtractor ex(cfg, 16000);
  const Spectrogram s = stft_magnitude(clip.channels[0], 16000, cfg.stft);
  const Matrix e = apply_filterbank(s, ex.filters());
  const std::vector<double> dense = ex.filters().dense();
  for (std::size_t t = 0; t < s.frames; t += 5) {
    for (std::size_t j = 0; j < 24; ++j) {
      double expected = 0.0;
      for (std::size_t b = 0; b < s.bins; ++b) expected += dense[j * s.bins + b] * s.at(t, b) * s.at(t, b);
      EXPECT_NEAR(e(t, j), expected, 1e-9 * expected);
    }
  }
}

TEST(LogEnergy, SilenceHitsTheFloor) {
  SynthSpec spec;
  spec.kind = SignalKind::silence;
  spec.duration = 1.0;
  spec.rate = 16000;
  spec.channels = 2;
  const FeatureMap map = extract_fbank(synth_signal(spec), ChannelMode::left_right, true);
  for (std::size_t t = 0; t < map.frames; ++t) {
    for (std::size_t n = 0; n < map.filters; ++n) {
      EXPECT_FLOAT_EQ(static_cast<float>(map.at(t, 0, n)), static_cast<float>(std::log(kLogFloor)));
      EXPECT_EQ(map.at(t, 2, n), 0.0);  // deltas of a constant
    }
  }
}

TEST(LogEnergy, ScalingTheSignalScalesEnergiesQuadratically) {
  const AudioClip clip = noise(2.0, 16000, 9, 0.25);
  const double alpha = 3.0;
  AudioClip scaled = clip;
  for (auto& ch : scaled.channels) {
    for (double& v : ch) v *= alpha;
  }
  const FeatureConfig cfg = FeatureConfig::scalogram();
  const Spectrogram s1 = stft_magnitude(clip.channels[0], 16000, cfg.stft);
  const Spectrogram s2 = stft_magnitude(scaled.channels[0], 16000, cfg.stft);
  FeatureConfig small = cfg;
  small.wavelet.f_high = 8000.0;
  const FeatureExtractor ex(small, 16000);
  const Matrix e1 = apply_filterbank(s1, ex.filters());
  const Matrix e2 = apply_filterbank(s2, ex.filters());
  for (std::size_t i = 0; i < e1.data.size(); ++i) {
    EXPECT_NEAR(e2.data[i], alpha * alpha * e1.data[i], 1e-9 * e2.data[i]);
  }
  const Matrix l1 = ex.log_energies(clip.channels[0]);
  const Matrix l2 = ex.log_energies(scaled.channels[0]);
  for (std::size_t i = 0; i < l1.data.size(); ++i) {
    if (l1.data[i] > std::log(kLogFloor) + 1.0) EXPECT_NEAR(l2.data[i] - l1.data[i], 2.0 * std::log(alpha), 1e-9);
  }
}

TEST(LogEnergy, PermutingFiltersPermutesColumns) {
  const AudioClip clip = noise(1.0, 16000, 31);
  WaveletScaleParams params;
  params.f_high = 8000.0;
  FilterBank bank = build_wavelet_scale(params);
  std::vector<std::size_t> perm(bank.size());
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(2);
  rng.shuffle(perm);
  FilterBank shuffled = bank;
  for (std::size_t j = 0; j < perm.size(); ++j) {
    shuffled.centers[j] = bank.centers[perm[j]];
    shuffled.bandwidths[j] = bank.bandwidths[perm[j]];
  }
  const StftConfig cfg = FeatureConfig::scalogram().stft;
  const std::size_t fft = cfg.resolved_fft_size(16000);
  const DigitalFilterMatrix a = digitize(bank, fft, 16000);
  const DigitalFilterMatrix b = digitize(shuffled, fft, 16000);
  const Spectrogram s = stft_magnitude(clip.channels[0], 16000, cfg);
  const Matrix ea = apply_filterbank(s, a);
  const Matrix eb = apply_filterbank(s, b);
  for (std::size_t t = 0; t < s.frames; ++t) {
    for (std::size_t j = 0; j < perm.size(); ++j) EXPECT_EQ(eb(t, j), ea(t, perm[j]));
  }
}

TEST(Deltas, RampHasConstantSlopeAndEdgesReplicate) {
  Matrix x(10, 2);
  for (std::size_t t = 0; t < 10; ++t) {
    x(t, 0) = 3.0 * static_cast<double>(t);
    x(t, 1) = 7.0;
  }
  const Matrix d = regression_deltas(x, 2);
  for (std::size_t t = 2; t < 8; ++t) EXPECT_NEAR(d(t, 0), 3.0, 1e-12);
  for (std::size_t t = 0; t < 10; ++t) EXPECT_EQ(d(t, 1), 0.0);
  // t = 0 sees x(-1) = x(-2) = x(0): (1*(3-0) + 2*(6-0)) / 10.
  EXPECT_NEAR(d(0, 0), 1.5, 1e-12);
  EXPECT_NEAR(d(9, 0), 1.5, 1e-12);
  EXPECT_EQ(code_of([&] { regression_deltas(x, 0); }), ErrorCode::invalid_argument);
}

TEST(Deltas, ExtractorStacksStaticsDeltasAndAccelerations) {
  const AudioClip clip = noise(1.0, 16000, 12);
  FeatureConfig cfg = FeatureConfig::fbank(true);
  cfg.n_mel = 32;
  const FeatureExtractor ex(cfg, 16000);
  const FeatureMap map = ex.extract(clip, ChannelMode::ave_diff);
  ASSERT_EQ(map.channels, 6u);
  const ChannelPair pair = derive_channels(clip, ChannelMode::ave_diff);
  const Matrix s0 = ex.log_energies(pair.a);
  const Matrix d0 = regression_deltas(s0);
  const Matrix a0 = regression_deltas(d0);
  for (std::size_t t = 0; t < map.frames; ++t) {
    for (std::size_t n = 0; n < map.filters; ++n) {
      EXPECT_EQ(map.at(t, 0, n), static_cast<double>(static_cast<float>(s0(t, n))));
      EXPECT_EQ(map.at(t, 2, n), static_cast<double>(static_cast<float>(d0(t, n))));
      EXPECT_EQ(map.at(t, 4, n), static_cast<double>(static_cast<float>(a0(t, n))));
    }
  }
}

TEST(Normalization, FittedStatsStandardizeTheCorpus) {
  std::vector<FeatureMap> corpus{random_map(20, 2, 5, 1), random_map(30, 2, 5, 2)};
  for (auto& m : corpus) {
    for (std::size_t t = 0; t < m.frames; ++t) m.at(t, 1, 3) = 4.0;  // constant column
  }
  const NormStats stats = fit_normalization(corpus, "unit");
  EXPECT_DOUBLE_EQ(stats.std[1 * 5 + 3], kStdFloor);
  std::vector<double> sum(10, 0.0), sq(10, 0.0);
  for (const auto& m : corpus) {
    const FeatureMap n = apply_normalization(m, stats);
    EXPECT_TRUE(n.normalized);
    for (std::size_t t = 0; t < n.frames; ++t) {
      for (std::size_t k = 0; k < 10; ++k) {
        sum[k] += n.frame(t)[k];
        sq[k] += n.frame(t)[k] * n.frame(t)[k];
      }
    }
  }
  for (std::size_t k = 0; k < 10; ++k) {
    EXPECT_NEAR(sum[k] / 50.0, 0.0, 1e-12);
    if (k != 8) EXPECT_NEAR(sq[k] / 50.0, 1.0, 1e-9);
  }
}

TEST(Normalization, GuardsAndJsonRoundTrip) {
  const std::vector<FeatureMap> corpus{random_map(8, 2, 3, 4)};
  const NormStats stats = fit_normalization(corpus, "c");
  const FeatureMap once = apply_normalization(corpus[0], stats);
  EXPECT_EQ(code_of([&] { apply_normalization(once, stats); }), ErrorCode::flag);
  EXPECT_EQ(code_of([&] { apply_normalization(random_map(4, 1, 3, 1), stats); }), ErrorCode::shape);
  EXPECT_EQ(code_of([] { fit_normalization(std::vector<FeatureMap>{}); }), ErrorCode::invalid_argument);
  const NormStats back = norm_stats_from_json(nlohmann::json::parse(to_json(stats).dump()));
  EXPECT_EQ(back.mean, stats.mean);
  EXPECT_EQ(back.std, stats.std);
  EXPECT_EQ(back.corpus_id, "c");
  EXPECT_EQ(code_of([] { norm_stats_from_json(nlohmann::json::object()); }), ErrorCode::schema);
}

TEST(FeatureFile, RoundTripIsBitExact) {
  FeatureMap map = random_map(58, 2, 290, 8);
  map.kind = FeatureKind::scalogram;
  map.channel_mode = ChannelMode::ave_diff;
  map.normalized = true;
  const auto path = std::filesystem::temp_directory_path() / "scaloforge_features_roundtrip.sclf";
  save_features(map, path);
  const FeatureMap back = load_features(path);
  std::filesystem::remove(path);
  EXPECT_EQ(back.frames, 58u);
  EXPECT_EQ(back.channels, 2u);
  EXPECT_EQ(back.filters, 290u);
  EXPECT_EQ(back.kind, FeatureKind::scalogram);
  EXPECT_EQ(back.channel_mode, ChannelMode::ave_diff);
  EXPECT_TRUE(back.normalized);
  EXPECT_EQ(back.data, map.data);
  EXPECT_EQ(encode_features(back), encode_features(map));
}

TEST(FeatureFile, CorruptionIsDetected) {
  const auto bytes = encode_features(random_map(4, 2, 3, 9));
  auto flipped = bytes;
  flipped[30] ^= 0x01;
  EXPECT_EQ(code_of([&] { decode_features(flipped); }), ErrorCode::integrity);
  auto checksum = bytes;
  checksum.back() ^= 0xFF;
  EXPECT_EQ(code_of([&] { decode_features(checksum); }), ErrorCode::integrity);
  const std::vector<std::uint8_t> truncated(bytes.begin(), bytes.end() - 10);
  EXPECT_EQ(code_of([&] { decode_features(truncated); }), ErrorCode::truncation);
  auto magic = bytes;
  magic[0] = 'X';
  EXPECT_EQ(code_of([&] { decode_features(magic); }), ErrorCode::format);
  auto version = bytes;
  version[4] = 9;
  EXPECT_EQ(code_of([&] { decode_features(version); }), ErrorCode::unsupported);
  auto trailing = bytes;
  trailing.push_back(0);
  EXPECT_EQ(code_of([&] { decode_features(trailing); }), ErrorCode::format);
  EXPECT_EQ(code_of([] { load_features("/nonexistent/scaloforge.sclf"); }), ErrorCode::io);
}

TEST(FeatureConfigs, FingerprintsTrackEveryField) {
  const FeatureConfig a = FeatureConfig::scalogram();
  FeatureConfig b = a;
  EXPECT_EQ(a.fingerprint(), b.fingerprint());
  b.wavelet.q = 36;
  EXPECT_NE(a.fingerprint(), b.fingerprint());
  EXPECT_NE(FeatureConfig::fbank(true).fingerprint(), FeatureConfig::fbank(false).fingerprint());
  for (FeatureKind k : {FeatureKind::scalogram, FeatureKind::fbank, FeatureKind::fbank_long, FeatureKind::synthetic}) {
    EXPECT_EQ(parse_feature_kind(to_string(k)), k);
  }
}

TEST(FeatureExtraction, SerialAndParallelMapsAgree) {
  const AudioClip clip = noise(3.0, 48000, 21);
  const FeatureExtractor ex(FeatureConfig::scalogram(), 48000);
  const FeatureMap a = ex.extract(clip, ChannelMode::ave_diff, Exec::serial);
  const FeatureMap b = ex.extract(clip, ChannelMode::ave_diff, Exec::parallel);
  ASSERT_EQ(a.data.size(), b.data.size());
  for (std::size_t i = 0; i < a.data.size(); ++i) EXPECT_NEAR(a.data[i], b.data[i], 1e-6 * std::abs(a.data[i]));
}

TEST(TemporalCorrelation, ShortTermFramesCorrelateMoreEveryTwoFrames) {
  // Mean cosine similarity between frames two apart, on per-clip normalized
  // features, averaged over ten noise clips. On white noise the frames are
  // nearly independent, so both values sit near zero; the FBank value is the
  // larger one because the finite-length bias of the normalized cosine
  // (about -1/(L-1)) is much smaller with 500 frames than with 58.
  double scalogram_sum = 0.0, fbank_sum = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const AudioClip clip = noise(10.0, 48000, seed);
    const FeatureMap s = extract_scalogram(clip, ChannelMode::ave_diff, WaveletScaleParams{},
                                           FeatureConfig::scalogram().stft);
    const FeatureMap f = extract_fbank(clip, ChannelMode::ave_diff, false);
    const FeatureMap sn = apply_normalization(s, fit_normalization(std::span<const FeatureMap>(&s, 1)));
    const FeatureMap fn = apply_normalization(f, fit_normalization(std::span<const FeatureMap>(&f, 1)));
    const auto cs = oracle::adjacent_cosine_similarity(sn, 2);
    const auto cf = oracle::adjacent_cosine_similarity(fn, 2);
    EXPECT_EQ(cs.pairs, 56u);
    EXPECT_EQ(cf.pairs, 498u);
    EXPECT_GT(cs.mean, -0.2);
    EXPECT_LT(cs.mean, 0.2);
    EXPECT_GT(cf.mean, -0.2);
    EXPECT_LT(cf.mean, 0.2);
    scalogram_sum += cs.mean;
    fbank_sum += cf.mean;
  }
  EXPECT_GT(fbank_sum / 10.0, scalogram_sum / 10.0);
}

}  // namespace
}  // namespace scaloforge
