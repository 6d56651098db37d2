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


#include "scaloforge/features.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "scaloforge/error.hpp"

namespace scaloforge {

std::size_t next_power_of_two(std::size_t n) noexcept {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<double> hann_window(std::size_t length) {
  std::vector<double> w(length);
  for (std::size_t n = 0; n < length; ++n) {
    w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(length));
  }
  return w;
}

std::size_t StftConfig::window_samples(int rate) const {
  return static_cast<std::size_t>(std::llround(window * rate));
}

std::size_t StftConfig::shift_samples(int rate) const {
  return static_cast<std::size_t>(std::llround(shift * rate));
}

std::size_t StftConfig::resolved_fft_size(int rate) const {
  return fft_size != 0 ? fft_size : next_power_of_two(window_samples(rate));
}

void StftConfig::validate(int rate) const {
  if (rate <= 0) fail(ErrorCode::invalid_argument, "sample rate must be positive");
  const std::size_t win = window_samples(rate);
  const std::size_t hop = shift_samples(rate);
  if (win < 2 || hop < 1) fail(ErrorCode::invalid_argument, "STFT window or shift rounds to zero samples");
  if (hop > win) fail(ErrorCode::invalid_argument, "STFT shift exceeds window");
  const std::size_t fft = resolved_fft_size(rate);
  if (fft < win || (fft & (fft - 1)) != 0) {
    fail(ErrorCode::invalid_argument, "FFT size must be a power of two >= window length");
  }
}

std::size_t StftConfig::frame_count(std::size_t num_samples, int rate) const {
  validate(rate);
  const std::size_t win = window_samples(rate);
  if (num_samples < win) {
    fail(ErrorCode::length, "signal has " + std::to_string(num_samples) +
                                " samples, one analysis window needs " + std::to_string(win));
  }
  return num_samples / shift_samples(rate);
}

Spectrogram stft_magnitude(std::span<const double> signal, int rate, const StftConfig& config, Exec exec) {
  const std::size_t frames = config.frame_count(signal.size(), rate);
  kernels::FramePlan plan{config.window_samples(rate), config.shift_samples(rate), frames,
                          config.resolved_fft_size(rate)};
  const RealFft fft(plan.fft_size);
  const auto window = hann_window(plan.window);
  Spectrogram spec;
  spec.frames = frames;
  spec.bins = fft.num_bins();
  spec.magnitudes.resize(frames * spec.bins);
  spec.config = config;
  spec.sample_rate = rate;
  spec.frame_times.resize(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    spec.frame_times[t] = static_cast<double>(t * plan.shift) / rate;
  }
  kernels::stft_magnitude(signal, window, plan, fft, spec.magnitudes, exec);
  return spec;
}

Matrix apply_filterbank(const Spectrogram& spec, const DigitalFilterMatrix& filters, Exec exec) {
  if (spec.bins != filters.num_bins()) {
    fail(ErrorCode::shape, "spectrogram has " + std::to_string(spec.bins) +
                               " bins, filter matrix expects " + std::to_string(filters.num_bins()));
  }
  if (spec.sample_rate != filters.sample_rate()) {
    fail(ErrorCode::shape, "spectrogram and filter matrix sample rates differ");
  }
  Matrix out(spec.frames, filters.num_filters());
  kernels::filterbank_energy(spec.magnitudes, spec.frames, filters, out.data, exec);
  return out;
}

Matrix log_compress(Matrix energies) {
  for (double& e : energies.data) e = std::log(std::max(e, kLogFloor));
  return energies;
}

Matrix regression_deltas(const Matrix& x, int half_window) {
  if (half_window < 1) fail(ErrorCode::invalid_argument, "delta half-window must be at least 1");
  Matrix out(x.rows, x.cols);
  if (x.rows == 0) return out;
  double denom = 0.0;
  for (int k = 1; k <= half_window; ++k) denom += 2.0 * k * k;
  const auto last = static_cast<std::ptrdiff_t>(x.rows) - 1;
  for (std::size_t t = 0; t < x.rows; ++t) {
    for (std::size_t d = 0; d < x.cols; ++d) {
      double acc = 0.0;
      for (int k = 1; k <= half_window; ++k) {
        const auto ahead = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(t) + k, last);
        const auto behind = std::max<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(t) - k, 0);
        acc += k * (x(static_cast<std::size_t>(ahead), d) - x(static_cast<std::size_t>(behind), d));
      }
      out(t, d) = acc / denom;
    }
  }
  return out;
}

std::string_view to_string(FeatureKind kind) noexcept {
  switch (kind) {
    case FeatureKind::scalogram: return "scalogram";
    case FeatureKind::fbank: return "fbank";
    case FeatureKind::fbank_long: return "fbank-long";
    case FeatureKind::synthetic: return "synthetic";
  }
  return "unknown";
}

FeatureKind parse_feature_kind(std::string_view text) {
  if (text == "scalogram") return FeatureKind::scalogram;
  if (text == "fbank") return FeatureKind::fbank;
  if (text == "fbank-long") return FeatureKind::fbank_long;
  if (text == "synthetic") return FeatureKind::synthetic;
  fail(ErrorCode::invalid_argument, "unknown feature kind '" + std::string(text) + "'");
}

FeatureConfig FeatureConfig::scalogram() {
  FeatureConfig c;
  c.kind = FeatureKind::scalogram;
  c.stft = StftConfig{0.512, 0.171, 0, WindowFunction::hann};
  c.wavelet = WaveletScaleParams{24000.0, 0.5, 0.341, 35};
  return c;
}

FeatureConfig FeatureConfig::fbank(bool with_deltas) {
  FeatureConfig c;
  c.kind = FeatureKind::fbank;
  c.stft = StftConfig{0.040, 0.020, 0, WindowFunction::hann};
  c.n_mel = 128;
  c.deltas = with_deltas;
  return c;
}

FeatureConfig FeatureConfig::fbank_long() {
  FeatureConfig c;
  c.kind = FeatureKind::fbank_long;
  c.stft = StftConfig{0.512, 0.171, 0, WindowFunction::hann};
  c.n_mel = 290;
  return c;
}

std::string FeatureConfig::canonical() const {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "kind=%s;window=%.17g;shift=%.17g;fft=%zu;f_high=%.17g;f_low=%.17g;t_max=%.17g;q=%d;"
                "n_mel=%d;mel_f_low=%.17g;mel_f_high=%.17g;deltas=%d;delta_half_window=%d",
                std::string(to_string(kind)).c_str(), stft.window, stft.shift, stft.fft_size,
                wavelet.f_high, wavelet.f_low, wavelet.t_max, wavelet.q, n_mel, mel_f_low, mel_f_high,
                deltas ? 1 : 0, delta_half_window);
  return buf;
}

std::uint64_t FeatureConfig::fingerprint() const { return fnv1a64(canonical()); }

FeatureExtractor::FeatureExtractor(FeatureConfig config, int sample_rate)
    : config_(std::move(config)), sample_rate_(sample_rate) {
  config_.stft.validate(sample_rate_);
  switch (config_.kind) {
    case FeatureKind::scalogram:
      bank_ = build_wavelet_scale(config_.wavelet, FilterShape::gaussian);
      break;
    case FeatureKind::fbank:
    case FeatureKind::fbank_long: {
      const double f_high = config_.mel_f_high > 0.0 ? config_.mel_f_high : sample_rate_ / 2.0;
      bank_ = build_mel_scale(config_.mel_f_low, f_high, config_.n_mel);
      break;
    }
    case FeatureKind::synthetic:
      fail(ErrorCode::invalid_argument, "synthetic features are not extracted from audio");
  }
  filters_ = digitize(bank_, config_.stft.resolved_fft_size(sample_rate_), sample_rate_);
}

Matrix FeatureExtractor::log_energies(std::span<const double> signal, Exec exec) const {
  const Spectrogram spec = stft_magnitude(signal, sample_rate_, config_.stft, exec);
  return log_compress(apply_filterbank(spec, filters_, exec));
}

FeatureMap FeatureExtractor::extract(const AudioClip& clip, ChannelMode mode, Exec exec) const {
  if (clip.sample_rate != sample_rate_) {
    fail(ErrorCode::invalid_argument, "clip rate " + std::to_string(clip.sample_rate) +
                                          " Hz differs from extractor rate " +
                                          std::to_string(sample_rate_) + " Hz");
  }
  const ChannelPair pair = derive_channels(clip, mode);
  const Matrix statics[2] = {log_energies(pair.a, exec), log_energies(pair.b, exec)};
  std::vector<Matrix> planes{statics[0], statics[1]};
  if (config_.deltas) {
    const Matrix d0 = regression_deltas(statics[0], config_.delta_half_window);
    const Matrix d1 = regression_deltas(statics[1], config_.delta_half_window);
    planes.push_back(d0);
    planes.push_back(d1);
    planes.push_back(regression_deltas(d0, config_.delta_half_window));
    planes.push_back(regression_deltas(d1, config_.delta_half_window));
  }
  FeatureMap map(statics[0].rows, planes.size(), statics[0].cols);
  map.kind = config_.kind;
  map.channel_mode = mode;
  map.fingerprint = config_.fingerprint();
  for (std::size_t t = 0; t < map.frames; ++t) {
    for (std::size_t c = 0; c < map.channels; ++c) {
      for (std::size_t n = 0; n < map.filters; ++n) map.at(t, c, n) = planes[c](t, n);
    }
  }
  quantize_to_float(map);
  return map;
}

FeatureMap extract_scalogram(const AudioClip& clip, ChannelMode mode, const WaveletScaleParams& params,
                             const StftConfig& stft, Exec exec) {
  FeatureConfig config = FeatureConfig::scalogram();
  config.wavelet = params;
  config.stft = stft;
  return FeatureExtractor(config, clip.sample_rate).extract(clip, mode, exec);
}

FeatureMap extract_fbank(const AudioClip& clip, ChannelMode mode, bool with_deltas, Exec exec) {
  return FeatureExtractor(FeatureConfig::fbank(with_deltas), clip.sample_rate).extract(clip, mode, exec);
}

FeatureMap extract_longterm_fbank(const AudioClip& clip, ChannelMode mode, Exec exec) {
  return FeatureExtractor(FeatureConfig::fbank_long(), clip.sample_rate).extract(clip, mode, exec);
}

NormStats fit_normalization(std::span<const FeatureMap> corpus, std::string corpus_id) {
  if (corpus.empty()) fail(ErrorCode::invalid_argument, "normalization corpus is empty");
  const std::size_t channels = corpus.front().channels;
  const std::size_t filters = corpus.front().filters;
  const std::size_t width = channels * filters;
  for (const auto& map : corpus) {
    if (map.channels != channels || map.filters != filters) {
      fail(ErrorCode::shape, "corpus mixes feature shapes (" + std::to_string(channels) + "x" +
                                 std::to_string(filters) + " vs " + std::to_string(map.channels) +
                                 "x" + std::to_string(map.filters) + ")");
    }
  }
  // Per-map partials are reduced in corpus order so results do not depend on
  // the thread count.
  const auto maps = static_cast<std::ptrdiff_t>(corpus.size());
  std::vector<std::vector<double>> partial(corpus.size(), std::vector<double>(width, 0.0));
  std::size_t count = 0;
  for (const auto& map : corpus) count += map.frames;
  if (count == 0) fail(ErrorCode::invalid_argument, "normalization corpus has no frames");

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < maps; ++i) {
    const auto& map = corpus[static_cast<std::size_t>(i)];
    auto& acc = partial[static_cast<std::size_t>(i)];
    for (std::size_t t = 0; t < map.frames; ++t) {
      const auto f = map.frame(t);
      for (std::size_t k = 0; k < width; ++k) acc[k] += f[k];
    }
  }
  NormStats stats;
  stats.channels = channels;
  stats.filters = filters;
  stats.corpus_id = std::move(corpus_id);
  stats.mean.assign(width, 0.0);
  for (const auto& acc : partial) {
    for (std::size_t k = 0; k < width; ++k) stats.mean[k] += acc[k];
  }
  for (double& m : stats.mean) m /= static_cast<double>(count);

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < maps; ++i) {
    const auto& map = corpus[static_cast<std::size_t>(i)];
    auto& acc = partial[static_cast<std::size_t>(i)];
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t t = 0; t < map.frames; ++t) {
      const auto f = map.frame(t);
      for (std::size_t k = 0; k < width; ++k) {
        const double d = f[k] - stats.mean[k];
        acc[k] += d * d;
      }
    }
  }
  stats.std.assign(width, 0.0);
  for (const auto& acc : partial) {
    for (std::size_t k = 0; k < width; ++k) stats.std[k] += acc[k];
  }
  for (double& s : stats.std) s = std::max(std::sqrt(s / static_cast<double>(count)), kStdFloor);
  return stats;
}

FeatureMap apply_normalization(const FeatureMap& map, const NormStats& stats) {
  if (map.normalized) fail(ErrorCode::flag, "feature map is already normalized");
  if (map.channels != stats.channels || map.filters != stats.filters) {
    fail(ErrorCode::shape, "normalization stats are " + std::to_string(stats.channels) + "x" +
                               std::to_string(stats.filters) + ", map is " +
                               std::to_string(map.channels) + "x" + std::to_string(map.filters));
  }
  FeatureMap out = map;
  const std::size_t width = map.frame_size();
  for (std::size_t t = 0; t < map.frames; ++t) {
    for (std::size_t k = 0; k < width; ++k) {
      double& v = out.data[t * width + k];
      v = (v - stats.mean[k]) / stats.std[k];
    }
  }
  out.normalized = true;
  return out;
}

nlohmann::json to_json(const NormStats& stats) {
  return {{"channels", stats.channels}, {"filters", stats.filters}, {"corpus_id", stats.corpus_id},
          {"mean", stats.mean},         {"std", stats.std}};
}

NormStats norm_stats_from_json(const nlohmann::json& j) {
  NormStats stats;
  try {
    stats.channels = j.at("channels").get<std::size_t>();
    stats.filters = j.at("filters").get<std::size_t>();
    stats.corpus_id = j.at("corpus_id").get<std::string>();
    stats.mean = j.at("mean").get<std::vector<double>>();
    stats.std = j.at("std").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::schema, std::string("normalization stats JSON: ") + e.what());
  }
  const std::size_t width = stats.channels * stats.filters;
  if (stats.mean.size() != width || stats.std.size() != width) {
    fail(ErrorCode::schema, "normalization stats JSON: vector length mismatch");
  }
  return stats;
}

void quantize_to_float(FeatureMap& map) {
  for (double& v : map.data) v = static_cast<double>(static_cast<float>(v));
}

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a64(std::string_view text) noexcept {
  return fnv1a64(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace scaloforge
