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


#include "scaloforge/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "scaloforge/error.hpp"

namespace scaloforge {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Strips a trailing comment that is not inside a quoted string.
std::string strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return std::string(line.substr(0, i));
  }
  return std::string(line);
}

[[noreturn]] void config_error(const std::string& key, const std::string& message) {
  fail(ErrorCode::config, key + ": " + message);
}

std::string unquote(const std::string& key, const std::string& raw) {
  if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') return raw.substr(1, raw.size() - 2);
  if (!raw.empty() && raw.front() == '"') config_error(key, "unterminated string");
  return raw;
}

class Reader {
 public:
  explicit Reader(const FlatConfig& flat) : flat_(flat) {}

  bool has(const std::string& key) const { return flat_.values.count(key) != 0; }

  std::string str(const std::string& key, std::string fallback) const {
    if (!has(key)) return fallback;
    return unquote(key, flat_.values.at(key));
  }

  double num(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    return parse_double(key, unquote(key, flat_.values.at(key)));
  }

  std::uint64_t uint(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    return parse_uint(key, unquote(key, flat_.values.at(key)));
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string v = unquote(key, flat_.values.at(key));
    if (v == "true") return true;
    if (v == "false") return false;
    config_error(key, "expected true or false, got '" + v + "'");
  }

  std::vector<std::string> list(const std::string& key) const {
    const std::string raw = flat_.values.at(key);
    if (raw.size() < 2 || raw.front() != '[' || raw.back() != ']') config_error(key, "expected an array [a, b, ...]");
    std::vector<std::string> out;
    std::stringstream ss(raw.substr(1, raw.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const std::string t = trim(item);
      if (t.empty()) continue;
      out.push_back(unquote(key, t));
    }
    return out;
  }

  static double parse_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto* end = v.data() + v.size();
    auto [p, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || p != end) config_error(key, "expected a number, got '" + v + "'");
    return out;
  }

  static std::uint64_t parse_uint(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto* end = v.data() + v.size();
    auto [p, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || p != end) config_error(key, "expected a non-negative integer, got '" + v + "'");
    return out;
  }

 private:
  const FlatConfig& flat_;
};

template <typename F>
auto guarded(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::config) throw;
    config_error(key, e.what());
  }
}

}  // namespace

const std::vector<std::string_view>& known_config_keys() {
  static const std::vector<std::string_view> keys = {
      "seeds",
      "feature.kind", "feature.channel_mode", "feature.exec", "feature.window", "feature.shift",
      "feature.fft_size", "feature.f_high", "feature.f_low", "feature.t_max", "feature.q", "feature.n_mel",
      "feature.mel_f_low", "feature.mel_f_high", "feature.deltas",
      "classifier.granularity", "classifier.hidden", "classifier.kernel", "classifier.dropout",
      "classifier.city_branch", "classifier.gamma_adv", "classifier.max_epochs", "classifier.batch_size",
      "classifier.lr", "classifier.early_stop", "classifier.validation_fraction",
      "augment.strategy", "augment.split_seed", "augment.max_iterations", "augment.max_streak",
      "augment.filter", "augment.margin", "augment.n_sample", "augment.t_sample", "augment.subset_epochs",
      "augment.gan_epochs", "augment.gan_batch_size", "augment.gan_lr", "augment.gamma_aux",
      "augment.generator_steps", "augment.noise_dim", "augment.gan_hidden",
      "paths.manifest", "paths.features", "paths.models",
      "fuse.systems",
  };
  return keys;
}

FlatConfig parse_flat_config(std::string_view text) {
  FlatConfig flat;
  std::string section;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']' && line.find('=') == std::string::npos) {
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (section.empty()) fail(ErrorCode::config, "line " + std::to_string(line_no) + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::config, "line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) fail(ErrorCode::config, "line " + std::to_string(line_no) + ": missing key");
    const std::string path = section.empty() ? key : section + "." + key;
    if (flat.values.count(path) != 0) config_error(path, "defined twice (line " + std::to_string(line_no) + ")");
    flat.values[path] = value;
    flat.lines[path] = line_no;
  }
  return flat;
}

ExperimentConfig experiment_from_flat(const FlatConfig& flat, const std::filesystem::path& base_dir) {
  const auto& known = known_config_keys();
  for (const auto& [key, value] : flat.values) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      config_error(key, "unknown key (line " + std::to_string(flat.lines.at(key)) + ")");
    }
  }
  Reader r(flat);
  ExperimentConfig e;
  e.base_dir = base_dir;

  const std::string kind = r.str("feature.kind", "scalogram");
  e.feature = guarded("feature.kind", [&] {
    switch (parse_feature_kind(kind)) {
      case FeatureKind::scalogram: return FeatureConfig::scalogram();
      case FeatureKind::fbank: return FeatureConfig::fbank(true);
      case FeatureKind::fbank_long: return FeatureConfig::fbank_long();
      case FeatureKind::synthetic: break;
    }
    config_error("feature.kind", "synthetic features cannot be extracted");
  });
  e.channel_mode = guarded("feature.channel_mode", [&] { return parse_channel_mode(r.str("feature.channel_mode", "ave-diff")); });
  const std::string exec = r.str("feature.exec", "parallel");
  if (exec == "parallel") e.exec = Exec::parallel;
  else if (exec == "serial") e.exec = Exec::serial;
  else config_error("feature.exec", "expected serial or parallel, got '" + exec + "'");
  e.feature.stft.window = r.num("feature.window", e.feature.stft.window);
  e.feature.stft.shift = r.num("feature.shift", e.feature.stft.shift);
  e.feature.stft.fft_size = r.uint("feature.fft_size", e.feature.stft.fft_size);
  e.feature.wavelet.f_high = r.num("feature.f_high", e.feature.wavelet.f_high);
  e.feature.wavelet.f_low = r.num("feature.f_low", e.feature.wavelet.f_low);
  e.feature.wavelet.t_max = r.num("feature.t_max", e.feature.wavelet.t_max);
  e.feature.wavelet.q = static_cast<int>(r.uint("feature.q", static_cast<std::uint64_t>(e.feature.wavelet.q)));
  e.feature.n_mel = static_cast<int>(r.uint("feature.n_mel", static_cast<std::uint64_t>(e.feature.n_mel)));
  e.feature.mel_f_low = r.num("feature.mel_f_low", e.feature.mel_f_low);
  e.feature.mel_f_high = r.num("feature.mel_f_high", e.feature.mel_f_high);
  e.feature.deltas = r.boolean("feature.deltas", e.feature.deltas);
  if (e.feature.kind == FeatureKind::scalogram) guarded("feature.q", [&] { e.feature.wavelet.validate(); return 0; });
  if (!(e.feature.stft.window > 0.0 && e.feature.stft.shift > 0.0 && e.feature.stft.shift <= e.feature.stft.window)) {
    config_error("feature.shift", "need 0 < shift <= window");
  }

  e.classifier.granularity = guarded("classifier.granularity",
                                     [&] { return nn::parse_granularity(r.str("classifier.granularity", "frame")); });
  e.classifier.hidden = r.uint("classifier.hidden", e.classifier.hidden);
  e.classifier.kernel = r.uint("classifier.kernel", e.classifier.kernel);
  e.classifier.dropout = r.num("classifier.dropout", e.classifier.dropout);
  if (!(e.classifier.dropout >= 0.0 && e.classifier.dropout < 1.0)) config_error("classifier.dropout", "must lie in [0, 1)");
  e.city_branch = r.boolean("classifier.city_branch", false);
  e.classifier.gamma_adv = r.num("classifier.gamma_adv", e.classifier.gamma_adv);
  if (!(e.classifier.gamma_adv >= 0.0)) config_error("classifier.gamma_adv", "must be >= 0");
  e.training.max_epochs = r.uint("classifier.max_epochs", e.training.max_epochs);
  e.training.batch_size = r.uint("classifier.batch_size", e.training.batch_size);
  e.training.adam.lr = r.num("classifier.lr", e.training.adam.lr);
  if (e.training.max_epochs == 0) config_error("classifier.max_epochs", "must be positive");
  if (e.training.batch_size == 0) config_error("classifier.batch_size", "must be positive");
  if (!(e.training.adam.lr > 0.0)) config_error("classifier.lr", "must be positive");
  const std::string stop = r.str("classifier.early_stop", "slow");
  if (stop == "slow") e.training.early_stop = nn::EarlyStopMode::slow;
  else if (stop == "fast") e.training.early_stop = nn::EarlyStopMode::fast;
  else config_error("classifier.early_stop", "expected slow or fast, got '" + stop + "'");
  e.validation_fraction = r.num("classifier.validation_fraction", e.validation_fraction);
  if (!(e.validation_fraction >= 0.0 && e.validation_fraction < 1.0)) {
    config_error("classifier.validation_fraction", "must lie in [0, 1)");
  }

  SchemeConfig& a = e.augment;
  a.split.kind = guarded("augment.strategy", [&] { return parse_split_kind(r.str("augment.strategy", "city")); });
  a.split.seed = r.uint("augment.split_seed", 0);
  a.max_iterations = r.uint("augment.max_iterations", a.max_iterations);
  a.max_streak = r.uint("augment.max_streak", a.max_streak);
  const std::string filter = r.str("augment.filter", "frame");
  if (filter == "frame") a.filter_mode = FilterMode::framewise;
  else if (filter == "segment") a.filter_mode = FilterMode::segmentwise;
  else config_error("augment.filter", "expected frame or segment, got '" + filter + "'");
  a.margin = r.num("augment.margin", a.margin);
  a.n_sample = r.uint("augment.n_sample", a.filter_mode == FilterMode::framewise ? 8 : 6);
  a.t_sample = r.uint("augment.t_sample", a.filter_mode == FilterMode::framewise ? 10 : 8);
  a.subset_training.max_epochs = r.uint("augment.subset_epochs", a.subset_training.max_epochs);
  a.acgan.epochs = r.uint("augment.gan_epochs", a.acgan.epochs);
  a.acgan.batch_size = r.uint("augment.gan_batch_size", a.acgan.batch_size);
  a.acgan.d_adam.lr = a.acgan.g_adam.lr = r.num("augment.gan_lr", a.acgan.d_adam.lr);
  a.acgan.gamma_aux = r.num("augment.gamma_aux", a.acgan.gamma_aux);
  a.acgan.generator_steps = r.uint("augment.generator_steps", a.acgan.generator_steps);
  a.acgan.noise_dim = r.uint("augment.noise_dim", a.acgan.noise_dim);
  a.acgan.hidden = r.uint("augment.gan_hidden", a.acgan.hidden);
  if (a.max_iterations == 0) config_error("augment.max_iterations", "must be positive");
  if (a.n_sample == 0) config_error("augment.n_sample", "must be positive");
  if (a.t_sample == 0) config_error("augment.t_sample", "must be positive");
  if (a.acgan.epochs == 0) config_error("augment.gan_epochs", "must be positive");
  if (!(a.acgan.gamma_aux >= 0.0)) config_error("augment.gamma_aux", "must be >= 0");
  if (!(a.margin >= 0.0)) config_error("augment.margin", "must be >= 0");

  if (r.has("seeds")) {
    e.seeds.clear();
    for (const std::string& s : r.list("seeds")) e.seeds.push_back(Reader::parse_uint("seeds", s));
  }
  if (e.seeds.empty()) config_error("seeds", "at least one seed is required");
  std::set<std::uint64_t> distinct(e.seeds.begin(), e.seeds.end());
  if (distinct.size() != e.seeds.size()) config_error("seeds", "seeds must be distinct");

  auto path_of = [&](const std::string& key) -> std::filesystem::path {
    if (!r.has(key)) return {};
    std::filesystem::path p = r.str(key, "");
    return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
  };
  e.manifest = path_of("paths.manifest");
  e.features = r.has("paths.features") ? std::filesystem::path(r.str("paths.features", "")) : "features";
  e.models = r.has("paths.models") ? std::filesystem::path(r.str("paths.models", "")) : "models";
  if (r.has("fuse.systems")) {
    for (const std::string& s : r.list("fuse.systems")) e.fuse_systems.emplace_back(s);
  }
  return e;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::config, "cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return experiment_from_flat(parse_flat_config(ss.str()), path.parent_path());
}

}  // namespace scaloforge
