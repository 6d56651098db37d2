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


#include "scaloforge/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "scaloforge/config.hpp"
#include "scaloforge/error.hpp"
#include "scaloforge/evaluation.hpp"
#include "scaloforge/nn/checkpoint.hpp"
#include "scaloforge/scheme.hpp"
#include "scaloforge/signal_io.hpp"

namespace scaloforge {
namespace fs = std::filesystem;
namespace {

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string file_hash(const fs::path& path) { return hex64(fnv1a64(read_bytes(path))); }

// File name component for a segment id.
std::string safe_name(const std::string& id) {
  std::string out = id;
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' ||
                    c == '-' || c == '_';
    if (!ok) c = '_';
  }
  return out;
}

// Collects inputs and outputs of one command run and writes run_<cmd>.json.
class RunRecord {
 public:
  RunRecord(std::string command, const CommandOptions& options, const ExperimentConfig& config)
      : command_(std::move(command)), out_(options.out) {
    record_["command"] = command_;
    record_["config"] = options.config.string();
    record_["config_hash"] = file_hash(options.config);
    record_["seeds"] = config.seeds;
    record_["inputs"] = nlohmann::json::object();
  }

  // Inputs inside the output directory are recorded relative to it, so two
  // runs into different directories produce identical records.
  void input(const fs::path& path) { record_["inputs"][display_name(path)] = file_hash(path); }

  void write(const fs::path& path, const std::string& bytes) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::io, "cannot write " + path.string());
    out << bytes;
    out.close();
    if (!out) fail(ErrorCode::io, "write failed for " + path.string());
    output(path);
  }

  void output(const fs::path& path) { outputs_[fs::relative(path, out_).generic_string()] = file_hash(path); }

  void set(const std::string& key, nlohmann::json value) { record_[key] = std::move(value); }

  void finish() {
    record_["outputs"] = outputs_;
    fs::create_directories(out_);
    std::ofstream out(out_ / ("run_" + command_ + ".json"), std::ios::binary | std::ios::trunc);
    out << record_.dump(2) << "\n";
  }

 private:
  std::string display_name(const fs::path& path) const {
    const fs::path rel = fs::weakly_canonical(path).lexically_relative(fs::weakly_canonical(out_));
    if (rel.empty() || *rel.begin() == "..") return path.generic_string();
    return rel.generic_string();
  }

  std::string command_;
  fs::path out_;
  nlohmann::json record_;
  std::map<std::string, std::string> outputs_;
};

fs::path under(const fs::path& out, const fs::path& p) { return p.is_absolute() ? p : out / p; }

struct Context {
  ExperimentConfig config;
  fs::path manifest_path;
  DatasetManifest manifest;
  fs::path features_dir;
  fs::path models_dir;
};

Context load_context(const CommandOptions& options, bool need_manifest) {
  Context ctx;
  ctx.config = load_experiment(options.config);
  ctx.manifest_path = options.manifest ? *options.manifest : ctx.config.manifest;
  if (need_manifest && ctx.manifest_path.empty()) {
    fail(ErrorCode::config, "paths.manifest: no manifest given in the config or on the command line");
  }
  if (!ctx.manifest_path.empty()) ctx.manifest = load_manifest(ctx.manifest_path);
  ctx.features_dir = under(options.out, ctx.config.features);
  ctx.models_dir = under(options.out, ctx.config.models);
  return ctx;
}

fs::path feature_path(const Context& ctx, const ManifestEntry& e) {
  return ctx.features_dir / (safe_name(e.id) + ".sclf");
}

fs::path stats_path(const Context& ctx) { return ctx.features_dir / "norm_stats.json"; }

NormStats load_stats(const Context& ctx) {
  return norm_stats_from_json(nlohmann::json::parse(read_bytes(stats_path(ctx))));
}

std::vector<nn::LabeledMap> load_maps(const Context& ctx, const NormStats& stats, std::optional<Split> split,
                                      RunRecord& run) {
  std::vector<nn::LabeledMap> out;
  for (const ManifestEntry& e : ctx.manifest.entries) {
    if (split && e.split != *split) continue;
    const fs::path p = feature_path(ctx, e);
    run.input(p);
    nn::LabeledMap m;
    m.id = e.id;
    m.scene = e.scene;
    m.city = e.city;
    m.map = apply_normalization(load_features(p), stats);
    out.push_back(std::move(m));
  }
  return out;
}

bool has_test_entries(const DatasetManifest& m) {
  return std::any_of(m.entries.begin(), m.entries.end(), [](const ManifestEntry& e) { return e.split == Split::test; });
}

SchemeConfig scheme_for(const Context& ctx, const FeatureMap& shape, std::uint64_t seed) {
  const ExperimentConfig& c = ctx.config;
  SchemeConfig s = c.augment;
  s.classifier = c.classifier;
  s.classifier.channels = shape.channels;
  s.classifier.filters = shape.filters;
  s.classifier.classes = ctx.manifest.scene_vocabulary.size();
  s.classifier.cities = c.city_branch ? ctx.manifest.city_vocabulary.size() : 0;
  s.final_training = c.training;
  s.subset_training.batch_size = c.training.batch_size;
  s.subset_training.adam = c.training.adam;
  s.validation_fraction = c.validation_fraction;
  s.seed = seed;
  return s;
}

std::vector<nn::LabeledMap> require_train(std::vector<nn::LabeledMap> maps) {
  if (maps.empty()) fail(ErrorCode::invalid_argument, "manifest has no train entries");
  return maps;
}

}  // namespace

int cmd_extract(const CommandOptions& options, std::ostream& log) {
  Context ctx = load_context(options, true);
  RunRecord run("extract", options, ctx.config);
  run.input(ctx.manifest_path);
  run.set("feature_config", ctx.config.feature.canonical());
  if (ctx.manifest.entries.empty()) {
    log << "warning: manifest " << ctx.manifest_path << " is empty; nothing extracted\n";
    run.finish();
    return kExitPartial;
  }
  fs::create_directories(ctx.features_dir);
  std::map<int, std::unique_ptr<FeatureExtractor>> extractors;
  std::vector<FeatureMap> train_maps;
  std::size_t failures = 0;
  for (const ManifestEntry& e : ctx.manifest.entries) {
    try {
      const AudioClip clip = load_source(e.source, ctx.manifest.base_dir);
      auto& ex = extractors[clip.sample_rate];
      if (!ex) ex = std::make_unique<FeatureExtractor>(ctx.config.feature, clip.sample_rate);
      FeatureMap map = ex->extract(clip, ctx.config.channel_mode, ctx.config.exec);
      const fs::path p = feature_path(ctx, e);
      save_features(map, p);
      run.output(p);
      if (e.split == Split::train) train_maps.push_back(std::move(map));
      log << "extracted " << e.id << " -> " << p.filename().string() << " (" << map.frames << "x" << map.channels
          << "x" << map.filters << ")\n";
    } catch (const Error& err) {
      ++failures;
      log << "error: " << e.id << ": " << err.what() << "\n";
    }
  }
  if (!train_maps.empty()) {
    NormStats stats = fit_normalization(train_maps, hex64(fnv1a64(read_bytes(ctx.manifest_path))));
    run.write(stats_path(ctx), to_json(stats).dump(2) + "\n");
  } else {
    log << "warning: no train entries extracted; normalization statistics not written\n";
    ++failures;
  }
  run.set("failures", failures);
  run.finish();
  return failures == 0 ? kExitOk : kExitPartial;
}

int cmd_train(const CommandOptions& options, std::ostream& log) {
  Context ctx = load_context(options, true);
  RunRecord run("train", options, ctx.config);
  run.input(ctx.manifest_path);
  run.input(stats_path(ctx));
  const NormStats stats = load_stats(ctx);
  const std::vector<nn::LabeledMap> train = require_train(load_maps(ctx, stats, Split::train, run));
  for (std::uint64_t seed : ctx.config.seeds) {
    const SchemeConfig sc = scheme_for(ctx, train.front().map, seed);
    nn::FitResult fit;
    auto clf = train_final_classifier(train, {}, sc, &fit);
    const std::string stem = "clf_seed" + std::to_string(seed);
    const fs::path model = ctx.models_dir / (stem + ".sclm");
    fs::create_directories(ctx.models_dir);
    nn::save_checkpoint(nn::checkpoint_of(*clf), model);
    run.output(model);
    run.write(ctx.models_dir / ("curve_seed" + std::to_string(seed) + ".csv"), fit.curve.to_csv());
    log << "trained seed " << seed << ": " << fit.epochs_run << " epochs, best val loss " << fit.best_val_loss
        << "\n";
  }
  run.finish();
  return kExitOk;
}

int cmd_augment(const CommandOptions& options, std::ostream& log) {
  Context ctx = load_context(options, true);
  RunRecord run("augment", options, ctx.config);
  run.input(ctx.manifest_path);
  run.input(stats_path(ctx));
  const NormStats stats = load_stats(ctx);
  const std::vector<nn::LabeledMap> train = require_train(load_maps(ctx, stats, Split::train, run));
  const fs::path dir = options.out / "augment";
  for (std::uint64_t seed : ctx.config.seeds) {
    const SchemeConfig sc = scheme_for(ctx, train.front().map, seed);
    SchemeResult result = run_scheme(train, sc);
    const std::string tag = "seed" + std::to_string(seed);
    run.write(dir / ("audit_" + tag + ".jsonl"), result.state.audit_trail());
    run.write(dir / ("report_" + tag + ".json"), result.report().dump(2) + "\n");
    for (const nn::LabeledMap& f : result.state.accepted) {
      const fs::path p = dir / ("fakes_" + tag) / (safe_name(f.id) + ".sclf");
      fs::create_directories(p.parent_path());
      save_features(f.map, p);
      run.output(p);
    }
    const fs::path model = ctx.models_dir / ("aug_" + tag + ".sclm");
    fs::create_directories(ctx.models_dir);
    nn::save_checkpoint(nn::checkpoint_of(*result.classifier), model);
    run.output(model);
    log << "augmentation seed " << seed << ": " << result.state.records.size() << " iterations, "
        << result.state.accepted.size() << " accepted samples ("
        << (result.no_augmentation ? "no augmentation" : "augmented") << "), " << result.state.termination_reason
        << "\n";
  }
  run.finish();
  return kExitOk;
}

int cmd_evaluate(const CommandOptions& options, std::ostream& log) {
  Context ctx = load_context(options, true);
  RunRecord run("evaluate", options, ctx.config);
  run.input(ctx.manifest_path);
  run.input(stats_path(ctx));
  const NormStats stats = load_stats(ctx);
  const bool any_test = has_test_entries(ctx.manifest);
  const std::vector<nn::LabeledMap> test =
      load_maps(ctx, stats, any_test ? std::optional<Split>(Split::test) : std::nullopt, run);
  std::vector<fs::path> models;
  if (fs::is_directory(ctx.models_dir)) {
    for (const auto& entry : fs::directory_iterator(ctx.models_dir)) {
      if (entry.path().extension() == ".sclm") models.push_back(entry.path());
    }
  }
  std::sort(models.begin(), models.end());
  if (models.empty()) {
    log << "error: no checkpoints in " << ctx.models_dir << "\n";
    run.finish();
    return kExitPartial;
  }
  const fs::path dir = options.out / "eval";
  for (const fs::path& model : models) {
    run.input(model);
    auto clf = nn::classifier_from_checkpoint(nn::load_checkpoint(model));
    LogProbTable table;
    for (const nn::LabeledMap& m : test) {
      table.ids.push_back(m.id);
      table.rows.push_back(segment_log_probability(*clf, m.map));
    }
    const std::string stem = model.stem().string();
    run.write(dir / ("logprobs_" + stem + ".csv"), table.to_csv());
    const Predictions pred = predict(table);
    run.write(dir / ("predictions_" + stem + ".csv"), pred.to_csv(ctx.manifest.scene_vocabulary));
    const EvalReport report = evaluate(pred, ctx.manifest);
    run.write(dir / ("report_" + stem + ".json"), report.to_json().dump(2) + "\n");
    run.write(dir / ("confusion_" + stem + ".csv"), report.confusion_csv(ctx.manifest.scene_vocabulary));
    log << stem << ": overall accuracy " << report.overall << " on " << report.total << " segments\n";
  }
  run.finish();
  return kExitOk;
}

int cmd_fuse(const CommandOptions& options, std::ostream& log) {
  Context ctx = load_context(options, false);
  RunRecord run("fuse", options, ctx.config);
  std::vector<fs::path> systems;
  for (const fs::path& p : ctx.config.fuse_systems) systems.push_back(under(options.out, p));
  if (systems.empty()) {
    const fs::path dir = options.out / "eval";
    if (fs::is_directory(dir)) {
      for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("logprobs_", 0) == 0 && entry.path().extension() == ".csv") systems.push_back(entry.path());
      }
    }
    std::sort(systems.begin(), systems.end());
  }
  if (systems.empty()) {
    log << "error: no log-probability tables to fuse\n";
    run.finish();
    return kExitPartial;
  }
  std::vector<LogProbTable> tables;
  for (const fs::path& p : systems) {
    run.input(p);
    tables.push_back(LogProbTable::load(p));
  }
  const fs::path dir = options.out / "fused";
  const LogProbTable fused = average_log_probs(tables);
  run.write(dir / "logprobs_fused.csv", fused.to_csv());
  const Predictions pred = predict(fused);
  run.write(dir / "predictions.csv", pred.to_csv(ctx.manifest.scene_vocabulary));
  if (!ctx.manifest_path.empty()) {
    run.input(ctx.manifest_path);
    const EvalReport report = evaluate(pred, ctx.manifest);
    run.write(dir / "report.json", report.to_json().dump(2) + "\n");
    run.write(dir / "confusion.csv", report.confusion_csv(ctx.manifest.scene_vocabulary));
    log << "fused " << tables.size() << " systems: overall accuracy " << report.overall << "\n";
  } else {
    log << "fused " << tables.size() << " systems\n";
  }
  run.finish();
  return kExitOk;
}

int run_command(const std::string& name, const CommandOptions& options, std::ostream& log) {
  try {
    if (name == "extract") return cmd_extract(options, log);
    if (name == "train") return cmd_train(options, log);
    if (name == "augment") return cmd_augment(options, log);
    if (name == "evaluate") return cmd_evaluate(options, log);
    if (name == "fuse") return cmd_fuse(options, log);
    log << "config error: unknown command '" << name << "'\n";
    return kExitConfig;
  } catch (const Error& e) {
    log << e.what() << "\n";
    return e.code() == ErrorCode::config ? kExitConfig : kExitPartial;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitPartial;
  }
}

}  // namespace scaloforge
