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


#include "scaloforge/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "scaloforge/error.hpp"
#include "scaloforge/nn/losses.hpp"
#include "scaloforge/nn/training.hpp"

namespace scaloforge {
namespace {

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.emplace_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_number(const std::string& text, std::size_t line) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [p, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || p != end) {
    fail(ErrorCode::format, "log-prob table line " + std::to_string(line) + ": bad number '" + text + "'");
  }
  return v;
}

}  // namespace

std::vector<double> segment_log_probability(nn::SceneClassifier& clf, const FeatureMap& map) {
  if (!map.normalized) fail(ErrorCode::contract, "segment log-probability requires normalized features");
  return nn::segment_log_probs(clf, map);
}

std::string LogProbTable::to_csv() const {
  std::string out = "id";
  for (std::size_t c = 0; c < classes(); ++c) out += ",logp_" + std::to_string(c);
  out += "\n";
  char buf[40];
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out += ids[i];
    for (double v : rows[i]) {
      std::snprintf(buf, sizeof buf, ",%.17g", v);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

LogProbTable LogProbTable::from_csv(std::string_view text) {
  LogProbTable t;
  std::size_t pos = 0, line_no = 0, columns = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (line_no == 1) {
      if (fields.empty() || fields[0] != "id") fail(ErrorCode::format, "log-prob table: missing header");
      columns = fields.size();
      continue;
    }
    if (fields.size() != columns) {
      fail(ErrorCode::format, "log-prob table line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(columns) + " fields");
    }
    t.ids.push_back(fields[0]);
    std::vector<double> row;
    for (std::size_t c = 1; c < fields.size(); ++c) row.push_back(parse_number(fields[c], line_no));
    t.rows.push_back(std::move(row));
  }
  return t;
}

void LogProbTable::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io, "cannot write " + path.string());
  out << to_csv();
}

LogProbTable LogProbTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_csv(ss.str());
}

std::string Predictions::to_csv(const std::vector<std::string>& vocabulary) const {
  std::string out = "id,scene_index,scene_label\n";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto y = static_cast<std::size_t>(labels[i]);
    out += ids[i] + "," + std::to_string(labels[i]) + "," + (y < vocabulary.size() ? vocabulary[y] : "") + "\n";
  }
  return out;
}

Predictions predict(const LogProbTable& table) {
  Predictions p;
  p.ids = table.ids;
  for (const auto& row : table.rows) p.labels.push_back(static_cast<int>(nn::argmax(row.data(), row.size())));
  return p;
}

LogProbTable average_log_probs(const std::vector<LogProbTable>& systems, const std::vector<double>& weights) {
  if (systems.empty()) fail(ErrorCode::invalid_argument, "fusion needs at least one system");
  if (!weights.empty() && weights.size() != systems.size()) {
    fail(ErrorCode::invalid_argument, "fusion: " + std::to_string(weights.size()) + " weights for " +
                                          std::to_string(systems.size()) + " systems");
  }
  const LogProbTable& ref = systems.front();
  for (std::size_t s = 1; s < systems.size(); ++s) {
    if (systems[s].ids != ref.ids) {
      fail(ErrorCode::misalignment, "fusion: system " + std::to_string(s) + " lists different segment ids");
    }
    if (systems[s].classes() != ref.classes()) {
      fail(ErrorCode::misalignment, "fusion: system " + std::to_string(s) + " has a different class count");
    }
  }
  double wsum = 0.0;
  std::vector<double> w(systems.size(), 1.0);
  if (!weights.empty()) w = weights;
  for (double v : w) wsum += v;
  if (!(wsum > 0.0)) fail(ErrorCode::invalid_argument, "fusion: weights must sum to a positive value");
  LogProbTable out;
  out.ids = ref.ids;
  std::vector<double> terms(systems.size());
  for (std::size_t i = 0; i < ref.ids.size(); ++i) {
    std::vector<double> row(ref.classes());
    for (std::size_t c = 0; c < row.size(); ++c) {
      for (std::size_t s = 0; s < systems.size(); ++s) terms[s] = w[s] * systems[s].rows[i][c];
      std::sort(terms.begin(), terms.end());
      double acc = 0.0;
      for (double t : terms) acc += t;
      row[c] = acc / wsum;
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

Predictions fuse_average_voting(const std::vector<LogProbTable>& systems, const std::vector<double>& weights) {
  return predict(average_log_probs(systems, weights));
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json j;
  j["classes"] = classes;
  j["total"] = total;
  j["overall_accuracy"] = overall;
  j["classwise_accuracy"] = classwise;
  j["classwise_mean"] = classwise_mean;
  j["support"] = support;
  j["confusion"] = confusion;
  j["seen_city_accuracy"] = seen_accuracy ? nlohmann::json(*seen_accuracy) : nlohmann::json(nullptr);
  j["unseen_city_accuracy"] = unseen_accuracy ? nlohmann::json(*unseen_accuracy) : nlohmann::json(nullptr);
  j["seen_count"] = seen_count;
  j["unseen_count"] = unseen_count;
  return j;
}

std::string EvalReport::confusion_csv(const std::vector<std::string>& vocabulary) const {
  auto name = [&](std::size_t c) { return c < vocabulary.size() ? vocabulary[c] : std::to_string(c); };
  std::string out = "truth\\predicted";
  for (std::size_t c = 0; c < classes; ++c) out += "," + name(c);
  out += "\n";
  for (std::size_t t = 0; t < classes; ++t) {
    out += name(t);
    for (std::size_t p = 0; p < classes; ++p) out += "," + std::to_string(confusion[t][p]);
    out += "\n";
  }
  return out;
}

EvalReport evaluate_labels(const std::vector<int>& truth, const std::vector<int>& predicted, std::size_t classes,
                           const std::vector<bool>& seen) {
  if (truth.size() != predicted.size()) fail(ErrorCode::shape, "evaluate: truth and prediction counts differ");
  if (!seen.empty() && seen.size() != truth.size()) fail(ErrorCode::shape, "evaluate: seen flags count differs");
  EvalReport r;
  r.classes = classes;
  r.total = truth.size();
  r.confusion.assign(classes, std::vector<std::size_t>(classes, 0));
  r.support.assign(classes, 0);
  std::size_t correct = 0, seen_ok = 0, unseen_ok = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int t = truth[i], p = predicted[i];
    if (t < 0 || static_cast<std::size_t>(t) >= classes || p < 0 || static_cast<std::size_t>(p) >= classes) {
      fail(ErrorCode::label_range, "evaluate: label outside [0, " + std::to_string(classes) + ")");
    }
    ++r.confusion[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)];
    ++r.support[static_cast<std::size_t>(t)];
    const bool ok = t == p;
    correct += ok;
    if (!seen.empty()) {
      if (seen[i]) {
        ++r.seen_count;
        seen_ok += ok;
      } else {
        ++r.unseen_count;
        unseen_ok += ok;
      }
    }
  }
  r.overall = r.total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(r.total);
  std::size_t with_support = 0;
  for (std::size_t c = 0; c < classes; ++c) {
    const double acc = r.support[c] == 0 ? 0.0 : static_cast<double>(r.confusion[c][c]) / static_cast<double>(r.support[c]);
    r.classwise.push_back(acc);
    if (r.support[c] > 0) {
      r.classwise_mean += acc;
      ++with_support;
    }
  }
  if (with_support > 0) r.classwise_mean /= static_cast<double>(with_support);
  if (r.seen_count > 0) r.seen_accuracy = static_cast<double>(seen_ok) / static_cast<double>(r.seen_count);
  if (r.unseen_count > 0) r.unseen_accuracy = static_cast<double>(unseen_ok) / static_cast<double>(r.unseen_count);
  return r;
}

EvalReport evaluate(const Predictions& predictions, const DatasetManifest& manifest) {
  std::unordered_map<std::string, int> by_id;
  for (std::size_t i = 0; i < predictions.ids.size(); ++i) by_id[predictions.ids[i]] = predictions.labels[i];
  const bool any_test = std::any_of(manifest.entries.begin(), manifest.entries.end(),
                                    [](const ManifestEntry& e) { return e.split == Split::test; });
  std::set<int> train_cities;
  for (const ManifestEntry& e : manifest.entries) {
    if (e.split == Split::train) train_cities.insert(e.city);
  }
  std::vector<int> truth, predicted;
  std::vector<bool> seen;
  for (const ManifestEntry& e : manifest.entries) {
    if (any_test && e.split != Split::test) continue;
    const auto it = by_id.find(e.id);
    if (it == by_id.end()) fail(ErrorCode::missing_prediction, "no prediction for segment " + e.id);
    truth.push_back(e.scene);
    predicted.push_back(it->second);
    seen.push_back(train_cities.count(e.city) != 0);
  }
  return evaluate_labels(truth, predicted, manifest.scene_vocabulary.size(), any_test ? seen : std::vector<bool>{});
}

}  // namespace scaloforge
