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


#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "scaloforge/commands.hpp"
#include "scaloforge/config.hpp"
#include "scaloforge/error.hpp"
#include "scaloforge/evaluation.hpp"

namespace scaloforge {
namespace {

namespace fs = std::filesystem;

template <typename F>
Error error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "no error raised";
  return Error(ErrorCode::io, "none");
}

// ---------------------------------------------------------------- config

TEST(Config, ParsesSectionsCommentsAndArrays) {
  const FlatConfig flat = parse_flat_config(
      "seeds = [4, 5]  # trailing comment\n"
      "\n"
      "[feature]\n"
      "kind = \"fbank\"\n"
      "# a comment line\n"
      "[classifier]\n"
      "lr = 0.005\n");
  EXPECT_EQ(flat.values.at("seeds"), "[4, 5]");
  EXPECT_EQ(flat.values.at("feature.kind"), "\"fbank\"");
  EXPECT_EQ(flat.lines.at("classifier.lr"), 7);
  const ExperimentConfig e = experiment_from_flat(flat);
  EXPECT_EQ(e.seeds, (std::vector<std::uint64_t>{4, 5}));
  EXPECT_EQ(e.feature.kind, FeatureKind::fbank);
  EXPECT_DOUBLE_EQ(e.training.adam.lr, 0.005);
}

TEST(Config, DefaultsDescribeTheReferenceExperiment) {
  const ExperimentConfig e = experiment_from_flat(parse_flat_config(""));
  EXPECT_EQ(e.feature.kind, FeatureKind::scalogram);
  EXPECT_EQ(e.seeds, (std::vector<std::uint64_t>{1, 2, 3}));
  EXPECT_EQ(e.augment.split.kind, SplitKind::city);
  EXPECT_EQ(e.augment.filter_mode, FilterMode::framewise);
  EXPECT_EQ(e.augment.n_sample, 8u);
  EXPECT_EQ(e.augment.t_sample, 10u);
  EXPECT_DOUBLE_EQ(e.augment.margin, 0.03);
  EXPECT_EQ(e.features, fs::path("features"));
}

TEST(Config, SegmentFilterChangesTheSampleDefaults) {
  const ExperimentConfig e = experiment_from_flat(parse_flat_config("[augment]\nfilter = \"segment\"\n"));
  EXPECT_EQ(e.augment.filter_mode, FilterMode::segmentwise);
  EXPECT_EQ(e.augment.n_sample, 6u);
  EXPECT_EQ(e.augment.t_sample, 8u);
}

TEST(Config, ErrorsNameTheOffendingField) {
  struct Case {
    const char* text;
    const char* field;
  };
  const Case cases[] = {
      {"[feature]\nwindw = 0.1\n", "feature.windw"},
      {"[classifier]\ndropout = 1.5\n", "classifier.dropout"},
      {"[classifier]\nmax_epochs = -3\n", "classifier.max_epochs"},
      {"[classifier]\nlr = fast\n", "classifier.lr"},
      {"[augment]\nstrategy = \"alphabetical\"\n", "augment.strategy"},
      {"[augment]\nfilter = \"clip\"\n", "augment.filter"},
      {"seeds = [1, 1]\n", "seeds"},
      {"seeds = []\n", "seeds"},
      {"[feature]\nkind = \"a\"\nkind = \"b\"\n", "feature.kind"},
  };
  for (const Case& c : cases) {
    const Error e = error_of([&] { experiment_from_flat(parse_flat_config(c.text)); });
    EXPECT_EQ(e.code(), ErrorCode::config) << c.text;
    EXPECT_NE(std::string(e.what()).find(c.field), std::string::npos) << e.what();
  }
  EXPECT_EQ(error_of([] { parse_flat_config("just words\n"); }).code(), ErrorCode::config);
  EXPECT_EQ(error_of([] { load_experiment("/nonexistent/exp.toml"); }).code(), ErrorCode::config);
}

TEST(Config, EveryKnownKeyIsAccepted) {
  // The list doubles as documentation; each entry must survive validation
  // of the unknown-key check (values may still be rejected on their own).
  for (std::string_view key : known_config_keys()) {
    const FlatConfig flat = parse_flat_config(std::string(key) + " = 1\n");
    try {
      experiment_from_flat(flat);
    } catch (const Error& e) {
      EXPECT_EQ(std::string(e.what()).find("unknown key"), std::string::npos) << key;
    }
  }
}

// ---------------------------------------------------------------- evaluation

TEST(Evaluation, OverallAndClasswiseAccuracyDiffer) {
  const EvalReport r = evaluate_labels({0, 0, 0, 1}, {0, 0, 0, 0}, 2);
  EXPECT_DOUBLE_EQ(r.overall, 0.75);
  EXPECT_EQ(r.classwise, (std::vector<double>{1.0, 0.0}));
  EXPECT_DOUBLE_EQ(r.classwise_mean, 0.5);
  EXPECT_EQ(r.support, (std::vector<std::size_t>{3, 1}));
  EXPECT_EQ(r.confusion, (std::vector<std::vector<std::size_t>>{{3, 0}, {1, 0}}));
  EXPECT_FALSE(r.seen_accuracy.has_value());
}

TEST(Evaluation, SeenAndUnseenCitiesAreScoredSeparately) {
  const EvalReport r = evaluate_labels({0, 1, 2, 0}, {0, 1, 0, 1}, 3, {true, true, false, false});
  EXPECT_DOUBLE_EQ(*r.seen_accuracy, 1.0);
  EXPECT_DOUBLE_EQ(*r.unseen_accuracy, 0.0);
  EXPECT_EQ(r.seen_count, 2u);
  EXPECT_EQ(r.unseen_count, 2u);
  EXPECT_EQ(r.to_json()["overall_accuracy"], 0.5);
}

TEST(Evaluation, ClassesWithoutSupportReportZero) {
  const EvalReport r = evaluate_labels({0, 0}, {0, 2}, 3);
  EXPECT_EQ(r.classwise, (std::vector<double>{0.5, 0.0, 0.0}));
  EXPECT_EQ(error_of([] { evaluate_labels({0, 3}, {0, 0}, 3); }).code(), ErrorCode::label_range);
}

TEST(Evaluation, MissingPredictionsAreErrors) {
  DatasetManifest m = parse_manifest(
      "id\tsource\tscene_label\tcity_label\tsplit\n"
      "a\tsynth:silence:0:1:8000:0\tpark\tlyon\ttrain\n"
      "b\tsynth:silence:0:1:8000:0\tpark\tparis\ttest\n"
      "c\tsynth:silence:0:1:8000:0\tbus\tlyon\ttest\n");
  Predictions p{{"b"}, {0}};
  EXPECT_EQ(error_of([&] { evaluate(p, m); }).code(), ErrorCode::missing_prediction);
  p = Predictions{{"c", "b"}, {0, 1}};
  const EvalReport r = evaluate(p, m);
  EXPECT_EQ(r.total, 2u);
  EXPECT_EQ(r.seen_count, 1u);  // c is recorded in lyon, a training city
  EXPECT_DOUBLE_EQ(*r.unseen_accuracy, 0.0);
}

LogProbTable toy_table() {
  LogProbTable t;
  t.ids = {"x", "y", "z"};
  t.rows = {{std::log(0.2), std::log(0.8)}, {std::log(0.5), std::log(0.5)}, {-0.1, -2.3025850929940459}};
  return t;
}

TEST(Fusion, CsvRoundTripIsExact) {
  const LogProbTable t = toy_table();
  const LogProbTable back = LogProbTable::from_csv(t.to_csv());
  EXPECT_EQ(back.ids, t.ids);
  EXPECT_EQ(back.rows, t.rows);
}

TEST(Fusion, PredictionTiesGoToTheLowestClass) {
  const Predictions p = predict(toy_table());
  EXPECT_EQ(p.labels, (std::vector<int>{1, 0, 0}));
  EXPECT_EQ(p.to_csv({"quiet", "loud"}).substr(0, 31), "id,scene_index,scene_label\nx,1,");
}

TEST(Fusion, IdenticalSystemsFuseToThemselves) {
  const LogProbTable t = toy_table();
  const LogProbTable avg = average_log_probs({t, t, t});
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    for (std::size_t c = 0; c < 2; ++c) EXPECT_NEAR(avg.rows[i][c], t.rows[i][c], 1e-15);
  }
  EXPECT_EQ(fuse_average_voting({t, t, t}).labels, predict(t).labels);
}

TEST(Fusion, ResultDoesNotDependOnSystemOrder) {
  LogProbTable a = toy_table(), b = toy_table(), c = toy_table();
  for (auto& row : b.rows) row[0] += 0.3;
  for (auto& row : c.rows) row[1] -= 0.7;
  const LogProbTable abc = average_log_probs({a, b, c}), cab = average_log_probs({c, a, b});
  EXPECT_EQ(abc.rows, cab.rows);
  const LogProbTable weighted = average_log_probs({a, b}, {3.0, 1.0});
  EXPECT_NEAR(weighted.rows[0][0], 0.75 * a.rows[0][0] + 0.25 * b.rows[0][0], 1e-15);
}

TEST(Fusion, MisalignedSystemsAreRejected) {
  LogProbTable a = toy_table(), b = toy_table();
  std::swap(b.ids[0], b.ids[1]);
  EXPECT_EQ(error_of([&] { average_log_probs({a, b}); }).code(), ErrorCode::misalignment);
}

// ---------------------------------------------------------------- command line

class CommandLine : public ::testing::Test {
 protected:
  static fs::path work_;

  static void SetUpTestSuite() {
    work_ = fs::temp_directory_path() / "scaloforge_cli_test";
    fs::remove_all(work_);
    fs::create_directories(work_);
    std::ofstream manifest(work_ / "manifest.tsv");
    manifest << "id\tsource\tscene_label\tcity_label\tsplit\n";
    const char* kinds[] = {"tone:440", "tone:2000", "white-noise:0", "chirp:300-3000"};
    int i = 0;
    for (int scene = 0; scene < 4; ++scene) {
      for (const char* city : {"a", "b", "c"}) {
        for (int rep = 0; rep < 2; ++rep, ++i) {
          manifest << "s" << i << "\tsynth:" << kinds[scene] << ":1:16000:" << i << "\tscene" << scene << "\t" << city
                   << "\t" << (std::string(city) == "c" ? "test" : "train") << "\n";
        }
      }
    }
    write(work_ / "exp.toml",
          "seeds = [1, 2]\n"
          "[feature]\n"
          "f_high = 8000\n"
          "window = 0.128\n"
          "shift = 0.064\n"
          "[classifier]\n"
          "max_epochs = 4\n"
          "hidden = 16\n"
          "[augment]\n"
          "max_iterations = 2\n"
          "gan_epochs = 2\n"
          "gan_hidden = 16\n"
          "subset_epochs = 2\n"
          "[paths]\n"
          "manifest = \"manifest.tsv\"\n");
  }

  static void write(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
  }

  static int run(const std::string& args) {
    const std::string cmd = std::string(SCALOFORGE_CLI_PATH) + " " + args + " > " +
                            (work_ / "last.log").string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  static std::string read(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static std::map<std::string, std::string> tree(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
      if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = read(e.path());
    }
    return files;
  }

  static std::string config() { return "--config " + (work_ / "exp.toml").string(); }
};

fs::path CommandLine::work_;

TEST_F(CommandLine, FullPipelineSucceedsAndIsByteDeterministic) {
  for (const char* dir : {"run1", "run2"}) {
    const std::string out = " --out " + (work_ / dir).string();
    for (const char* cmd : {"extract", "train", "augment", "evaluate", "fuse"}) {
      ASSERT_EQ(run(std::string(cmd) + " " + config() + out), kExitOk) << cmd << "\n" << read(work_ / "last.log");
    }
  }
  const auto a = tree(work_ / "run1"), b = tree(work_ / "run2");
  ASSERT_EQ(a.size(), b.size());
  for (const auto& [name, bytes] : a) {
    ASSERT_TRUE(b.count(name)) << name;
    EXPECT_EQ(bytes, b.at(name)) << name;
  }
  for (const char* f : {"run_extract.json", "run_train.json", "run_augment.json", "run_evaluate.json",
                        "run_fuse.json", "features/norm_stats.json", "models/clf_seed1.sclm",
                        "models/curve_seed2.csv", "models/aug_seed1.sclm", "augment/audit_seed1.jsonl",
                        "fused/predictions.csv", "fused/report.json"}) {
    EXPECT_TRUE(a.count(f)) << f;
  }
  for (const char* cmd : {"extract", "train", "augment", "evaluate", "fuse"}) {
    const auto rec = nlohmann::json::parse(a.at(std::string("run_") + cmd + ".json"));
    for (const auto& [file, hash] : rec["outputs"].items()) {
      EXPECT_NE(hash, "cbf29ce484222325") << file << " was hashed while still empty";
      EXPECT_FALSE(fs::path(file).is_absolute()) << file;
    }
  }
  const auto record = nlohmann::json::parse(a.at("run_train.json"));
  EXPECT_EQ(record["command"], "train");
  EXPECT_EQ(record["seeds"], nlohmann::json::array({1, 2}));
}

TEST_F(CommandLine, ConfigurationProblemsExitWithCodeTwo) {
  EXPECT_EQ(run("extract"), kExitConfig);                      // --config missing
  EXPECT_EQ(run("frobnicate " + config()), kExitConfig);       // unknown command
  EXPECT_EQ(run("extract --config /nonexistent.toml"), kExitConfig);
  write(work_ / "bad.toml", "[feature]\nwindw = 0.1\n");
  EXPECT_EQ(run("extract --config " + (work_ / "bad.toml").string() + " --out " + (work_ / "bad").string()),
            kExitConfig);
  EXPECT_NE(read(work_ / "last.log").find("feature.windw"), std::string::npos);
}

TEST_F(CommandLine, UnreadableEntriesGivePartialSuccess) {
  write(work_ / "partial.tsv",
        "id\tsource\tscene_label\tcity_label\n"
        "good\tsynth:tone:440:1:16000:1\tpark\ta\n"
        "bad\tmissing.wav\tbus\tb\n");
  const fs::path out = work_ / "partial";
  EXPECT_EQ(run("extract " + config() + " --manifest " + (work_ / "partial.tsv").string() + " --out " + out.string()),
            kExitPartial);
  EXPECT_TRUE(fs::exists(out / "features" / "good.sclf"));
  EXPECT_FALSE(fs::exists(out / "features" / "bad.sclf"));
  EXPECT_NE(read(work_ / "last.log").find("bad"), std::string::npos);
}

TEST(Commands, UnknownCommandIsAConfigError) {
  std::ostringstream log;
  EXPECT_EQ(run_command("frobnicate", CommandOptions{}, log), kExitConfig);
}

}  // namespace
}  // namespace scaloforge
