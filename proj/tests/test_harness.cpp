// Copyright 2026 The Footprint Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "footprint/harness.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>

namespace footprint {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  CompositeSpec synth = presets::imbalanced_shifted(600, 0);
  synth.name = "tiny_imbalanced";
  cfg.datasets = {presets::dataset_config(synth)};
  cfg.classifiers = {standard_spec("decision_tree"), standard_spec("knn"),
                     standard_spec("gaussian_nb")};
  cfg.seeds = {1, 2};
  cfg.codecs = {"none", "lsh", "hamming"};
  cfg.jobs = 2;
  return cfg;
}

TEST(Config, JsonRoundTrip) {
  const ExperimentConfig cfg = default_config();
  const ExperimentConfig round = config_from_json(config_to_json(cfg));
  EXPECT_EQ(round.datasets.size(), cfg.datasets.size());
  EXPECT_EQ(round.classifiers.size(), cfg.classifiers.size());
  EXPECT_EQ(round.seeds, cfg.seeds);
  EXPECT_EQ(round.codecs, cfg.codecs);
  EXPECT_DOUBLE_EQ(round.threshold, cfg.threshold);
  EXPECT_EQ(config_to_json(round), config_to_json(cfg));
}

TEST(Config, ValidationCatchesEmptySections) {
  ExperimentConfig cfg = small_config();
  cfg.seeds.clear();
  EXPECT_THROW(validate_config(cfg), Error);
  cfg = small_config();
  cfg.codecs = {"rot13"};
  EXPECT_THROW(validate_config(cfg), Error);
}

TEST(PrepareDataset, MetricRuleAndProbeProtocol) {
  const auto prep = prepare_dataset(presets::dataset_config(presets::imbalanced_shifted(600, 0)), 3);
  EXPECT_EQ(prep.metric, Metric::kAveragePrecision);  // binary, imbalance >= 2
  EXPECT_EQ(prep.positive_class, 1);                  // the rare class
  EXPECT_EQ(prep.probe.size(), static_cast<std::size_t>(prep.train.n_points()) / 2);

  const auto balanced = prepare_dataset(presets::dataset_config(presets::balanced(600, 0)), 3);
  EXPECT_EQ(balanced.metric, Metric::kAccuracy);
}

TEST(RunAudit, EveryConfiguredTupleAppearsExactlyOnce) {
  const ExperimentConfig cfg = small_config();
  const AuditReport report = run_audit(cfg);
  EXPECT_EQ(report.cells.size(), cfg.datasets.size() * cfg.classifiers.size() * cfg.codecs.size() *
                                     cfg.seeds.size());
  std::set<std::string> keys;
  for (const auto& c : report.cells) {
    EXPECT_TRUE(c.ok) << c.error;
    keys.insert(c.dataset + "|" + c.classifier + "|" + c.codec + "|" + std::to_string(c.seed));
  }
  EXPECT_EQ(keys.size(), report.cells.size());
}

TEST(RunAudit, DeterministicAcrossRunsAndSchedules) {
  ExperimentConfig cfg = small_config();
  const AuditReport a = run_audit(cfg);
  cfg.jobs = 1;  // different scheduling must not change results
  const AuditReport b = run_audit(cfg);
  ASSERT_EQ(a.cells.size(), b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    EXPECT_EQ(a.cells[i].dataset, b.cells[i].dataset);
    EXPECT_EQ(a.cells[i].classifier, b.cells[i].classifier);
    EXPECT_DOUBLE_EQ(a.cells[i].vul, b.cells[i].vul);
    EXPECT_DOUBLE_EQ(a.cells[i].probe_perf.value, b.cells[i].probe_perf.value);
  }
}

TEST(RunAudit, FailedDatasetIsCapturedPerCell) {
  ExperimentConfig cfg = small_config();
  DatasetConfig broken;
  broken.name = "missing";
  broken.csv_path = "/nonexistent/file.csv";
  cfg.datasets.push_back(broken);
  const AuditReport report = run_audit(cfg);
  int failed = 0;
  for (const auto& c : report.cells) {
    if (c.dataset == "missing") {
      EXPECT_FALSE(c.ok);
      EXPECT_FALSE(c.error.empty());
      ++failed;
    } else {
      EXPECT_TRUE(c.ok);
    }
  }
  EXPECT_EQ(failed, static_cast<int>(cfg.classifiers.size() * cfg.codecs.size() * cfg.seeds.size()));
}

TEST(Spearman, KnownValues) {
  EXPECT_DOUBLE_EQ(spearman({1, 2, 3, 4}, {10, 20, 30, 40}), 1.0);
  EXPECT_DOUBLE_EQ(spearman({1, 2, 3, 4}, {9, 7, 5, 3}), -1.0);
  EXPECT_TRUE(std::isnan(spearman({1}, {2})));
  EXPECT_TRUE(std::isnan(spearman({1, 1, 1}, {1, 2, 3})));
  // Monotone but nonlinear is still rank-perfect.
  EXPECT_DOUBLE_EQ(spearman({1, 2, 3, 4}, {1, 8, 27, 64}), 1.0);
}

TEST(Sweep, SinglePointCurveHasUndefinedCorrelation) {
  ExperimentConfig cfg = small_config();
  cfg.seeds = {1};
  cfg.codecs = {"none"};
  cfg.sweep.layers = {2};
  cfg.sweep.neurons = {};
  // Compress the MLP so the sweep stays fast.
  const AuditReport report = run_audit(cfg, /*with_sweep=*/true);
  EXPECT_EQ(report.sweep.size(), 1u);
  EXPECT_TRUE(std::isnan(sweep_spearman(report, "tiny_imbalanced", "layers")));
  const std::string csv = sweep_summary_csv(report);
  EXPECT_NE(csv.find("undefined"), std::string::npos);
}

TEST(Emit, FilesShapesAndDeterminism) {
  const ExperimentConfig cfg = small_config();
  const AuditReport report = run_audit(cfg);

  const fs::path dir_a = fs::temp_directory_path() / "footprint_emit_a";
  const fs::path dir_b = fs::temp_directory_path() / "footprint_emit_b";
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
  const auto written_a = emit_report(report, dir_a.string(), {"csv", "json", "svg"});
  const AuditReport report2 = run_audit(cfg);
  const auto written_b = emit_report(report2, dir_b.string(), {"csv", "json", "svg"});

  ASSERT_EQ(written_a.size(), written_b.size());
  for (std::size_t i = 0; i < written_a.size(); ++i) {
    EXPECT_EQ(slurp(written_a[i]), slurp(written_b[i])) << written_a[i];
  }

  // Matrix CSV: header plus one row per dataset, one value column per classifier.
  const std::string matrix = slurp(dir_a / "vulnerability_matrix.csv");
  const auto lines = std::count(matrix.begin(), matrix.end(), '\n');
  EXPECT_EQ(lines, 1 + static_cast<long>(cfg.datasets.size()));
  const std::string header = matrix.substr(0, matrix.find('\n'));
  EXPECT_EQ(std::count(header.begin(), header.end(), ','),
            static_cast<long>(cfg.classifiers.size()));

  EXPECT_TRUE(fs::exists(dir_a / "obfuscation_tiny_imbalanced.csv"));
  EXPECT_TRUE(fs::exists(dir_a / "tradeoff_tiny_imbalanced.csv"));
  EXPECT_TRUE(fs::exists(dir_a / "audit.json"));
  EXPECT_TRUE(fs::exists(dir_a / "vulnerability_matrix.svg"));
  EXPECT_FALSE(fs::exists(dir_a / "errors.json"));  // clean run, no sidecar

  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

TEST(Emit, MissingCellsLeaveEmptyFieldsAndSidecar) {
  ExperimentConfig cfg = small_config();
  DatasetConfig broken;
  broken.name = "missing";
  broken.csv_path = "/nonexistent/file.csv";
  cfg.datasets.push_back(broken);
  const AuditReport report = run_audit(cfg);

  const fs::path dir = fs::temp_directory_path() / "footprint_emit_err";
  fs::remove_all(dir);
  emit_report(report, dir.string(), {"csv"});
  EXPECT_TRUE(fs::exists(dir / "errors.json"));

  const std::string matrix = slurp(dir / "vulnerability_matrix.csv");
  // The broken dataset's row has empty value cells.
  const auto pos = matrix.find("missing");
  ASSERT_NE(pos, std::string::npos);
  const std::string row = matrix.substr(pos, matrix.find('\n', pos) - pos);
  EXPECT_EQ(row, "missing,,,");

  fs::remove_all(dir);
}

TEST(Emit, BundleRoundTripReproducesArtifacts) {
  const ExperimentConfig cfg = small_config();
  const AuditReport report = run_audit(cfg);
  const fs::path dir = fs::temp_directory_path() / "footprint_bundle";
  fs::remove_all(dir);
  emit_report(report, dir.string(), {"csv", "json"});

  nlohmann::json bundle;
  std::ifstream in(dir / "audit.json");
  in >> bundle;
  const AuditReport loaded = report_from_json(bundle);

  const fs::path dir2 = fs::temp_directory_path() / "footprint_bundle2";
  fs::remove_all(dir2);
  emit_report(loaded, dir2.string(), {"csv"});
  EXPECT_EQ(slurp(dir / "vulnerability_matrix.csv"), slurp(dir2 / "vulnerability_matrix.csv"));
  EXPECT_EQ(slurp(dir / "obfuscation_tiny_imbalanced.csv"),
            slurp(dir2 / "obfuscation_tiny_imbalanced.csv"));

  fs::remove_all(dir);
  fs::remove_all(dir2);
}

TEST(Aggregates, IdentityCodecChangesNothing) {
  const ExperimentConfig cfg = small_config();
  const AuditReport report = run_audit(cfg);
  const auto base = report.aggregate("tiny_imbalanced", "decision_tree", "none");
  ASSERT_TRUE(base.has_value());
  // Treating the plain cells as their own baseline: zero change, unit tradeoff.
  EXPECT_DOUBLE_EQ(vul_change(base->mean_vul, base->mean_vul), 0.0);
  EXPECT_DOUBLE_EQ(
      pp_tradeoff(base->mean_vul, base->mean_vul, base->mean_test_perf, base->mean_test_perf), 1.0);
}

TEST(Aggregates, ObfuscatedCellsShareTheBaselineSplit) {
  // The plain and obfuscated cells for one (dataset, seed) come from one
  // PreparedData: probe indices and labels agree, so the only difference is
  // the feature representation. Spot-check via per-seed determinism: the
  // no-op relabeling of a codec run must reuse the same probe draw.
  const auto prep_a = prepare_dataset(presets::dataset_config(presets::balanced(400, 0)), 9);
  const auto prep_b = prepare_dataset(presets::dataset_config(presets::balanced(400, 0)), 9);
  EXPECT_EQ(prep_a.probe, prep_b.probe);
  EXPECT_EQ(prep_a.train.labels, prep_b.train.labels);
}

}  // namespace
}  // namespace footprint
