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

#pragma once

#include <atomic>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "footprint/classifiers.hpp"
#include "footprint/common.hpp"
#include "footprint/dataset.hpp"
#include "footprint/metrics.hpp"
#include "footprint/obfuscate.hpp"
#include "footprint/synth.hpp"

namespace footprint {

// ---------------------------------------------------------------------------
// Configuration

struct DatasetConfig {
  std::string name;
  // CSV manifest
  std::string csv_path;
  std::string label_column = "last";
  bool has_header = false;
  bool one_hot = false;
  // Synthetic generator (used when csv_path is empty)
  std::optional<CompositeSpec> synthetic;
  // "auto", "accuracy" or "average_precision"
  std::string metric = "auto";
};

struct SweepConfig {
  std::vector<int> layers{1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<int> neurons{4, 8, 16, 32, 64, 128};
};

struct ExperimentConfig {
  std::vector<DatasetConfig> datasets;
  std::vector<ClassifierSpec> classifiers;
  std::vector<std::string> codecs{"none", "lsh", "hamming"};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  double threshold = 1.4;
  int lsh_planes = 0;  // 0 means one plane per feature
  bool lsh_origin_anchored = false;
  SweepConfig sweep;
  int jobs = 2;
  std::string out_dir = "out";
  std::vector<std::string> formats{"csv", "json"};
};

inline void validate_config(const ExperimentConfig& cfg) {
  if (cfg.datasets.empty()) throw Error("config: needs at least one dataset");
  if (cfg.classifiers.empty()) throw Error("config: needs at least one classifier");
  if (cfg.seeds.empty()) throw Error("config: needs at least one seed");
  for (const auto& codec : cfg.codecs) {
    if (codec != "none" && codec != "lsh" && codec != "hamming") {
      throw Error("config: unknown codec " + codec);
    }
  }
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  if (j.contains("datasets")) {
    for (const auto& d : j.at("datasets")) {
      DatasetConfig dc;
      dc.name = d.at("name").get<std::string>();
      if (d.contains("csv")) {
        dc.csv_path = d.at("csv").get<std::string>();
        dc.label_column = d.value("label_column", std::string("last"));
        dc.has_header = d.value("has_header", false);
        dc.one_hot = d.value("one_hot", false);
      } else if (d.contains("synthetic")) {
        const auto& s = d.at("synthetic");
        CompositeSpec spec;
        spec.name = dc.name;
        spec.n_features = s.value("n_features", 8);
        spec.separation = s.value("separation", 2.0);
        if (s.contains("contamination")) {
          if (s.at("contamination").is_number()) {
            spec.contamination = {s.at("contamination").get<double>()};
          } else {
            spec.contamination = s.at("contamination").get<std::vector<double>>();
          }
        }
        spec.variance_ratio = s.value("variance_ratio", 1.0);
        spec.n_variance_features = s.value("n_variance_features", 0);
        spec.quantize_step = s.value("quantize_step", 0.0);
        spec.train_priors = s.value("train_priors", std::vector<double>{0.5, 0.5});
        spec.test_priors = s.value("test_priors", spec.train_priors);
        spec.n_train = s.value("n_train", 4000);
        spec.n_test = s.value("n_test", 1000);
        if (s.contains("test_translation")) {
          const auto t = s.at("test_translation").get<std::vector<double>>();
          spec.test_translation = Eigen::Map<const Vector>(t.data(), static_cast<Eigen::Index>(t.size()));
        }
        dc.synthetic = spec;
      } else {
        throw Error("config: dataset " + dc.name + " needs either csv or synthetic");
      }
      dc.metric = d.value("metric", std::string("auto"));
      cfg.datasets.push_back(std::move(dc));
    }
  }
  if (j.contains("classifiers")) {
    cfg.classifiers = grid_from_json(j.at("classifiers"));
  } else {
    cfg.classifiers = standard_grid();
  }
  if (j.contains("codecs")) cfg.codecs = j.at("codecs").get<std::vector<std::string>>();
  if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  cfg.threshold = j.value("threshold", 1.4);
  if (j.contains("lsh")) {
    cfg.lsh_planes = j.at("lsh").value("planes", 0);
    cfg.lsh_origin_anchored = j.at("lsh").value("origin_anchored", false);
  }
  if (j.contains("sweep")) {
    cfg.sweep.layers = j.at("sweep").value("layers", cfg.sweep.layers);
    cfg.sweep.neurons = j.at("sweep").value("neurons", cfg.sweep.neurons);
  }
  cfg.jobs = j.value("jobs", 2);
  if (j.contains("output")) {
    cfg.out_dir = j.at("output").value("dir", std::string("out"));
    cfg.formats = j.at("output").value("formats", cfg.formats);
  }
  validate_config(cfg);
  return cfg;
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json datasets = nlohmann::json::array();
  for (const auto& d : cfg.datasets) {
    nlohmann::json dj{{"name", d.name}, {"metric", d.metric}};
    if (!d.csv_path.empty()) {
      dj["csv"] = d.csv_path;
      dj["label_column"] = d.label_column;
      dj["has_header"] = d.has_header;
      dj["one_hot"] = d.one_hot;
    } else if (d.synthetic) {
      nlohmann::json s{{"n_features", d.synthetic->n_features},
                       {"separation", d.synthetic->separation},
                       {"contamination", d.synthetic->contamination},
                       {"variance_ratio", d.synthetic->variance_ratio},
                       {"n_variance_features", d.synthetic->n_variance_features},
                       {"quantize_step", d.synthetic->quantize_step},
                       {"train_priors", d.synthetic->train_priors},
                       {"test_priors", d.synthetic->test_priors},
                       {"n_train", d.synthetic->n_train},
                       {"n_test", d.synthetic->n_test}};
      if (d.synthetic->test_translation.size() > 0) {
        std::vector<double> t(d.synthetic->test_translation.data(),
                              d.synthetic->test_translation.data() + d.synthetic->test_translation.size());
        s["test_translation"] = t;
      }
      dj["synthetic"] = s;
    }
    datasets.push_back(dj);
  }
  nlohmann::json classifiers = nlohmann::json::array();
  for (const auto& c : cfg.classifiers) classifiers.push_back(spec_to_json(c));
  return {{"datasets", datasets},
          {"classifiers", classifiers},
          {"codecs", cfg.codecs},
          {"seeds", cfg.seeds},
          {"threshold", cfg.threshold},
          {"lsh", {{"planes", cfg.lsh_planes}, {"origin_anchored", cfg.lsh_origin_anchored}}},
          {"sweep", {{"layers", cfg.sweep.layers}, {"neurons", cfg.sweep.neurons}}},
          {"jobs", cfg.jobs},
          {"output", {{"dir", cfg.out_dir}, {"formats", cfg.formats}}}};
}

// Desk-scale synthetic presets used by the default configuration: a heavily
// imbalanced two-class mixture whose test partition carries prior and
// covariate shift, and a balanced no-shift control.
namespace presets {

inline CompositeSpec imbalanced_shifted(int n_total, std::uint64_t seed) {
  CompositeSpec spec;
  spec.name = "imbalanced_shifted";
  spec.n_features = 6;
  spec.separation = 3.2;
  // Light contamination of the majority class keeps the rare class rankable;
  // heavier contamination of the rare class plants the memorization bait.
  spec.contamination = {0.02, 0.17};
  spec.train_priors = {8.55 / 9.55, 1.0 / 9.55};  // imbalance ratio 8.55
  spec.test_priors = {0.893, 0.107};
  spec.n_train = (n_total * 4) / 5;
  spec.n_test = n_total - spec.n_train;
  spec.seed = seed;
  // Covariate shift orthogonal to the class-mean direction: the cloud moves
  // without moving the coarse boundary.
  const Vector dir = spec.direction();
  Vector t = Vector::Zero(spec.n_features);
  t[spec.n_features - 1] = 1.0;
  t -= dir * dir.dot(t);
  spec.test_translation = 0.1 * t / t.norm();
  return spec;
}

inline CompositeSpec balanced(int n_total, std::uint64_t seed) {
  CompositeSpec spec;
  spec.name = "balanced";
  spec.n_features = 4;
  spec.separation = 2.2;
  spec.contamination = {0.0, 0.0};
  // Half of the class signal lives in per-feature variances, which survives
  // in raw space but not in mean-threshold bit codes; lattice quantization
  // keeps the residual overlap unmemorizable at any model capacity.
  spec.variance_ratio = 5.0;
  spec.n_variance_features = 2;
  spec.quantize_step = 1.2;
  spec.train_priors = {0.5, 0.5};
  spec.test_priors = {0.5, 0.5};
  spec.n_train = (n_total * 4) / 5;
  spec.n_test = n_total - spec.n_train;
  spec.seed = seed;
  return spec;
}

inline DatasetConfig dataset_config(const CompositeSpec& spec) {
  DatasetConfig dc;
  dc.name = spec.name;
  dc.synthetic = spec;
  return dc;
}

}  // namespace presets

inline ExperimentConfig default_config(int n_total = 5000) {
  ExperimentConfig cfg;
  cfg.datasets = {presets::dataset_config(presets::imbalanced_shifted(n_total, 0)),
                  presets::dataset_config(presets::balanced(n_total, 0))};
  cfg.classifiers = standard_grid();
  return cfg;
}

// ---------------------------------------------------------------------------
// Prepared data and cells

// One dataset realization for one seed: fixed train/test partition, probe
// subsample and metric. Plain and obfuscated runs share this split; only the
// feature representation changes.
struct PreparedData {
  std::string dataset;
  std::uint64_t seed = 0;
  Dataset train;
  Dataset test;
  std::vector<std::size_t> probe;
  Metric metric = Metric::kAccuracy;
  int positive_class = 1;  // rare class, used for average precision
};

inline PreparedData prepare_dataset(const DatasetConfig& dc, std::uint64_t seed) {
  PreparedData prep;
  prep.dataset = dc.name;
  prep.seed = seed;

  if (!dc.csv_path.empty()) {
    LoadCsvOptions opts;
    opts.has_header = dc.has_header;
    opts.one_hot_categoricals = dc.one_hot;
    const Dataset full = load_csv(dc.csv_path, dc.label_column, opts);
    Split split = split_dataset(full, seed);
    prep.train = std::move(split.train);
    prep.test = std::move(split.test);
    prep.probe = std::move(split.probe);
  } else if (dc.synthetic) {
    CompositeSpec spec = *dc.synthetic;
    spec.seed = Rng(seed).split("synth").split(spec.name).next_u64();
    auto [train, test] = gen_composite(spec);
    prep.train = std::move(train);
    prep.test = std::move(test);
    prep.probe = draw_probe(static_cast<std::size_t>(prep.train.n_points()), seed);
  } else {
    throw Error("prepare_dataset: " + dc.name + " has no source");
  }
  prep.train.name = dc.name + "/train";
  prep.test.name = dc.name + "/test";

  if (dc.metric == "accuracy") {
    prep.metric = Metric::kAccuracy;
  } else if (dc.metric == "average_precision") {
    prep.metric = Metric::kAveragePrecision;
  } else {
    prep.metric = choose_metric(prep.train.n_classes, prep.train.imbalance_ratio());
  }
  if (prep.metric == Metric::kAveragePrecision) {
    const auto counts = prep.train.class_counts();
    prep.positive_class = counts[1] <= counts[0] ? 1 : 0;
  }
  return prep;
}

// Feature views of one prepared dataset under one codec. For the plain view,
// distance/gradient families get the standardized variant; in code space all
// families see the 0/1 bits as-is.
struct FeatureView {
  std::string codec;  // none | lsh | hamming
  Matrix train_raw;
  Matrix test_raw;
  Matrix train_std;   // only filled for codec "none"
  Matrix test_std;

  const Matrix& train_for(Family f) const {
    return (codec == "none" && wants_standardized(f)) ? train_std : train_raw;
  }
  const Matrix& test_for(Family f) const {
    return (codec == "none" && wants_standardized(f)) ? test_std : test_raw;
  }
};

inline FeatureView make_view(const PreparedData& prep, const std::string& codec,
                             const ExperimentConfig& cfg) {
  FeatureView view;
  view.codec = codec;
  if (codec == "none") {
    view.train_raw = prep.train.features;
    view.test_raw = prep.test.features;
    const StandardScale scale = fit_standardizer(prep.train.features);
    view.train_std = scale.apply(prep.train.features);
    view.test_std = scale.apply(prep.test.features);
  } else if (codec == "lsh") {
    const int planes = cfg.lsh_planes > 0 ? cfg.lsh_planes : static_cast<int>(prep.train.n_features());
    const std::uint64_t codec_seed = Rng(prep.seed).split("codec").split(prep.dataset).next_u64();
    const LshCodec lsh = fit_lsh(prep.train.features, planes, codec_seed, cfg.lsh_origin_anchored);
    view.train_raw = encode_lsh(lsh, prep.train.features);
    view.test_raw = encode_lsh(lsh, prep.test.features);
  } else if (codec == "hamming") {
    const HammingCodec ham = fit_hamming(prep.train.features);
    view.train_raw = encode_hamming(ham, prep.train.features);
    view.test_raw = encode_hamming(ham, prep.test.features);
  } else {
    throw Error("make_view: unknown codec " + codec);
  }
  return view;
}

struct CellResult {
  std::string dataset;
  std::string classifier;
  std::string codec;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  PerfValue probe_perf;
  PerfValue test_perf;
  double vul = 0.0;
  double training_loss = 0.0;
};

inline PerfValue evaluate_perf(const Model& model, const Matrix& features, const Labels& truth,
                               Metric metric, int positive_class) {
  if (metric == Metric::kAccuracy) {
    return accuracy(model.predict(features), truth);
  }
  const Matrix scores = model.predict_scores(features);
  std::vector<double> positive_scores(static_cast<std::size_t>(scores.rows()));
  std::vector<int> binary_truth(truth.size());
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    positive_scores[static_cast<std::size_t>(i)] = scores(i, positive_class);
    binary_truth[static_cast<std::size_t>(i)] = truth[static_cast<std::size_t>(i)] == positive_class;
  }
  return average_precision(positive_scores, binary_truth);
}

// Fits one classifier on one feature view and measures probe/test performance
// and the vulnerability ratio.
inline CellResult run_cell(const PreparedData& prep, const FeatureView& view,
                           const ClassifierSpec& spec) {
  CellResult cell;
  cell.dataset = prep.dataset;
  cell.classifier = spec.name;
  cell.codec = view.codec;
  cell.seed = prep.seed;
  try {
    const std::uint64_t fit_seed = Rng(prep.seed)
                                       .split("cell")
                                       .split(prep.dataset)
                                       .split(spec.name)
                                       .split(view.codec)
                                       .next_u64();
    const TrainedModel model = fit(spec.with_seed(fit_seed), view.train_for(spec.family),
                                   prep.train.labels, prep.train.n_classes);

    Matrix probe_features(static_cast<Eigen::Index>(prep.probe.size()),
                          view.train_for(spec.family).cols());
    Labels probe_labels(prep.probe.size());
    for (std::size_t i = 0; i < prep.probe.size(); ++i) {
      probe_features.row(static_cast<Eigen::Index>(i)) =
          view.train_for(spec.family).row(static_cast<Eigen::Index>(prep.probe[i]));
      probe_labels[i] = prep.train.labels[prep.probe[i]];
    }

    cell.probe_perf = evaluate_perf(*model.model, probe_features, probe_labels, prep.metric,
                                    prep.positive_class);
    cell.test_perf = evaluate_perf(*model.model, view.test_for(spec.family), prep.test.labels,
                                   prep.metric, prep.positive_class);
    cell.vul = vulnerability(cell.probe_perf, cell.test_perf);
    cell.training_loss = model.training_loss();
    cell.ok = true;
  } catch (const std::exception& e) {
    cell.ok = false;
    cell.error = e.what();
  }
  return cell;
}

// ---------------------------------------------------------------------------
// Reports

struct SweepPoint {
  std::string dataset;
  std::string axis;  // layers | neurons
  int value = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double vul = 0.0;
};

struct AuditReport {
  nlohmann::json config_echo;
  double threshold = 1.4;
  std::vector<std::string> dataset_order;
  std::vector<std::string> classifier_order;
  std::vector<std::string> codec_order;
  std::vector<std::uint64_t> seeds;
  std::vector<CellResult> cells;
  std::vector<SweepPoint> sweep;

  const CellResult* find(const std::string& dataset, const std::string& classifier,
                         const std::string& codec, std::uint64_t seed) const {
    for (const auto& c : cells) {
      if (c.dataset == dataset && c.classifier == classifier && c.codec == codec && c.seed == seed) {
        return &c;
      }
    }
    return nullptr;
  }

  struct Aggregate {
    double mean_vul = 0.0;
    double stddev_vul = 0.0;
    double mean_test_perf = 0.0;
    int n = 0;
  };

  std::optional<Aggregate> aggregate(const std::string& dataset, const std::string& classifier,
                                     const std::string& codec) const {
    std::vector<double> vuls, perfs;
    for (const auto& c : cells) {
      if (c.ok && c.dataset == dataset && c.classifier == classifier && c.codec == codec) {
        vuls.push_back(c.vul);
        perfs.push_back(c.test_perf.value);
      }
    }
    if (vuls.empty()) return std::nullopt;
    Aggregate a;
    a.n = static_cast<int>(vuls.size());
    for (double v : vuls) a.mean_vul += v;
    a.mean_vul /= a.n;
    for (double v : perfs) a.mean_test_perf += v;
    a.mean_test_perf /= a.n;
    double sq = 0.0;
    for (double v : vuls) sq += (v - a.mean_vul) * (v - a.mean_vul);
    a.stddev_vul = a.n > 1 ? std::sqrt(sq / (a.n - 1)) : 0.0;
    return a;
  }
};

// Spearman rank correlation with average ranks for ties; NaN when undefined.
inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  if (n != b.size() || n < 2) return std::numeric_limits<double>::quiet_NaN();
  auto ranks = [](const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
    std::vector<double> r(n);
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
      const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto ra = ranks(a), rb = ranks(b);
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= n;
  mb /= n;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cov += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (va <= 0.0 || vb <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return cov / std::sqrt(va * vb);
}

// Correlation of vulnerability against a sweep axis, pooled across seeds.
inline double sweep_spearman(const AuditReport& report, const std::string& dataset,
                             const std::string& axis) {
  std::vector<double> xs, ys;
  for (const auto& p : report.sweep) {
    if (p.ok && p.dataset == dataset && p.axis == axis) {
      xs.push_back(static_cast<double>(p.value));
      ys.push_back(p.vul);
    }
  }
  return spearman(xs, ys);
}

// ---------------------------------------------------------------------------
// Runner

namespace detail {

template <typename Job>
void run_pool(std::vector<Job>& jobs, int workers) {
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) break;
      jobs[i]();
    }
  };
  const int n_workers = std::max(1, workers);
  if (n_workers == 1) {
    work();
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n_workers));
  for (int w = 0; w < n_workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
}

// Deep width schedule truncated to the requested depth.
inline std::vector<int> layer_schedule(int depth) {
  static const std::vector<int> kDeep{128, 64, 32, 32, 16, 16, 8, 8};
  if (depth < 1 || depth > static_cast<int>(kDeep.size())) {
    throw Error("sweep: layer depth out of range");
  }
  return {kDeep.begin(), kDeep.begin() + depth};
}

}  // namespace detail

// Runs every (dataset, classifier, codec, seed) cell. Cells are independent
// jobs over a bounded pool; a cell failure is recorded, not fatal.
inline AuditReport run_audit(const ExperimentConfig& cfg, bool with_sweep = false) {
  validate_config(cfg);
  AuditReport report;
  report.config_echo = config_to_json(cfg);
  report.threshold = cfg.threshold;
  for (const auto& d : cfg.datasets) report.dataset_order.push_back(d.name);
  for (const auto& c : cfg.classifiers) report.classifier_order.push_back(c.name);
  report.codec_order = cfg.codecs;
  report.seeds = cfg.seeds;

  for (const auto& dc : cfg.datasets) {
    for (const std::uint64_t seed : cfg.seeds) {
      PreparedData prep;
      try {
        prep = prepare_dataset(dc, seed);
      } catch (const std::exception& e) {
        // The whole (dataset, seed) slice fails with the same message.
        for (const auto& codec : cfg.codecs) {
          for (const auto& spec : cfg.classifiers) {
            CellResult cell;
            cell.dataset = dc.name;
            cell.classifier = spec.name;
            cell.codec = codec;
            cell.seed = seed;
            cell.error = e.what();
            report.cells.push_back(std::move(cell));
          }
        }
        continue;
      }

      for (const auto& codec : cfg.codecs) {
        const FeatureView view = make_view(prep, codec, cfg);
        std::vector<CellResult> results(cfg.classifiers.size());
        std::vector<std::function<void()>> jobs;
        jobs.reserve(cfg.classifiers.size());
        for (std::size_t i = 0; i < cfg.classifiers.size(); ++i) {
          jobs.emplace_back([&, i] { results[i] = run_cell(prep, view, cfg.classifiers[i]); });
        }
        detail::run_pool(jobs, cfg.jobs);
        for (auto& r : results) report.cells.push_back(std::move(r));
      }

      if (with_sweep) {
        const FeatureView view = make_view(prep, "none", cfg);
        struct SweepJob {
          std::string axis;
          int value;
          std::vector<int> widths;
        };
        std::vector<SweepJob> sweep_jobs;
        for (int depth : cfg.sweep.layers) {
          sweep_jobs.push_back({"layers", depth, detail::layer_schedule(depth)});
        }
        for (int width : cfg.sweep.neurons) {
          sweep_jobs.push_back({"neurons", width, {width}});
        }
        std::vector<SweepPoint> points(sweep_jobs.size());
        std::vector<std::function<void()>> jobs;
        for (std::size_t i = 0; i < sweep_jobs.size(); ++i) {
          jobs.emplace_back([&, i] {
            ClassifierSpec spec = standard_spec("mlp_shallow");
            spec.name = "mlp_" + sweep_jobs[i].axis + "_" + std::to_string(sweep_jobs[i].value);
            spec.hidden_layers = sweep_jobs[i].widths;
            CellResult cell = run_cell(prep, view, spec);
            points[i] = SweepPoint{prep.dataset, sweep_jobs[i].axis, sweep_jobs[i].value,
                                   prep.seed,   cell.ok,            cell.error,
                                   cell.vul};
          });
        }
        detail::run_pool(jobs, cfg.jobs);
        for (auto& p : points) report.sweep.push_back(std::move(p));
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Emission

namespace detail {

inline std::string sanitize(const std::string& name) {
  std::string out;
  for (char c : name) out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
  return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

inline std::string csv_cell(const std::optional<AuditReport::Aggregate>& agg) {
  return agg ? format_double(agg->mean_vul) : std::string();
}

// White-to-red ramp over vulnerability values, saturating at 2.2.
inline std::string heat_color(double v) {
  const double t = std::clamp((v - 0.8) / (2.2 - 0.8), 0.0, 1.0);
  const int r = 255 - static_cast<int>(t * (255 - 178));
  const int g = 255 - static_cast<int>(t * (255 - 24));
  const int b = 255 - static_cast<int>(t * (255 - 43));
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace detail

// Mean-over-seeds vulnerability matrix (datasets x classifiers), plain data.
inline std::string vulnerability_matrix_csv(const AuditReport& report) {
  std::string csv = "dataset";
  for (const auto& c : report.classifier_order) csv += "," + c;
  csv += "\n";
  for (const auto& d : report.dataset_order) {
    csv += d;
    for (const auto& c : report.classifier_order) {
      csv += "," + detail::csv_cell(report.aggregate(d, c, "none"));
    }
    csv += "\n";
  }
  return csv;
}

// Per-dataset obfuscation table: vul, then vul_obf and vul_change per codec.
inline std::string obfuscation_csv(const AuditReport& report, const std::string& dataset) {
  std::vector<std::string> codecs;
  for (const auto& codec : report.codec_order) {
    if (codec != "none") codecs.push_back(codec);
  }
  std::string csv = "classifier,vul";
  for (const auto& codec : codecs) csv += ",vul_obf_" + codec + ",vul_change_" + codec;
  csv += "\n";
  for (const auto& c : report.classifier_order) {
    csv += c;
    const auto base = report.aggregate(dataset, c, "none");
    csv += "," + detail::csv_cell(base);
    for (const auto& codec : codecs) {
      const auto obf = report.aggregate(dataset, c, codec);
      if (base && obf) {
        csv += "," + format_double(obf->mean_vul) + "," +
               format_double(vul_change(base->mean_vul, obf->mean_vul));
      } else {
        csv += ",,";
      }
    }
    csv += "\n";
  }
  return csv;
}

// Per-dataset privacy-performance trade-off per codec.
inline std::string tradeoff_csv(const AuditReport& report, const std::string& dataset) {
  std::vector<std::string> codecs;
  for (const auto& codec : report.codec_order) {
    if (codec != "none") codecs.push_back(codec);
  }
  std::string csv = "classifier";
  for (const auto& codec : codecs) csv += ",pp_tradeoff_" + codec;
  csv += "\n";
  for (const auto& c : report.classifier_order) {
    csv += c;
    const auto base = report.aggregate(dataset, c, "none");
    for (const auto& codec : codecs) {
      const auto obf = report.aggregate(dataset, c, codec);
      if (base && obf) {
        csv += "," + format_double(pp_tradeoff(base->mean_vul, obf->mean_vul,
                                               base->mean_test_perf, obf->mean_test_perf));
      } else {
        csv += ",";
      }
    }
    csv += "\n";
  }
  return csv;
}

inline std::string sweep_csv(const AuditReport& report, const std::string& dataset) {
  std::string csv = "axis,value,seed,vul\n";
  for (const auto& axis : {std::string("layers"), std::string("neurons")}) {
    for (const auto& p : report.sweep) {
      if (p.dataset == dataset && p.axis == axis) {
        csv += axis + "," + std::to_string(p.value) + "," + std::to_string(p.seed) + "," +
               (p.ok ? format_double(p.vul) : std::string()) + "\n";
      }
    }
  }
  return csv;
}

inline std::string sweep_summary_csv(const AuditReport& report) {
  std::string csv = "dataset,axis,spearman\n";
  for (const auto& d : report.dataset_order) {
    for (const auto& axis : {std::string("layers"), std::string("neurons")}) {
      const double rho = sweep_spearman(report, d, axis);
      csv += d + "," + axis + "," + (std::isnan(rho) ? std::string("undefined") : format_double(rho)) +
             "\n";
    }
  }
  return csv;
}

inline std::string vulnerability_matrix_svg(const AuditReport& report) {
  const int cell_w = 92, cell_h = 30, left = 150, top = 44;
  const int width = left + cell_w * static_cast<int>(report.classifier_order.size()) + 10;
  const int height = top + cell_h * static_cast<int>(report.dataset_order.size()) + 10;
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
                    "\" height=\"" + std::to_string(height) + "\" font-family=\"monospace\" font-size=\"11\">\n";
  svg += "<text x=\"4\" y=\"16\" font-size=\"13\">vulnerability (probe/test), mean over seeds</text>\n";
  for (std::size_t j = 0; j < report.classifier_order.size(); ++j) {
    svg += "<text x=\"" + std::to_string(left + static_cast<int>(j) * cell_w + 4) + "\" y=\"" +
           std::to_string(top - 6) + "\">" + report.classifier_order[j] + "</text>\n";
  }
  for (std::size_t i = 0; i < report.dataset_order.size(); ++i) {
    const int y = top + static_cast<int>(i) * cell_h;
    svg += "<text x=\"4\" y=\"" + std::to_string(y + 19) + "\">" + report.dataset_order[i] +
           "</text>\n";
    for (std::size_t j = 0; j < report.classifier_order.size(); ++j) {
      const int x = left + static_cast<int>(j) * cell_w;
      const auto agg = report.aggregate(report.dataset_order[i], report.classifier_order[j], "none");
      const std::string fill = agg ? detail::heat_color(agg->mean_vul) : "#cccccc";
      svg += "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) + "\" width=\"" +
             std::to_string(cell_w - 2) + "\" height=\"" + std::to_string(cell_h - 2) +
             "\" fill=\"" + fill + "\" stroke=\"#888888\"/>\n";
      svg += "<text x=\"" + std::to_string(x + 6) + "\" y=\"" + std::to_string(y + 19) + "\">" +
             (agg ? format_fixed(agg->mean_vul, 2) : std::string("n/a")) + "</text>\n";
    }
  }
  svg += "</svg>\n";
  return svg;
}

inline nlohmann::json report_to_json(const AuditReport& report) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : report.cells) {
    nlohmann::json cj{{"dataset", c.dataset}, {"classifier", c.classifier},
                      {"codec", c.codec},     {"seed", c.seed},
                      {"ok", c.ok}};
    if (c.ok) {
      cj["metric"] = metric_name(c.test_perf.metric);
      cj["probe_perf"] = c.probe_perf.value;
      cj["test_perf"] = c.test_perf.value;
      cj["vul"] = c.vul;
      cj["flagged_vulnerable"] = classify_vulnerable(c.vul, report.threshold);
      cj["training_loss"] = c.training_loss;
    } else {
      cj["error"] = c.error;
    }
    cells.push_back(std::move(cj));
  }
  nlohmann::json sweep = nlohmann::json::array();
  for (const auto& p : report.sweep) {
    nlohmann::json pj{{"dataset", p.dataset}, {"axis", p.axis}, {"value", p.value},
                      {"seed", p.seed},       {"ok", p.ok}};
    if (p.ok) {
      pj["vul"] = p.vul;
    } else {
      pj["error"] = p.error;
    }
    sweep.push_back(std::move(pj));
  }
  nlohmann::json correlations = nlohmann::json::object();
  for (const auto& d : report.dataset_order) {
    for (const auto& axis : {std::string("layers"), std::string("neurons")}) {
      const double rho = sweep_spearman(report, d, axis);
      if (std::isnan(rho)) {
        correlations[d][axis] = nullptr;  // undefined
      } else {
        correlations[d][axis] = rho;
      }
    }
  }
  return {{"config", report.config_echo},
          {"threshold", report.threshold},
          {"dataset_order", report.dataset_order},
          {"classifier_order", report.classifier_order},
          {"codec_order", report.codec_order},
          {"seeds", report.seeds},
          {"cells", cells},
          {"sweep", sweep},
          {"sweep_correlations", correlations}};
}

inline AuditReport report_from_json(const nlohmann::json& j) {
  AuditReport report;
  report.config_echo = j.at("config");
  report.threshold = j.at("threshold").get<double>();
  report.dataset_order = j.at("dataset_order").get<std::vector<std::string>>();
  report.classifier_order = j.at("classifier_order").get<std::vector<std::string>>();
  report.codec_order = j.at("codec_order").get<std::vector<std::string>>();
  report.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  for (const auto& cj : j.at("cells")) {
    CellResult c;
    c.dataset = cj.at("dataset").get<std::string>();
    c.classifier = cj.at("classifier").get<std::string>();
    c.codec = cj.at("codec").get<std::string>();
    c.seed = cj.at("seed").get<std::uint64_t>();
    c.ok = cj.at("ok").get<bool>();
    if (c.ok) {
      const Metric metric =
          cj.at("metric") == "accuracy" ? Metric::kAccuracy : Metric::kAveragePrecision;
      c.probe_perf = {metric, cj.at("probe_perf").get<double>(), 0};
      c.test_perf = {metric, cj.at("test_perf").get<double>(), 0};
      c.vul = cj.at("vul").get<double>();
      c.training_loss = cj.value("training_loss", 0.0);
    } else {
      c.error = cj.value("error", std::string());
    }
    report.cells.push_back(std::move(c));
  }
  for (const auto& pj : j.at("sweep")) {
    SweepPoint p;
    p.dataset = pj.at("dataset").get<std::string>();
    p.axis = pj.at("axis").get<std::string>();
    p.value = pj.at("value").get<int>();
    p.seed = pj.at("seed").get<std::uint64_t>();
    p.ok = pj.at("ok").get<bool>();
    if (p.ok) {
      p.vul = pj.at("vul").get<double>();
    } else {
      p.error = pj.value("error", std::string());
    }
    report.sweep.push_back(std::move(p));
  }
  return report;
}

// Writes the requested artifacts. Identical config and seeds produce
// byte-identical files; failed cells appear as empty fields plus an errors
// sidecar.
inline std::vector<std::string> emit_report(const AuditReport& report, const std::string& out_dir,
                                            const std::vector<std::string>& formats) {
  namespace fs = std::filesystem;
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("emit_report: cannot create " + out_dir + ": " + ec.message());

  const bool want_csv = std::find(formats.begin(), formats.end(), "csv") != formats.end();
  const bool want_json = std::find(formats.begin(), formats.end(), "json") != formats.end();
  const bool want_svg = std::find(formats.begin(), formats.end(), "svg") != formats.end();

  std::vector<std::string> written;
  auto emit = [&](const std::string& name, const std::string& content) {
    detail::write_file(dir / name, content);
    written.push_back((dir / name).string());
  };

  if (want_csv) {
    emit("vulnerability_matrix.csv", vulnerability_matrix_csv(report));
    const bool has_codecs = std::any_of(report.codec_order.begin(), report.codec_order.end(),
                                        [](const std::string& c) { return c != "none"; });
    for (const auto& d : report.dataset_order) {
      if (has_codecs) {
        emit("obfuscation_" + detail::sanitize(d) + ".csv", obfuscation_csv(report, d));
        emit("tradeoff_" + detail::sanitize(d) + ".csv", tradeoff_csv(report, d));
      }
    }
    if (!report.sweep.empty()) {
      for (const auto& d : report.dataset_order) {
        emit("sweep_" + detail::sanitize(d) + ".csv", sweep_csv(report, d));
      }
      emit("sweep_summary.csv", sweep_summary_csv(report));
    }
  }
  if (want_json) {
    emit("audit.json", report_to_json(report).dump(2) + "\n");
  }
  if (want_svg) {
    emit("vulnerability_matrix.svg", vulnerability_matrix_svg(report));
  }

  nlohmann::json errors = nlohmann::json::array();
  for (const auto& c : report.cells) {
    if (!c.ok) {
      errors.push_back({{"dataset", c.dataset},
                        {"classifier", c.classifier},
                        {"codec", c.codec},
                        {"seed", c.seed},
                        {"error", c.error}});
    }
  }
  for (const auto& p : report.sweep) {
    if (!p.ok) {
      errors.push_back({{"dataset", p.dataset},
                        {"axis", p.axis},
                        {"value", p.value},
                        {"seed", p.seed},
                        {"error", p.error}});
    }
  }
  if (!errors.empty()) {
    emit("errors.json", errors.dump(2) + "\n");
  }
  return written;
}

}  // namespace footprint
