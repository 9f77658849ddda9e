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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "footprint/common.hpp"

namespace footprint {

enum class Metric { kAccuracy, kAveragePrecision };

inline std::string metric_name(Metric m) {
  return m == Metric::kAccuracy ? "accuracy" : "average_precision";
}

struct PerfValue {
  Metric metric = Metric::kAccuracy;
  double value = 0.0;       // in [0, 1]
  int n_evaluated = 0;
};

// Fraction of exact label matches.
inline PerfValue accuracy(const Labels& predicted, const Labels& truth) {
  if (predicted.size() != truth.size()) {
    throw Error("accuracy: length mismatch (" + std::to_string(predicted.size()) + " vs " +
                std::to_string(truth.size()) + ")");
  }
  if (truth.empty()) throw Error("accuracy: empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += (predicted[i] == truth[i]);
  return {Metric::kAccuracy, static_cast<double>(hits) / static_cast<double>(truth.size()),
          static_cast<int>(truth.size())};
}

// Average precision of the score-descending ranking of the positive class:
// AP = sum_k (recall_k - recall_{k-1}) * precision_k. Tied scores enter as one
// group, with precision taken after the whole group is admitted.
inline PerfValue average_precision(const std::vector<double>& scores, const std::vector<int>& truth) {
  if (scores.size() != truth.size()) throw Error("average_precision: length mismatch");
  if (truth.empty()) throw Error("average_precision: empty input");
  std::size_t n_pos = 0;
  for (int t : truth) {
    if (t != 0 && t != 1) throw Error("average_precision: truth must be binary 0/1");
    n_pos += (t == 1);
  }
  if (n_pos == 0 || n_pos == truth.size()) {
    throw Error("average_precision: needs at least one positive and one negative example");
  }

  std::vector<std::size_t> order(truth.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  double ap = 0.0;
  double tp = 0.0, fp = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    double group_tp = 0.0, group_fp = 0.0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      if (truth[order[j]] == 1) group_tp += 1.0; else group_fp += 1.0;
      ++j;
    }
    const double recall_prev = tp / static_cast<double>(n_pos);
    tp += group_tp;
    fp += group_fp;
    const double recall = tp / static_cast<double>(n_pos);
    const double precision = tp / (tp + fp);
    ap += (recall - recall_prev) * precision;
    i = j;
  }
  return {Metric::kAveragePrecision, ap, static_cast<int>(truth.size())};
}

// Ratio of prediction performance on seen (probe) data to performance on test
// data. Values near 1 mean the two are indistinguishable; large values mean
// the training data left a usable footprint in the model.
inline double vulnerability(const PerfValue& train_perf, const PerfValue& test_perf) {
  if (train_perf.metric != test_perf.metric) {
    throw Error("vulnerability: metric mismatch (" + metric_name(train_perf.metric) + " vs " +
                metric_name(test_perf.metric) + ")");
  }
  if (test_perf.value <= 0.0) {
    throw Error("vulnerability: undefined, zero test performance");
  }
  return train_perf.value / test_perf.value;
}

// Percentage change of vulnerability after obfuscation, relative to the
// plain-data vulnerability. Negative means obfuscation made things worse.
inline double vul_change(double vul, double vul_obf) {
  if (vul <= 0.0) throw Error("vul_change: non-positive vulnerability");
  return 100.0 * (vul - vul_obf) / vul;
}

// Privacy-performance trade-off: (vul / vul_obf) * (perf_obf / perf).
// Above 1 the privacy gain outweighs the performance cost.
inline double pp_tradeoff(double vul, double vul_obf, double perf, double perf_obf) {
  if (vul <= 0.0 || vul_obf <= 0.0 || perf <= 0.0 || perf_obf <= 0.0) {
    throw Error("pp_tradeoff: all inputs must be positive");
  }
  return (vul / vul_obf) * (perf_obf / perf);
}

inline bool classify_vulnerable(double vul, double threshold = 1.4) {
  if (!std::isfinite(vul)) throw Error("classify_vulnerable: non-finite vulnerability");
  return vul >= threshold;
}

// Dataset-level metric rule: ranking quality of the rare class for binary
// imbalanced data, plain accuracy otherwise.
inline Metric choose_metric(int n_classes, double imbalance_ratio) {
  return (n_classes == 2 && imbalance_ratio >= 2.0) ? Metric::kAveragePrecision
                                                    : Metric::kAccuracy;
}

struct VulnRecord {
  std::string dataset;
  std::string classifier;
  PerfValue train_perf;   // measured on the probe subsample
  PerfValue test_perf;
  double vul = 0.0;
  bool flagged_vulnerable = false;
};

inline VulnRecord make_vuln_record(std::string dataset, std::string classifier,
                                   const PerfValue& train_perf, const PerfValue& test_perf,
                                   double threshold = 1.4) {
  VulnRecord r;
  r.dataset = std::move(dataset);
  r.classifier = std::move(classifier);
  r.train_perf = train_perf;
  r.test_perf = test_perf;
  r.vul = vulnerability(train_perf, test_perf);
  r.flagged_vulnerable = classify_vulnerable(r.vul, threshold);
  return r;
}

struct TradeoffRecord {
  double vul = 0.0;
  double vul_obf = 0.0;
  double perf = 0.0;
  double perf_obf = 0.0;
  double change = 0.0;      // percent
  double tradeoff = 0.0;

  static TradeoffRecord from_raw(double vul, double vul_obf, double perf, double perf_obf) {
    TradeoffRecord r;
    r.vul = vul;
    r.vul_obf = vul_obf;
    r.perf = perf;
    r.perf_obf = perf_obf;
    r.change = vul_change(vul, vul_obf);
    r.tradeoff = pp_tradeoff(vul, vul_obf, perf, perf_obf);
    return r;
  }
};

}  // namespace footprint
