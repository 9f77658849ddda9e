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
#include <cstdlib>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "footprint/common.hpp"
#include "footprint/rng.hpp"

namespace footprint {

enum class FeatureKind { kNumeric, kCategoricalEncoded };

// Immutable labelled point set. Labels are dense class ids in [0, n_classes)
// and every class id occurs at least once.
struct Dataset {
  std::string name;
  Matrix features;                      // n_points x n_features
  Labels labels;                        // n_points
  std::vector<FeatureKind> feature_kinds;
  int n_classes = 0;

  Eigen::Index n_points() const { return features.rows(); }
  Eigen::Index n_features() const { return features.cols(); }

  std::vector<int> class_counts() const {
    std::vector<int> counts(n_classes, 0);
    for (int y : labels) counts[y]++;
    return counts;
  }

  // Majority class count divided by minority class count.
  double imbalance_ratio() const {
    const auto counts = class_counts();
    const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
    if (*lo == 0) throw Error("imbalance_ratio: empty class");
    return static_cast<double>(*hi) / static_cast<double>(*lo);
  }

  Dataset subset(const std::vector<std::size_t>& rows, std::string subset_name) const {
    Dataset out;
    out.name = std::move(subset_name);
    out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
    out.labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out.features.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(rows[i]));
      out.labels.push_back(labels[rows[i]]);
    }
    out.feature_kinds = feature_kinds;
    out.n_classes = n_classes;
    return out;
  }
};

// Checks the Dataset invariants, throwing on violation.
inline void validate_dataset(const Dataset& d) {
  if (d.n_classes < 1) throw Error(d.name + ": no classes");
  if (d.n_points() < d.n_classes) throw Error(d.name + ": fewer points than classes");
  if (static_cast<Eigen::Index>(d.labels.size()) != d.n_points()) {
    throw Error(d.name + ": label/feature row mismatch");
  }
  std::vector<int> seen(d.n_classes, 0);
  for (int y : d.labels) {
    if (y < 0 || y >= d.n_classes) throw Error(d.name + ": label out of range");
    seen[y] = 1;
  }
  for (int c = 0; c < d.n_classes; ++c) {
    if (!seen[c]) throw Error(d.name + ": class " + std::to_string(c) + " has no points");
  }
  if (!d.features.allFinite()) throw Error(d.name + ": non-finite feature values");
}

struct LoadCsvOptions {
  bool has_header = true;
  bool one_hot_categoricals = false;  // ordinal codes by default
  char delimiter = ',';
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, delim)) out.push_back(trim(cell));
  if (!line.empty() && line.back() == delim) out.push_back("");
  return out;
}

inline std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return std::nullopt;
  return v;
}

}  // namespace detail

// Loads a delimiter-separated table. The label column may be named (when a
// header is present), a 0-based index as a string, or "last". Non-numeric
// columns are treated as categoricals and integer-coded (or one-hot expanded);
// labels are densely re-indexed to [0, n_classes) in sorted key order.
inline Dataset load_csv(const std::string& path, const std::string& label_column,
                        const LoadCsvOptions& opts = {}) {
  std::ifstream in(path);
  if (!in) throw Error("load_csv: cannot open " + path);

  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    rows.push_back(detail::split_line(line, opts.delimiter));
  }
  if (rows.empty()) throw Error("load_csv: " + path + " is empty");

  std::vector<std::string> header;
  if (opts.has_header) {
    header = rows.front();
    rows.erase(rows.begin());
    if (rows.empty()) throw Error("load_csv: " + path + " has a header but no data rows");
  }
  const std::size_t n_cols = (opts.has_header ? header.size() : rows.front().size());

  // Resolve the label column.
  std::size_t label_idx = n_cols;  // sentinel
  if (label_column == "last") {
    label_idx = n_cols - 1;
  } else if (opts.has_header) {
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (header[j] == label_column) label_idx = j;
    }
  }
  if (label_idx == n_cols) {
    if (auto idx = detail::parse_number(label_column);
        idx && *idx >= 0 && *idx < static_cast<double>(n_cols) && *idx == std::floor(*idx)) {
      label_idx = static_cast<std::size_t>(*idx);
    } else {
      throw Error("load_csv: label column '" + label_column + "' not found in " + path);
    }
  }

  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != n_cols) {
      throw Error("load_csv: row " + std::to_string(i + 1) + " has " + std::to_string(rows[i].size()) +
                  " cells, expected " + std::to_string(n_cols));
    }
  }

  const std::size_t n = rows.size();
  const std::size_t n_feat_cols = n_cols - 1;

  // First pass: decide per-column kind and collect categorical vocabularies.
  std::vector<bool> is_numeric(n_cols, true);
  std::vector<std::map<std::string, int>> vocab(n_cols);
  for (std::size_t j = 0; j < n_cols; ++j) {
    if (j == label_idx) continue;
    for (std::size_t i = 0; i < n; ++i) {
      if (!detail::parse_number(rows[i][j])) {
        if (rows[i][j].empty()) {
          throw Error("load_csv: empty cell at row " + std::to_string(i + 1) + ", column " +
                      std::to_string(j + 1));
        }
        is_numeric[j] = false;
      }
    }
    if (!is_numeric[j]) {
      for (std::size_t i = 0; i < n; ++i) vocab[j].emplace(rows[i][j], 0);
      int code = 0;
      for (auto& [key, val] : vocab[j]) val = code++;
    }
  }

  // Labels: dense ids in sorted key order (numeric labels sort numerically).
  std::map<std::string, int> label_map;
  {
    bool labels_numeric = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (!detail::parse_number(rows[i][label_idx])) labels_numeric = false;
    }
    std::vector<std::string> keys;
    for (std::size_t i = 0; i < n; ++i) keys.push_back(rows[i][label_idx]);
    std::sort(keys.begin(), keys.end(), [&](const std::string& a, const std::string& b) {
      if (labels_numeric) return *detail::parse_number(a) < *detail::parse_number(b);
      return a < b;
    });
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    for (std::size_t k = 0; k < keys.size(); ++k) label_map[keys[k]] = static_cast<int>(k);
    if (label_map.size() < 2) throw Error("load_csv: " + path + " has a single class");
  }

  // Output column layout.
  std::size_t out_cols = 0;
  for (std::size_t j = 0; j < n_cols; ++j) {
    if (j == label_idx) continue;
    out_cols += (!is_numeric[j] && opts.one_hot_categoricals) ? vocab[j].size() : 1;
  }

  Dataset d;
  d.name = path;
  d.features.setZero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(out_cols));
  d.labels.resize(n);
  d.feature_kinds.assign(out_cols, FeatureKind::kNumeric);
  d.n_classes = static_cast<int>(label_map.size());

  for (std::size_t i = 0; i < n; ++i) {
    std::size_t col = 0;
    for (std::size_t j = 0; j < n_cols; ++j) {
      if (j == label_idx) continue;
      if (is_numeric[j]) {
        const double v = *detail::parse_number(rows[i][j]);
        if (!std::isfinite(v)) {
          throw Error("load_csv: non-finite value at row " + std::to_string(i + 1) + ", column " +
                      std::to_string(j + 1));
        }
        d.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col)) = v;
        col += 1;
      } else if (opts.one_hot_categoricals) {
        const int code = vocab[j].at(rows[i][j]);
        d.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col + code)) = 1.0;
        for (std::size_t k = 0; k < vocab[j].size(); ++k) {
          d.feature_kinds[col + k] = FeatureKind::kCategoricalEncoded;
        }
        col += vocab[j].size();
      } else {
        d.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col)) =
            static_cast<double>(vocab[j].at(rows[i][j]));
        d.feature_kinds[col] = FeatureKind::kCategoricalEncoded;
        col += 1;
      }
    }
    d.labels[i] = label_map.at(rows[i][label_idx]);
  }
  (void)n_feat_cols;

  validate_dataset(d);
  return d;
}

// Per-feature affine scaler fitted on one partition and applied to others.
struct StandardScale {
  Vector mean;
  Vector stddev;                 // population stddev; 1.0 where degenerate
  std::vector<bool> degenerate;  // zero-variance columns pass through unchanged

  Matrix apply(const Matrix& x) const {
    Matrix out = x;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      if (degenerate[static_cast<std::size_t>(j)]) continue;
      out.col(j) = (x.col(j).array() - mean[j]) / stddev[j];
    }
    return out;
  }
};

inline StandardScale fit_standardizer(const Matrix& x) {
  if (x.rows() < 2) throw Error("standardize: needs at least 2 points");
  StandardScale s;
  const double n = static_cast<double>(x.rows());
  s.mean = x.colwise().mean();
  s.stddev.resize(x.cols());
  s.degenerate.assign(static_cast<std::size_t>(x.cols()), false);
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double var = (x.col(j).array() - s.mean[j]).square().sum() / n;
    const double sd = std::sqrt(var);
    if (sd < 1e-12) {
      s.stddev[j] = 1.0;
      s.degenerate[static_cast<std::size_t>(j)] = true;
    } else {
      s.stddev[j] = sd;
    }
  }
  return s;
}

// Returns the standardized dataset together with the fitted scale.
inline std::pair<Dataset, StandardScale> standardize(const Dataset& d) {
  StandardScale s = fit_standardizer(d.features);
  Dataset out = d;
  out.features = s.apply(d.features);
  return {std::move(out), std::move(s)};
}

// Stratified train/test partition plus the probe subsample used to measure
// seen-data performance.
struct Split {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> probe;  // indices into train, |probe| = floor(|train| / 2)
  std::uint64_t seed = 0;
};

// Stratified 4:1 split; the probe is a uniform half of the train partition.
inline Split split_dataset(const Dataset& d, std::uint64_t seed) {
  validate_dataset(d);
  const auto counts = d.class_counts();
  for (int c = 0; c < d.n_classes; ++c) {
    if (counts[c] < 5) {
      throw Error("split: class " + std::to_string(c) + " has " + std::to_string(counts[c]) +
                  " members, needs at least 5");
    }
  }

  Rng rng = Rng(seed).split("split");
  std::vector<std::size_t> train_idx, test_idx;
  for (int c = 0; c < d.n_classes; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < d.labels.size(); ++i) {
      if (d.labels[i] == c) members.push_back(i);
    }
    Rng class_rng = rng.split(static_cast<std::uint64_t>(c));
    class_rng.shuffle(members);
    const std::size_t n_test = static_cast<std::size_t>(
        std::llround(0.2 * static_cast<double>(members.size())));
    for (std::size_t i = 0; i < members.size(); ++i) {
      (i < n_test ? test_idx : train_idx).push_back(members[i]);
    }
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());

  Split s;
  s.seed = seed;
  s.train = d.subset(train_idx, d.name + "/train");
  s.test = d.subset(test_idx, d.name + "/test");
  Rng probe_rng = Rng(seed).split("probe");
  s.probe = probe_rng.sample_without_replacement(train_idx.size(), train_idx.size() / 2);
  std::sort(s.probe.begin(), s.probe.end());
  return s;
}

// Probe indices for a pre-partitioned dataset (synthetic generators hand the
// train/test parts directly, so only the probe draw is needed).
inline std::vector<std::size_t> draw_probe(std::size_t n_train, std::uint64_t seed) {
  Rng probe_rng = Rng(seed).split("probe");
  auto probe = probe_rng.sample_without_replacement(n_train, n_train / 2);
  std::sort(probe.begin(), probe.end());
  return probe;
}

}  // namespace footprint
