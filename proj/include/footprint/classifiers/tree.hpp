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
#include <cstdint>
#include <string>
#include <vector>

#include "footprint/classifiers/model.hpp"
#include "footprint/common.hpp"
#include "footprint/rng.hpp"

namespace footprint {

struct TreeParams {
  int max_depth = 10;
  int max_features = 0;  // 0 means all features
  int min_samples_split = 2;
};

// CART classification tree with Gini impurity. Candidate features are a
// per-node random subset when max_features is set; equal-gain splits resolve
// to the lowest feature index, then the lowest threshold, so fits are fully
// reproducible. Points with value >= threshold go right.
class DecisionTree : public Model {
 public:
  struct Node {
    int feature = -1;       // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    Vector distribution;    // weighted class fractions at the node
  };

  DecisionTree() = default;

  void fit(const Matrix& x, const Labels& y, int n_classes, const TreeParams& params, Rng rng,
           const std::vector<double>* sample_weights = nullptr) {
    n_classes_ = n_classes;
    n_features_ = x.cols();
    params_ = params;
    nodes_.clear();

    std::vector<int> rows(static_cast<std::size_t>(x.rows()));
    std::iota(rows.begin(), rows.end(), 0);
    std::vector<double> weights;
    if (sample_weights) {
      weights = *sample_weights;
    } else {
      weights.assign(static_cast<std::size_t>(x.rows()), 1.0);
    }
    build(x, y, weights, rows, 0, rng);
    training_loss_ = weighted_error(x, y, weights);
  }

  Matrix predict_scores(const Matrix& x) const override {
    check_features(x);
    Matrix scores(x.rows(), n_classes_);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      scores.row(i) = leaf_distribution(x.row(i)).transpose();
    }
    return scores;
  }

  std::string family() const override { return "decision_tree"; }

  const Vector& leaf_distribution(const Eigen::Ref<const Eigen::RowVectorXd>& point) const {
    int at = 0;
    while (nodes_[static_cast<std::size_t>(at)].feature >= 0) {
      const Node& node = nodes_[static_cast<std::size_t>(at)];
      at = point[node.feature] >= node.threshold ? node.right : node.left;
    }
    return nodes_[static_cast<std::size_t>(at)].distribution;
  }

  int max_path_depth() const { return depth_of(0); }
  const std::vector<Node>& nodes() const { return nodes_; }

 private:
  int depth_of(int idx) const {
    const Node& node = nodes_[static_cast<std::size_t>(idx)];
    if (node.feature < 0) return 0;
    return 1 + std::max(depth_of(node.left), depth_of(node.right));
  }

  double weighted_error(const Matrix& x, const Labels& y, const std::vector<double>& w) const {
    double wrong = 0.0, total = 0.0;
    const Labels pred = predict(x);
    for (std::size_t i = 0; i < y.size(); ++i) {
      wrong += w[i] * (pred[i] != y[i]);
      total += w[i];
    }
    return total > 0.0 ? wrong / total : 0.0;
  }

  static double gini(const Vector& counts, double total) {
    if (total <= 0.0) return 0.0;
    double sum_sq = 0.0;
    for (Eigen::Index c = 0; c < counts.size(); ++c) sum_sq += counts[c] * counts[c];
    return 1.0 - sum_sq / (total * total);
  }

  int build(const Matrix& x, const Labels& y, const std::vector<double>& w, std::vector<int>& rows,
            int depth, Rng& rng) {
    Vector counts = Vector::Zero(n_classes_);
    double total = 0.0;
    for (int r : rows) {
      counts[y[static_cast<std::size_t>(r)]] += w[static_cast<std::size_t>(r)];
      total += w[static_cast<std::size_t>(r)];
    }

    const int node_idx = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    nodes_.back().distribution = total > 0.0 ? Vector(counts / total)
                                             : Vector(Vector::Constant(n_classes_, 1.0 / n_classes_));

    const double parent_gini = gini(counts, total);
    if (depth >= params_.max_depth || static_cast<int>(rows.size()) < params_.min_samples_split ||
        parent_gini <= 0.0) {
      return node_idx;
    }

    // Candidate features: random subset, scanned in ascending index order.
    std::vector<int> candidates;
    const int d = static_cast<int>(n_features_);
    if (params_.max_features > 0 && params_.max_features < d) {
      auto picks = rng.sample_without_replacement(static_cast<std::size_t>(d),
                                                  static_cast<std::size_t>(params_.max_features));
      candidates.assign(picks.begin(), picks.end());
      std::sort(candidates.begin(), candidates.end());
    } else {
      candidates.resize(static_cast<std::size_t>(d));
      std::iota(candidates.begin(), candidates.end(), 0);
    }

    int best_feature = -1;
    double best_threshold = 0.0;
    double best_gain = 1e-12;

    std::vector<std::pair<double, int>> ordered;  // (value, row)
    for (int feature : candidates) {
      ordered.clear();
      ordered.reserve(rows.size());
      for (int r : rows) ordered.emplace_back(x(r, feature), r);
      std::sort(ordered.begin(), ordered.end());
      if (ordered.front().first == ordered.back().first) continue;

      Vector left_counts = Vector::Zero(n_classes_);
      double left_total = 0.0;
      for (std::size_t i = 0; i + 1 < ordered.size(); ++i) {
        const int r = ordered[i].second;
        left_counts[y[static_cast<std::size_t>(r)]] += w[static_cast<std::size_t>(r)];
        left_total += w[static_cast<std::size_t>(r)];
        if (ordered[i].first == ordered[i + 1].first) continue;

        const double right_total = total - left_total;
        if (left_total <= 0.0 || right_total <= 0.0) continue;
        const Vector right_counts = counts - left_counts;
        const double child_gini = (left_total * gini(left_counts, left_total) +
                                   right_total * gini(right_counts, right_total)) / total;
        const double gain = parent_gini - child_gini;
        const double threshold = 0.5 * (ordered[i].first + ordered[i + 1].first);
        if (gain > best_gain + 1e-12 ||
            (gain > best_gain - 1e-12 &&
             (feature < best_feature || (feature == best_feature && threshold < best_threshold)))) {
          best_gain = gain;
          best_feature = feature;
          best_threshold = threshold;
        }
      }
    }

    if (best_feature < 0) return node_idx;

    std::vector<int> left_rows, right_rows;
    for (int r : rows) {
      (x(r, best_feature) >= best_threshold ? right_rows : left_rows).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    const int left = build(x, y, w, left_rows, depth + 1, rng);
    const int right = build(x, y, w, right_rows, depth + 1, rng);
    nodes_[static_cast<std::size_t>(node_idx)].feature = best_feature;
    nodes_[static_cast<std::size_t>(node_idx)].threshold = best_threshold;
    nodes_[static_cast<std::size_t>(node_idx)].left = left;
    nodes_[static_cast<std::size_t>(node_idx)].right = right;
    return node_idx;
  }

  TreeParams params_;
  std::vector<Node> nodes_;
};

inline std::shared_ptr<DecisionTree> fit_decision_tree(const Matrix& x, const Labels& y,
                                                       int n_classes, const TreeParams& params,
                                                       std::uint64_t seed) {
  auto tree = std::make_shared<DecisionTree>();
  tree->fit(x, y, n_classes, params, Rng(seed).split("tree").split(std::uint64_t{0}));
  return tree;
}

}  // namespace footprint
