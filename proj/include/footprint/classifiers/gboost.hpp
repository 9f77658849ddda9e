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

#include "footprint/classifiers/model.hpp"
#include "footprint/common.hpp"

namespace footprint {

struct GBoostParams {
  int n_rounds = 100;
  int max_depth = 6;
  double min_child_weight = 1.0;  // minimum hessian sum per child
  double learning_rate = 0.3;
  double reg_lambda = 1.0;
};

namespace detail {

// Row indices sorted per feature, computed once per fit and partitioned down
// the recursion so no per-node sorting is needed.
struct FeaturePresort {
  std::vector<std::vector<int>> order;  // one sorted index list per feature

  static FeaturePresort build(const Matrix& x) {
    FeaturePresort p;
    p.order.resize(static_cast<std::size_t>(x.cols()));
    for (Eigen::Index f = 0; f < x.cols(); ++f) {
      auto& idx = p.order[static_cast<std::size_t>(f)];
      idx.resize(static_cast<std::size_t>(x.rows()));
      std::iota(idx.begin(), idx.end(), 0);
      std::stable_sort(idx.begin(), idx.end(),
                       [&](int a, int b) { return x(a, f) < x(b, f); });
    }
    return p;
  }
};

// Regression tree on per-point gradients and hessians with Newton leaf
// weights -G/(H + lambda) and the second-order split gain. Splits whose
// children fall below the hessian floor are discarded.
class NewtonTree {
 public:
  struct Node {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double weight = 0.0;
  };

  void fit(const Matrix& x, const Vector& grad, const Vector& hess, const GBoostParams& params,
           const FeaturePresort& presort) {
    params_ = params;
    nodes_.clear();
    build(x, grad, hess, presort.order, 0);
  }

  double value(const Eigen::Ref<const Eigen::RowVectorXd>& point) const {
    int at = 0;
    while (nodes_[static_cast<std::size_t>(at)].feature >= 0) {
      const Node& node = nodes_[static_cast<std::size_t>(at)];
      at = point[node.feature] >= node.threshold ? node.right : node.left;
    }
    return nodes_[static_cast<std::size_t>(at)].weight;
  }

  Vector values(const Matrix& x) const {
    Vector out(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) out[i] = value(x.row(i));
    return out;
  }

 private:
  double leaf_score(double g, double h) const { return g * g / (h + params_.reg_lambda); }

  int build(const Matrix& x, const Vector& grad, const Vector& hess,
            const std::vector<std::vector<int>>& lists, int depth) {
    const auto& rows = lists[0];
    double g_total = 0.0, h_total = 0.0;
    for (int r : rows) {
      g_total += grad[r];
      h_total += hess[r];
    }

    const int node_idx = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    nodes_.back().weight = -g_total / (h_total + params_.reg_lambda);

    if (depth >= params_.max_depth || rows.size() < 2) return node_idx;

    int best_feature = -1;
    double best_threshold = 0.0;
    double best_gain = 1e-12;

    for (std::size_t f = 0; f < lists.size(); ++f) {
      const auto& ordered = lists[f];
      const auto fi = static_cast<Eigen::Index>(f);
      if (x(ordered.front(), fi) == x(ordered.back(), fi)) continue;
      double g_left = 0.0, h_left = 0.0;
      for (std::size_t i = 0; i + 1 < ordered.size(); ++i) {
        g_left += grad[ordered[i]];
        h_left += hess[ordered[i]];
        if (x(ordered[i], fi) == x(ordered[i + 1], fi)) continue;
        const double h_right = h_total - h_left;
        if (h_left < params_.min_child_weight || h_right < params_.min_child_weight) continue;
        const double g_right = g_total - g_left;
        const double gain = 0.5 * (leaf_score(g_left, h_left) + leaf_score(g_right, h_right) -
                                   leaf_score(g_total, h_total));
        const double threshold = 0.5 * (x(ordered[i], fi) + x(ordered[i + 1], fi));
        const int feature = static_cast<int>(f);
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

    // Stable partition of every per-feature list preserves sort order.
    std::vector<std::vector<int>> left_lists(lists.size()), right_lists(lists.size());
    for (std::size_t f = 0; f < lists.size(); ++f) {
      for (int r : lists[f]) {
        (x(r, best_feature) >= best_threshold ? right_lists[f] : left_lists[f]).push_back(r);
      }
    }

    const int left = build(x, grad, hess, left_lists, depth + 1);
    left_lists.clear();
    left_lists.shrink_to_fit();
    const int right = build(x, grad, hess, right_lists, depth + 1);
    nodes_[static_cast<std::size_t>(node_idx)].feature = best_feature;
    nodes_[static_cast<std::size_t>(node_idx)].threshold = best_threshold;
    nodes_[static_cast<std::size_t>(node_idx)].left = left;
    nodes_[static_cast<std::size_t>(node_idx)].right = right;
    return node_idx;
  }

  GBoostParams params_;
  std::vector<Node> nodes_;
};

}  // namespace detail

// Gradient-boosted trees with second-order leaf weights on the logistic
// (binary) or softmax (multiclass) objective. No row or column subsampling,
// so fits are deterministic without a seed.
class GBoost : public Model {
 public:
  void fit(const Matrix& x, const Labels& y, int n_classes, const GBoostParams& params) {
    n_classes_ = n_classes;
    n_features_ = x.cols();
    params_ = params;
    trees_.clear();
    loss_curve_.clear();

    const detail::FeaturePresort presort = detail::FeaturePresort::build(x);
    const Eigen::Index n = x.rows();
    const int k = n_classes == 2 ? 1 : n_classes;
    Matrix margins = Matrix::Zero(n, k);

    for (int round = 0; round < params.n_rounds; ++round) {
      const Matrix prob = probabilities(margins);
      std::vector<detail::NewtonTree> round_trees;
      round_trees.reserve(static_cast<std::size_t>(k));
      for (int c = 0; c < k; ++c) {
        Vector grad(n), hess(n);
        for (Eigen::Index i = 0; i < n; ++i) {
          const double p = prob(i, k == 1 ? 1 : c);
          const double target = (k == 1) ? (y[static_cast<std::size_t>(i)] == 1 ? 1.0 : 0.0)
                                         : (y[static_cast<std::size_t>(i)] == c ? 1.0 : 0.0);
          grad[i] = p - target;
          // Binary logistic hessian p(1-p); the softmax diagonal approximation
          // doubles it, matching the usual multiclass boosting objective.
          hess[i] = std::max((k == 1 ? 1.0 : 2.0) * p * (1.0 - p), 1e-16);
        }
        detail::NewtonTree tree;
        tree.fit(x, grad, hess, params, presort);
        margins.col(c) += params.learning_rate * tree.values(x);
        round_trees.push_back(std::move(tree));
      }
      trees_.push_back(std::move(round_trees));
      loss_curve_.push_back(log_loss(probabilities(margins), y));
    }
    training_loss_ = loss_curve_.empty() ? 0.0 : loss_curve_.back();
  }

  Matrix predict_scores(const Matrix& x) const override {
    check_features(x);
    const int k = n_classes_ == 2 ? 1 : n_classes_;
    Matrix margins = Matrix::Zero(x.rows(), k);
    for (const auto& round_trees : trees_) {
      for (int c = 0; c < k; ++c) {
        margins.col(c) += params_.learning_rate * round_trees[static_cast<std::size_t>(c)].values(x);
      }
    }
    return probabilities(margins);
  }

  std::string family() const override { return "gboost"; }

  // Training log-loss after each boosting round.
  const std::vector<double>& loss_curve() const { return loss_curve_; }

 private:
  Matrix probabilities(const Matrix& margins) const {
    Matrix prob(margins.rows(), n_classes_);
    if (margins.cols() == 1) {
      for (Eigen::Index i = 0; i < margins.rows(); ++i) {
        const double p = 1.0 / (1.0 + std::exp(-margins(i, 0)));
        prob(i, 0) = 1.0 - p;
        prob(i, 1) = p;
      }
    } else {
      for (Eigen::Index i = 0; i < margins.rows(); ++i) {
        const double max_margin = margins.row(i).maxCoeff();
        double total = 0.0;
        for (Eigen::Index c = 0; c < margins.cols(); ++c) {
          prob(i, c) = std::exp(margins(i, c) - max_margin);
          total += prob(i, c);
        }
        prob.row(i) /= total;
      }
    }
    return prob;
  }

  static double log_loss(const Matrix& prob, const Labels& y) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < prob.rows(); ++i) {
      total -= std::log(std::max(prob(i, y[static_cast<std::size_t>(i)]), 1e-15));
    }
    return total / static_cast<double>(prob.rows());
  }

  GBoostParams params_;
  std::vector<std::vector<detail::NewtonTree>> trees_;
  std::vector<double> loss_curve_;
};

}  // namespace footprint
