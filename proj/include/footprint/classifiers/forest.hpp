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

#include <cstdint>
#include <string>
#include <vector>

#include "footprint/classifiers/tree.hpp"

namespace footprint {

// Bagged ensemble of Gini trees; scores are the mean of per-tree leaf
// distributions. With one tree and bootstrap disabled the forest reproduces
// DecisionTree exactly, since tree i consumes the same derived stream either
// way and the bootstrap stream is separate.
class RandomForest : public Model {
 public:
  void fit(const Matrix& x, const Labels& y, int n_classes, int n_trees, bool bootstrap,
           const TreeParams& params, std::uint64_t seed) {
    n_classes_ = n_classes;
    n_features_ = x.cols();
    trees_.clear();
    trees_.reserve(static_cast<std::size_t>(n_trees));
    const Rng root(seed);
    for (int t = 0; t < n_trees; ++t) {
      std::vector<double> weights(static_cast<std::size_t>(x.rows()), 0.0);
      if (bootstrap) {
        Rng boot = root.split("boot").split(static_cast<std::uint64_t>(t));
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
          weights[boot.below(static_cast<std::uint64_t>(x.rows()))] += 1.0;
        }
      } else {
        weights.assign(static_cast<std::size_t>(x.rows()), 1.0);
      }
      DecisionTree tree;
      tree.fit(x, y, n_classes, params, root.split("tree").split(static_cast<std::uint64_t>(t)),
               &weights);
      trees_.push_back(std::move(tree));
    }
    training_loss_ = 0.0;
    const Labels pred = predict(x);
    for (std::size_t i = 0; i < y.size(); ++i) training_loss_ += (pred[i] != y[i]);
    training_loss_ /= static_cast<double>(y.size());
  }

  Matrix predict_scores(const Matrix& x) const override {
    check_features(x);
    Matrix scores = Matrix::Zero(x.rows(), n_classes_);
    for (const auto& tree : trees_) {
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        scores.row(i) += tree.leaf_distribution(x.row(i)).transpose();
      }
    }
    scores /= static_cast<double>(trees_.size());
    return scores;
  }

  std::string family() const override { return "random_forest"; }

  const std::vector<DecisionTree>& trees() const { return trees_; }

 private:
  std::vector<DecisionTree> trees_;
};

}  // namespace footprint
