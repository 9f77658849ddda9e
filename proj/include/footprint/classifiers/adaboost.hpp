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

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "footprint/classifiers/tree.hpp"

namespace footprint {

// SAMME boosting of depth-limited Gini stumps. A stage is kept only while its
// weighted training error stays below the multiclass random-guess bound
// 1 - 1/K; a perfect stage is kept with a clamped weight and ends training.
class AdaBoost : public Model {
 public:
  void fit(const Matrix& x, const Labels& y, int n_classes, int n_stages, int stump_depth,
           std::uint64_t seed) {
    n_classes_ = n_classes;
    n_features_ = x.cols();
    stages_.clear();
    stage_errors_.clear();

    const std::size_t n = y.size();
    std::vector<double> weights(n, 1.0 / static_cast<double>(n));
    TreeParams params;
    params.max_depth = stump_depth;
    params.max_features = 0;  // all features, like the library default
    const Rng root(seed);
    const double guess_bound = 1.0 - 1.0 / static_cast<double>(n_classes);

    for (int m = 0; m < n_stages; ++m) {
      DecisionTree stump;
      stump.fit(x, y, n_classes, params, root.split("stage").split(static_cast<std::uint64_t>(m)),
                &weights);
      const Labels pred = stump.predict(x);
      double err = 0.0;
      for (std::size_t i = 0; i < n; ++i) err += weights[i] * (pred[i] != y[i]);

      if (err >= guess_bound) {
        if (stages_.empty()) throw Error("adaboost: first stage no better than chance");
        break;
      }
      const double clamped = std::max(err, 1e-10);
      const double alpha = std::log((1.0 - clamped) / clamped) +
                           std::log(static_cast<double>(n_classes) - 1.0);
      stages_.push_back({std::move(stump), alpha});
      stage_errors_.push_back(err);
      if (err <= 0.0) break;

      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        weights[i] *= std::exp(alpha * (pred[i] != y[i]));
        total += weights[i];
      }
      for (auto& w : weights) w /= total;
    }

    const Labels pred = predict(x);
    training_loss_ = 0.0;
    for (std::size_t i = 0; i < n; ++i) training_loss_ += (pred[i] != y[i]);
    training_loss_ /= static_cast<double>(n);
  }

  Matrix predict_scores(const Matrix& x) const override {
    check_features(x);
    Matrix scores = Matrix::Zero(x.rows(), n_classes_);
    double alpha_total = 0.0;
    for (const auto& stage : stages_) {
      const Labels pred = stage.stump.predict(x);
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        scores(i, pred[static_cast<std::size_t>(i)]) += stage.alpha;
      }
      alpha_total += stage.alpha;
    }
    scores /= alpha_total;
    return scores;
  }

  std::string family() const override { return "adaboost"; }

  const std::vector<double>& stage_errors() const { return stage_errors_; }
  std::size_t n_stages() const { return stages_.size(); }
  double stage_alpha(std::size_t m) const { return stages_[m].alpha; }

 private:
  struct Stage {
    DecisionTree stump;
    double alpha;
  };
  std::vector<Stage> stages_;
  std::vector<double> stage_errors_;
};

}  // namespace footprint
