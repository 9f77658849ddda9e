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
#include <string>
#include <vector>

#include "footprint/classifiers/model.hpp"
#include "footprint/common.hpp"

namespace footprint {

// Majority vote over the k nearest training points under Euclidean distance.
// Scores are vote fractions plus an infinitesimal bonus for the single
// nearest neighbor's class, so the argmax realizes the tie order
// "majority vote, then nearest neighbor, then lowest class id" while the
// scores still sum to one.
class KnnClassifier : public Model {
 public:
  void fit(const Matrix& x, const Labels& y, int n_classes, int k) {
    if (k < 1) throw Error("knn: k must be >= 1");
    n_classes_ = n_classes;
    n_features_ = x.cols();
    k_ = std::min<Eigen::Index>(k, x.rows());
    train_ = x;
    labels_ = y;
    train_sq_norms_ = x.rowwise().squaredNorm();
    training_loss_ = 0.0;
  }

  Matrix predict_scores(const Matrix& x) const override {
    check_features(x);
    Matrix scores(x.rows(), n_classes_);
    // ||a - b||^2 = ||a||^2 - 2 a.b + ||b||^2, batched through one GEMM.
    const Matrix cross = train_ * x.transpose();  // n_train x n_query
    std::vector<std::pair<double, Eigen::Index>> order(
        static_cast<std::size_t>(train_.rows()));
    for (Eigen::Index q = 0; q < x.rows(); ++q) {
      const double q_norm = x.row(q).squaredNorm();
      for (Eigen::Index t = 0; t < train_.rows(); ++t) {
        order[static_cast<std::size_t>(t)] = {train_sq_norms_[t] - 2.0 * cross(t, q) + q_norm, t};
      }
      std::partial_sort(order.begin(), order.begin() + k_, order.end());
      Vector votes = Vector::Zero(n_classes_);
      for (Eigen::Index i = 0; i < k_; ++i) {
        votes[labels_[static_cast<std::size_t>(order[static_cast<std::size_t>(i)].second)]] += 1.0;
      }
      const int nearest_class = labels_[static_cast<std::size_t>(order[0].second)];
      votes[nearest_class] += kTieBonus;
      scores.row(q) = (votes / (static_cast<double>(k_) + kTieBonus)).transpose();
    }
    return scores;
  }

  std::string family() const override { return "knn"; }

  const Matrix& stored_training_features() const { return train_; }

 private:
  static constexpr double kTieBonus = 1e-9;

  Eigen::Index k_ = 5;
  Matrix train_;
  Labels labels_;
  Vector train_sq_norms_;
};

}  // namespace footprint
