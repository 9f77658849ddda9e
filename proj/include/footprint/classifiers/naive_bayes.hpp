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
#include <string>

#include "footprint/classifiers/model.hpp"
#include "footprint/common.hpp"

namespace footprint {

// Per-class diagonal Gaussians with empirical priors. Variances are floored
// by a small fraction of the largest feature variance to keep degenerate
// columns finite.
class GaussianNb : public Model {
 public:
  void fit(const Matrix& x, const Labels& y, int n_classes, double var_smoothing = 1e-9) {
    n_classes_ = n_classes;
    n_features_ = x.cols();
    means_.setZero(n_classes, x.cols());
    variances_.setZero(n_classes, x.cols());
    log_priors_.setZero(n_classes);

    Vector counts = Vector::Zero(n_classes);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const int c = y[static_cast<std::size_t>(i)];
      counts[c] += 1.0;
      means_.row(c) += x.row(i);
    }
    for (int c = 0; c < n_classes; ++c) means_.row(c) /= counts[c];
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const int c = y[static_cast<std::size_t>(i)];
      variances_.row(c) += (x.row(i) - means_.row(c)).array().square().matrix();
    }
    for (int c = 0; c < n_classes; ++c) variances_.row(c) /= counts[c];

    double max_var = 0.0;
    const Vector global_mean = x.colwise().mean();
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      max_var = std::max(max_var, (x.col(j).array() - global_mean[j]).square().mean());
    }
    const double floor = var_smoothing * std::max(max_var, 1.0);
    variances_ = variances_.array().max(floor).matrix();

    for (int c = 0; c < n_classes; ++c) {
      log_priors_[c] = std::log(counts[c] / static_cast<double>(x.rows()));
    }
    training_loss_ = 0.0;
  }

  Matrix predict_scores(const Matrix& x) const override {
    check_features(x);
    Matrix scores(x.rows(), n_classes_);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      Vector log_post(n_classes_);
      for (int c = 0; c < n_classes_; ++c) {
        double ll = log_priors_[c];
        for (Eigen::Index j = 0; j < n_features_; ++j) {
          const double diff = x(i, j) - means_(c, j);
          ll -= 0.5 * (std::log(2.0 * M_PI * variances_(c, j)) + diff * diff / variances_(c, j));
        }
        log_post[c] = ll;
      }
      const double max_lp = log_post.maxCoeff();
      double total = 0.0;
      for (int c = 0; c < n_classes_; ++c) {
        log_post[c] = std::exp(log_post[c] - max_lp);
        total += log_post[c];
      }
      scores.row(i) = (log_post / total).transpose();
    }
    return scores;
  }

  std::string family() const override { return "gaussian_nb"; }

 private:
  Matrix means_;
  Matrix variances_;
  Vector log_priors_;
};

}  // namespace footprint
