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
#include <numeric>
#include <string>
#include <vector>

#include "footprint/classifiers/model.hpp"
#include "footprint/common.hpp"
#include "footprint/rng.hpp"

namespace footprint {

// Multinomial logistic regression with L2-penalized weights (bias free),
// minimized by Nesterov-accelerated gradient descent with backtracking line
// search. Convergence is declared on the gradient infinity norm; running out
// of iterations is recorded in the diagnostics rather than raised.
class LogisticRegression : public Model {
 public:
  void fit(const Matrix& x, const Labels& y, int n_classes, double lambda, double tol,
           int max_iter) {
    n_classes_ = n_classes;
    n_features_ = x.cols();
    const Eigen::Index n = x.rows();
    const double inv_n = 1.0 / static_cast<double>(n);

    Matrix onehot = Matrix::Zero(n, n_classes);
    for (Eigen::Index i = 0; i < n; ++i) onehot(i, y[static_cast<std::size_t>(i)]) = 1.0;

    weights_ = Matrix::Zero(n_features_, n_classes);
    bias_ = Eigen::RowVectorXd::Zero(n_classes);

    Matrix w_prev = weights_, w_momentum = weights_;
    Eigen::RowVectorXd b_prev = bias_, b_momentum = bias_;
    double step = 1.0;
    converged_ = false;

    auto objective = [&](const Matrix& w, const Eigen::RowVectorXd& b) {
      const Matrix probs = softmax(x * w + b.replicate(n, 1));
      double ce = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        ce -= std::log(std::max(probs(i, y[static_cast<std::size_t>(i)]), 1e-300));
      }
      return ce * inv_n + 0.5 * lambda * inv_n * w.squaredNorm();
    };

    for (iterations_ = 0; iterations_ < max_iter; ++iterations_) {
      const Matrix probs = softmax(x * w_momentum + b_momentum.replicate(n, 1));
      const Matrix grad_w = inv_n * (x.transpose() * (probs - onehot)) + lambda * inv_n * w_momentum;
      const Eigen::RowVectorXd grad_b = inv_n * (probs - onehot).colwise().sum();

      const double grad_norm = std::max(grad_w.cwiseAbs().maxCoeff(), grad_b.cwiseAbs().maxCoeff());
      if (grad_norm < tol) {
        weights_ = w_momentum;
        bias_ = b_momentum;
        converged_ = true;
        break;
      }

      const double f0 = objective(w_momentum, b_momentum);
      const double grad_sq = grad_w.squaredNorm() + grad_b.squaredNorm();
      step *= 2.0;  // allow the step to grow back after conservative phases
      Matrix w_next;
      Eigen::RowVectorXd b_next;
      for (int probe = 0; probe < 60; ++probe) {
        w_next = w_momentum - step * grad_w;
        b_next = b_momentum - step * grad_b;
        if (objective(w_next, b_next) <= f0 - 0.5 * step * grad_sq) break;
        step *= 0.5;
      }

      const double beta = static_cast<double>(iterations_) / (iterations_ + 3.0);
      w_momentum = w_next + beta * (w_next - w_prev);
      b_momentum = b_next + beta * (b_next - b_prev);
      w_prev = w_next;
      b_prev = b_next;
      weights_ = w_next;
      bias_ = b_next;
    }
    training_loss_ = objective(weights_, bias_);
  }

  Matrix predict_scores(const Matrix& x) const override {
    check_features(x);
    return softmax(x * weights_ + bias_.replicate(x.rows(), 1));
  }

  std::string family() const override { return "logistic_regression"; }

  bool converged() const { return converged_; }
  int iterations() const { return iterations_; }

 private:
  static Matrix softmax(const Matrix& logits) {
    Matrix out(logits.rows(), logits.cols());
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
      const double m = logits.row(i).maxCoeff();
      double total = 0.0;
      for (Eigen::Index j = 0; j < logits.cols(); ++j) {
        out(i, j) = std::exp(logits(i, j) - m);
        total += out(i, j);
      }
      out.row(i) /= total;
    }
    return out;
  }

  Matrix weights_;               // d x K
  Eigen::RowVectorXd bias_;      // K
  bool converged_ = false;
  int iterations_ = 0;
};

// One-vs-rest linear hinge-loss classifiers trained by stochastic gradient
// descent with the inverse-scaling step size eta_t = 1 / (alpha (t0 + t)).
// Scores are raw margins, not probabilities.
class SgdLinear : public Model {
 public:
  void fit(const Matrix& x, const Labels& y, int n_classes, double alpha, int max_iter, double tol,
           std::uint64_t seed) {
    n_classes_ = n_classes;
    n_features_ = x.cols();
    const Eigen::Index n = x.rows();
    weights_ = Matrix::Zero(n_features_, n_classes);
    bias_ = Eigen::RowVectorXd::Zero(n_classes);

    // Step-size horizon from the usual heuristic: the initial step is the
    // typical weight scale 1/sqrt(sqrt(alpha)).
    const double typical = 1.0 / std::sqrt(std::sqrt(alpha));
    const double t0 = 1.0 / (alpha * typical);

    Rng rng = Rng(seed).split("sgd");
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);

    double best_obj = 1e300;
    int stale_epochs = 0;
    long t = 0;
    for (int epoch = 0; epoch < max_iter; ++epoch) {
      rng.shuffle(order);
      for (int idx : order) {
        const double eta = 1.0 / (alpha * (t0 + static_cast<double>(++t)));
        const auto xi = x.row(idx);
        for (int c = 0; c < n_classes; ++c) {
          const double target = y[static_cast<std::size_t>(idx)] == c ? 1.0 : -1.0;
          const double margin = target * (xi.dot(weights_.col(c)) + bias_[c]);
          weights_.col(c) *= (1.0 - eta * alpha);
          if (margin < 1.0) {
            weights_.col(c) += eta * target * xi.transpose();
            bias_[c] += eta * target;
          }
        }
      }
      const double obj = objective(x, y, alpha);
      if (obj < best_obj - tol) {
        best_obj = obj;
        stale_epochs = 0;
      } else if (++stale_epochs >= 5) {
        break;
      }
    }
    training_loss_ = objective(x, y, alpha);
  }

  // Raw one-vs-rest margins.
  Matrix predict_scores(const Matrix& x) const override {
    check_features(x);
    return x * weights_ + bias_.replicate(x.rows(), 1);
  }

  std::string family() const override { return "sgd_linear"; }

 private:
  double objective(const Matrix& x, const Labels& y, double alpha) const {
    const Matrix margins = x * weights_ + bias_.replicate(x.rows(), 1);
    double hinge = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      for (int c = 0; c < n_classes_; ++c) {
        const double target = y[static_cast<std::size_t>(i)] == c ? 1.0 : -1.0;
        hinge += std::max(0.0, 1.0 - target * margins(i, c));
      }
    }
    return hinge / static_cast<double>(x.rows()) + 0.5 * alpha * weights_.squaredNorm();
  }

  Matrix weights_;
  Eigen::RowVectorXd bias_;
};

}  // namespace footprint
