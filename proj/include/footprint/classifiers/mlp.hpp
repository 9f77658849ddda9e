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

struct MlpParams {
  std::vector<int> hidden_layers{16};
  int epochs = 200;
  int batch = 32;
  double learning_rate = 1e-3;  // Adam step size
  double alpha = 1e-4;          // L2 penalty on weights
};

// Fully connected ReLU network with a softmax head trained on cross-entropy.
// Kept separate from the Model wrapper so tests can probe weights and
// gradients directly.
class MlpNetwork {
 public:
  std::vector<Matrix> weights;             // layer l: in x out
  std::vector<Eigen::RowVectorXd> biases;  // layer l: out

  MlpNetwork() = default;

  MlpNetwork(Eigen::Index n_inputs, const std::vector<int>& hidden, int n_outputs, Rng rng) {
    std::vector<Eigen::Index> dims;
    dims.push_back(n_inputs);
    for (int h : hidden) dims.push_back(h);
    dims.push_back(n_outputs);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
      const double scale = std::sqrt(2.0 / static_cast<double>(dims[l]));
      Matrix w(dims[l], dims[l + 1]);
      for (Eigen::Index i = 0; i < w.rows(); ++i) {
        for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = scale * rng.normal();
      }
      weights.push_back(std::move(w));
      biases.emplace_back(Eigen::RowVectorXd::Zero(dims[l + 1]));
    }
  }

  std::size_t n_layers() const { return weights.size(); }

  Matrix forward(const Matrix& x) const {
    Matrix h = x;
    for (std::size_t l = 0; l < weights.size(); ++l) {
      Matrix z = h * weights[l] + biases[l].replicate(h.rows(), 1);
      if (l + 1 < weights.size()) {
        h = z.cwiseMax(0.0);
      } else {
        h = softmax(z);
      }
    }
    return h;
  }

  // Mean cross-entropy plus the per-batch L2 term alpha ||W||^2 / (2 n).
  // Fills analytic gradients with the same layout as weights/biases.
  double loss_and_gradients(const Matrix& x, const Labels& y, double alpha,
                            std::vector<Matrix>& grad_w,
                            std::vector<Eigen::RowVectorXd>& grad_b) const {
    const Eigen::Index n = x.rows();
    const double inv_n = 1.0 / static_cast<double>(n);

    std::vector<Matrix> activations{x};  // h_0 .. h_{L-1}
    std::vector<Matrix> pre;             // z_1 .. z_L
    Matrix h = x;
    for (std::size_t l = 0; l < weights.size(); ++l) {
      Matrix z = h * weights[l] + biases[l].replicate(h.rows(), 1);
      pre.push_back(z);
      h = (l + 1 < weights.size()) ? Matrix(z.cwiseMax(0.0)) : softmax(z);
      if (l + 1 < weights.size()) activations.push_back(h);
    }

    double ce = 0.0;
    double weight_sq = 0.0;
    for (const auto& w : weights) weight_sq += w.squaredNorm();
    Matrix delta = h;  // probabilities
    for (Eigen::Index i = 0; i < n; ++i) {
      ce -= std::log(std::max(h(i, y[static_cast<std::size_t>(i)]), 1e-300));
      delta(i, y[static_cast<std::size_t>(i)]) -= 1.0;
    }
    delta *= inv_n;

    grad_w.assign(weights.size(), Matrix());
    grad_b.assign(weights.size(), Eigen::RowVectorXd());
    for (std::size_t l = weights.size(); l-- > 0;) {
      grad_w[l].noalias() = activations[l].transpose() * delta;
      grad_w[l] += alpha * inv_n * weights[l];
      grad_b[l] = delta.colwise().sum();
      if (l > 0) {
        Matrix back = delta * weights[l].transpose();
        delta = back.cwiseProduct((pre[l - 1].array() > 0.0).cast<double>().matrix());
      }
    }
    return ce * inv_n + 0.5 * alpha * inv_n * weight_sq;
  }

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
};

// Adam-trained MLP classifier.
class MlpClassifier : public Model {
 public:
  void fit(const Matrix& x, const Labels& y, int n_classes, const MlpParams& params,
           std::uint64_t seed) {
    n_classes_ = n_classes;
    n_features_ = x.cols();
    const Rng root(seed);
    net_ = MlpNetwork(x.cols(), params.hidden_layers, n_classes, root.split("init"));

    const Eigen::Index n = x.rows();
    const int batch = std::max(1, std::min<int>(params.batch, static_cast<int>(n)));

    std::vector<Matrix> m_w, v_w, grad_w;
    std::vector<Eigen::RowVectorXd> m_b, v_b, grad_b;
    for (std::size_t l = 0; l < net_.n_layers(); ++l) {
      m_w.push_back(Matrix::Zero(net_.weights[l].rows(), net_.weights[l].cols()));
      v_w.push_back(Matrix::Zero(net_.weights[l].rows(), net_.weights[l].cols()));
      m_b.push_back(Eigen::RowVectorXd::Zero(net_.biases[l].size()));
      v_b.push_back(Eigen::RowVectorXd::Zero(net_.biases[l].size()));
    }
    const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    long step = 0;

    Rng shuffle_rng = root.split("shuffle");
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);

    Matrix batch_x;
    Labels batch_y;
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
      shuffle_rng.shuffle(order);
      for (Eigen::Index start = 0; start < n; start += batch) {
        const Eigen::Index count = std::min<Eigen::Index>(batch, n - start);
        batch_x.resize(count, x.cols());
        batch_y.resize(static_cast<std::size_t>(count));
        for (Eigen::Index i = 0; i < count; ++i) {
          batch_x.row(i) = x.row(order[static_cast<std::size_t>(start + i)]);
          batch_y[static_cast<std::size_t>(i)] =
              y[static_cast<std::size_t>(order[static_cast<std::size_t>(start + i)])];
        }
        net_.loss_and_gradients(batch_x, batch_y, params.alpha, grad_w, grad_b);
        ++step;
        const double correction =
            std::sqrt(1.0 - std::pow(beta2, step)) / (1.0 - std::pow(beta1, step));
        for (std::size_t l = 0; l < net_.n_layers(); ++l) {
          m_w[l] = beta1 * m_w[l] + (1.0 - beta1) * grad_w[l];
          v_w[l] = beta2 * v_w[l] + (1.0 - beta2) * grad_w[l].cwiseProduct(grad_w[l]);
          net_.weights[l] -= params.learning_rate * correction *
                             m_w[l].cwiseQuotient((v_w[l].cwiseSqrt().array() + eps).matrix());
          m_b[l] = beta1 * m_b[l] + (1.0 - beta1) * grad_b[l];
          v_b[l] = beta2 * v_b[l] + (1.0 - beta2) * grad_b[l].cwiseProduct(grad_b[l]);
          net_.biases[l] -= params.learning_rate * correction *
                            m_b[l].cwiseQuotient((v_b[l].cwiseSqrt().array() + eps).matrix());
        }
      }
    }

    std::vector<Matrix> unused_w;
    std::vector<Eigen::RowVectorXd> unused_b;
    training_loss_ = net_.loss_and_gradients(x, y, params.alpha, unused_w, unused_b);
  }

  Matrix predict_scores(const Matrix& x) const override {
    check_features(x);
    return net_.forward(x);
  }

  std::string family() const override { return "mlp"; }

  const MlpNetwork& network() const { return net_; }

 private:
  MlpNetwork net_;
};

}  // namespace footprint
