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

#include <memory>
#include <string>

#include "footprint/common.hpp"

namespace footprint {

// Fitted classifier. Implementations are immutable after fit; predict is the
// argmax of predict_scores with ties broken toward the lowest class id.
class Model {
 public:
  virtual ~Model() = default;

  virtual Matrix predict_scores(const Matrix& features) const = 0;
  virtual std::string family() const = 0;

  Labels predict(const Matrix& features) const {
    const Matrix scores = predict_scores(features);
    Labels out(static_cast<std::size_t>(scores.rows()));
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
      int best = 0;
      for (Eigen::Index j = 1; j < scores.cols(); ++j) {
        if (scores(i, j) > scores(i, best)) best = static_cast<int>(j);
      }
      out[static_cast<std::size_t>(i)] = best;
    }
    return out;
  }

  int n_classes() const { return n_classes_; }
  Eigen::Index n_features() const { return n_features_; }
  double training_loss() const { return training_loss_; }

 protected:
  void check_features(const Matrix& x) const {
    if (x.cols() != n_features_) {
      throw Error(family() + ": feature count mismatch (" + std::to_string(x.cols()) + " vs " +
                  std::to_string(n_features_) + ")");
    }
  }

  int n_classes_ = 0;
  Eigen::Index n_features_ = 0;
  double training_loss_ = 0.0;
};

}  // namespace footprint
