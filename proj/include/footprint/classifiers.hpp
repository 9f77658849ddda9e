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
#include <utility>

#include "footprint/classifiers/adaboost.hpp"
#include "footprint/classifiers/forest.hpp"
#include "footprint/classifiers/gboost.hpp"
#include "footprint/classifiers/knn.hpp"
#include "footprint/classifiers/linear.hpp"
#include "footprint/classifiers/mlp.hpp"
#include "footprint/classifiers/model.hpp"
#include "footprint/classifiers/naive_bayes.hpp"
#include "footprint/classifiers/spec.hpp"
#include "footprint/classifiers/tree.hpp"
#include "footprint/dataset.hpp"

namespace footprint {

struct TrainedModel {
  ClassifierSpec spec;
  std::shared_ptr<const Model> model;

  Labels predict(const Matrix& x) const { return model->predict(x); }
  Matrix predict_scores(const Matrix& x) const { return model->predict_scores(x); }
  double training_loss() const { return model->training_loss(); }
};

inline TrainedModel fit(const ClassifierSpec& spec, const Matrix& x, const Labels& y,
                        int n_classes) {
  validate_spec(spec);
  if (x.rows() != static_cast<Eigen::Index>(y.size())) {
    throw Error(spec.name + ": feature/label row mismatch");
  }
  if (x.rows() == 0) throw Error(spec.name + ": empty training set");

  std::shared_ptr<Model> model;
  switch (spec.family) {
    case Family::kDecisionTree: {
      TreeParams params;
      params.max_depth = static_cast<int>(spec.get("max_depth", 10));
      params.max_features = static_cast<int>(spec.get("max_features", 0));
      model = fit_decision_tree(x, y, n_classes, params, spec.seed);
      break;
    }
    case Family::kRandomForest: {
      TreeParams params;
      params.max_depth = static_cast<int>(spec.get("max_depth", 10));
      params.max_features = static_cast<int>(spec.get("max_features", 0));
      auto forest = std::make_shared<RandomForest>();
      forest->fit(x, y, n_classes, static_cast<int>(spec.get("n_trees", 100)),
                  spec.get("bootstrap", 1) != 0.0, params, spec.seed);
      model = std::move(forest);
      break;
    }
    case Family::kGBoost: {
      GBoostParams params;
      params.n_rounds = static_cast<int>(spec.get("n_rounds", 100));
      params.max_depth = static_cast<int>(spec.get("max_depth", 6));
      params.min_child_weight = spec.get("min_child_weight", 1.0);
      params.learning_rate = spec.get("learning_rate", 0.3);
      params.reg_lambda = spec.get("reg_lambda", 1.0);
      auto gb = std::make_shared<GBoost>();
      gb->fit(x, y, n_classes, params);
      model = std::move(gb);
      break;
    }
    case Family::kKnn: {
      auto knn = std::make_shared<KnnClassifier>();
      knn->fit(x, y, n_classes, static_cast<int>(spec.get("k", 5)));
      model = std::move(knn);
      break;
    }
    case Family::kSgdLinear: {
      auto sgd = std::make_shared<SgdLinear>();
      sgd->fit(x, y, n_classes, spec.get("alpha", 1e-4), static_cast<int>(spec.get("max_iter", 1000)),
               spec.get("tol", 1e-3), spec.seed);
      model = std::move(sgd);
      break;
    }
    case Family::kAdaBoost: {
      auto ada = std::make_shared<AdaBoost>();
      ada->fit(x, y, n_classes, static_cast<int>(spec.get("n_stages", 50)),
               static_cast<int>(spec.get("max_depth", 1)), spec.seed);
      model = std::move(ada);
      break;
    }
    case Family::kGaussianNb: {
      auto gnb = std::make_shared<GaussianNb>();
      gnb->fit(x, y, n_classes, spec.get("var_smoothing", 1e-9));
      model = std::move(gnb);
      break;
    }
    case Family::kLogisticRegression: {
      auto lr = std::make_shared<LogisticRegression>();
      lr->fit(x, y, n_classes, spec.get("lambda", 1.0), spec.get("tol", 1e-6),
              static_cast<int>(spec.get("max_iter", 1000)));
      model = std::move(lr);
      break;
    }
    case Family::kMlp: {
      MlpParams params;
      params.hidden_layers = spec.hidden_layers.empty() ? std::vector<int>{16} : spec.hidden_layers;
      params.epochs = static_cast<int>(spec.get("epochs", 200));
      params.batch = static_cast<int>(spec.get("batch", 32));
      params.learning_rate = spec.get("learning_rate", 1e-3);
      params.alpha = spec.get("alpha", 1e-4);
      auto mlp = std::make_shared<MlpClassifier>();
      mlp->fit(x, y, n_classes, params, spec.seed);
      model = std::move(mlp);
      break;
    }
  }
  if (!std::isfinite(model->training_loss())) {
    throw Error(spec.name + ": non-finite training loss");
  }
  return TrainedModel{spec, std::move(model)};
}

inline TrainedModel fit(const ClassifierSpec& spec, const Dataset& train) {
  validate_dataset(train);
  return fit(spec, train.features, train.labels, train.n_classes);
}

}  // namespace footprint
