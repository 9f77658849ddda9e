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
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "footprint/common.hpp"

namespace footprint {

enum class Family {
  kDecisionTree,
  kRandomForest,
  kGBoost,
  kKnn,
  kSgdLinear,
  kAdaBoost,
  kGaussianNb,
  kLogisticRegression,
  kMlp,
};

inline std::string family_name(Family f) {
  switch (f) {
    case Family::kDecisionTree: return "decision_tree";
    case Family::kRandomForest: return "random_forest";
    case Family::kGBoost: return "gboost";
    case Family::kKnn: return "knn";
    case Family::kSgdLinear: return "sgd_linear";
    case Family::kAdaBoost: return "adaboost";
    case Family::kGaussianNb: return "gaussian_nb";
    case Family::kLogisticRegression: return "logistic_regression";
    case Family::kMlp: return "mlp";
  }
  return "?";
}

inline Family family_from_name(const std::string& name) {
  for (Family f : {Family::kDecisionTree, Family::kRandomForest, Family::kGBoost, Family::kKnn,
                   Family::kSgdLinear, Family::kAdaBoost, Family::kGaussianNb,
                   Family::kLogisticRegression, Family::kMlp}) {
    if (family_name(f) == name) return f;
  }
  throw Error("unknown classifier family: " + name);
}

// Configuration for one classifier. Numeric hyperparameters live in a map so
// grids serialize directly; MLP hidden widths are structural and get their
// own field.
struct ClassifierSpec {
  std::string name;  // display name, e.g. "mlp_deep"
  Family family = Family::kDecisionTree;
  std::map<std::string, double> hyper;
  std::vector<int> hidden_layers;  // mlp only
  std::uint64_t seed = 0;

  double get(const std::string& key, double fallback) const {
    auto it = hyper.find(key);
    return it == hyper.end() ? fallback : it->second;
  }

  ClassifierSpec with_seed(std::uint64_t s) const {
    ClassifierSpec out = *this;
    out.seed = s;
    return out;
  }
};

inline void validate_spec(const ClassifierSpec& spec) {
  auto positive = [&](const std::string& key, double fallback) {
    if (spec.get(key, fallback) < 1.0) throw Error(spec.name + ": " + key + " must be >= 1");
  };
  switch (spec.family) {
    case Family::kDecisionTree:
    case Family::kRandomForest:
      positive("max_depth", 10);
      positive("max_features", 5);
      break;
    case Family::kGBoost:
      positive("max_depth", 6);
      break;
    case Family::kKnn:
      positive("k", 5);
      break;
    case Family::kMlp:
      for (int w : spec.hidden_layers) {
        if (w < 1) throw Error(spec.name + ": hidden layer widths must be positive");
      }
      break;
    default:
      break;
  }
  if (spec.get("lambda", 0.0) < 0.0 || spec.get("alpha", 0.0) < 0.0) {
    throw Error(spec.name + ": regularization strength must be >= 0");
  }
}

// The ten standard configurations audited by the harness.
inline std::vector<ClassifierSpec> standard_grid() {
  std::vector<ClassifierSpec> grid;

  ClassifierSpec tree{"decision_tree", Family::kDecisionTree,
                      {{"max_depth", 10}, {"max_features", 5}}, {}, 0};
  ClassifierSpec forest{"random_forest", Family::kRandomForest,
                        {{"n_trees", 100}, {"max_depth", 10}, {"max_features", 5}, {"bootstrap", 1}},
                        {}, 0};
  ClassifierSpec gboost{"gboost", Family::kGBoost,
                        {{"n_rounds", 100}, {"max_depth", 6}, {"min_child_weight", 1},
                         {"learning_rate", 0.3}, {"reg_lambda", 1.0}},
                        {}, 0};
  ClassifierSpec knn{"knn", Family::kKnn, {{"k", 5}}, {}, 0};
  ClassifierSpec sgd{"sgd_linear", Family::kSgdLinear,
                     {{"alpha", 1e-4}, {"max_iter", 1000}, {"tol", 1e-3}}, {}, 0};
  ClassifierSpec ada{"adaboost", Family::kAdaBoost, {{"n_stages", 50}, {"max_depth", 1}}, {}, 0};
  ClassifierSpec gnb{"gaussian_nb", Family::kGaussianNb, {}, {}, 0};
  ClassifierSpec logreg{"logistic_regression", Family::kLogisticRegression,
                        {{"lambda", 1.0}, {"tol", 1e-6}, {"max_iter", 1000}}, {}, 0};
  ClassifierSpec mlp_shallow{"mlp_shallow", Family::kMlp,
                             {{"epochs", 200}, {"batch", 32}, {"learning_rate", 1e-3}, {"alpha", 1e-4}},
                             {16}, 0};
  ClassifierSpec mlp_deep = mlp_shallow;
  mlp_deep.name = "mlp_deep";
  mlp_deep.hidden_layers = {128, 64, 32, 32, 16, 16, 8, 8};

  grid = {tree, forest, gboost, knn, sgd, ada, gnb, logreg, mlp_shallow, mlp_deep};
  return grid;
}

inline ClassifierSpec standard_spec(const std::string& name) {
  for (const auto& spec : standard_grid()) {
    if (spec.name == name) return spec;
  }
  throw Error("unknown classifier configuration: " + name);
}

// Distance- and gradient-based families train on standardized features; tree
// ensembles and Gaussian NB take raw values.
inline bool wants_standardized(Family f) {
  return f == Family::kKnn || f == Family::kSgdLinear || f == Family::kLogisticRegression ||
         f == Family::kMlp;
}

inline nlohmann::json spec_to_json(const ClassifierSpec& spec) {
  nlohmann::json j{{"name", spec.name}, {"family", family_name(spec.family)}, {"seed", spec.seed}};
  j["hyperparameters"] = spec.hyper;
  if (!spec.hidden_layers.empty()) j["hidden_layers"] = spec.hidden_layers;
  return j;
}

inline ClassifierSpec spec_from_json(const nlohmann::json& j) {
  ClassifierSpec spec;
  if (j.is_string()) {
    // A bare name refers to one of the standard configurations.
    return standard_spec(j.get<std::string>());
  }
  if (j.contains("name") && !j.contains("family")) {
    spec = standard_spec(j.at("name").get<std::string>());
  } else {
    spec.family = family_from_name(j.at("family").get<std::string>());
    spec.name = j.value("name", family_name(spec.family));
  }
  if (j.contains("hyperparameters")) {
    for (const auto& [key, value] : j.at("hyperparameters").items()) {
      spec.hyper[key] = value.get<double>();
    }
  }
  if (j.contains("hidden_layers")) spec.hidden_layers = j.at("hidden_layers").get<std::vector<int>>();
  spec.seed = j.value("seed", std::uint64_t{0});
  validate_spec(spec);
  return spec;
}

// A grid file is a JSON array (or {"classifiers": [...]}) of specs or names.
inline std::vector<ClassifierSpec> grid_from_json(const nlohmann::json& j) {
  const nlohmann::json& arr = j.is_object() ? j.at("classifiers") : j;
  std::vector<ClassifierSpec> grid;
  for (const auto& item : arr) grid.push_back(spec_from_json(item));
  if (grid.empty()) throw Error("classifier grid is empty");
  return grid;
}

}  // namespace footprint
