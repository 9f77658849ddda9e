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
#include <utility>
#include <vector>

#include "footprint/common.hpp"
#include "footprint/dataset.hpp"
#include "footprint/rng.hpp"

namespace footprint {

enum class ShiftKind { kPrior, kCovariate, kConcept };

inline std::string shift_kind_name(ShiftKind k) {
  switch (k) {
    case ShiftKind::kPrior: return "prior";
    case ShiftKind::kCovariate: return "covariate";
    case ShiftKind::kConcept: return "concept";
  }
  return "?";
}

// Controlled train/test generator. Exactly one conditional changes per kind:
//   prior      - class priors differ, class-conditional Gaussians shared;
//   covariate  - feature marginals differ, the label rule P(y|x) is shared;
//   concept    - feature marginals shared, the label rule flips on a region.
struct ShiftSpec {
  ShiftKind kind = ShiftKind::kPrior;
  int n_train = 0;
  int n_test = 0;
  std::uint64_t seed = 0;

  // prior kind: class-conditional Gaussians, shared across partitions.
  std::vector<double> base_priors;     // train
  std::vector<double> shifted_priors;  // test
  Matrix class_means;                  // n_classes x d
  Vector variances;                    // diagonal covariance, all classes
  Matrix class_variances;              // optional n_classes x d override
  // Per-class fraction drawn from the other classes' Gaussians (scalar
  // broadcast or one entry per class). Part of P(x|y), identical in train
  // and test.
  std::vector<double> contamination;

  // covariate kind: Gaussian marginals with different means; labels drawn
  // from the shared rule P(y=1|x) = sigmoid(sharpness * (w.x + b)).
  Vector marginal_mean_train;
  Vector marginal_mean_test;
  Vector rule_weights;
  double rule_bias = 0.0;
  double rule_sharpness = 1.0;

  // concept kind: shared Gaussian marginal centered at marginal_mean_train;
  // train labels follow sign(w.x + b), test labels flip where
  // x[flip_dim] > flip_threshold.
  int flip_dim = 0;
  double flip_threshold = 0.0;

  double imbalance_ratio() const {
    const auto [lo, hi] = std::minmax_element(base_priors.begin(), base_priors.end());
    return *hi / *lo;
  }
};

namespace detail {

inline void check_priors(const std::vector<double>& p, const std::string& what) {
  if (p.size() < 2) throw Error("gen_shifted: " + what + " needs at least two classes");
  double total = 0.0;
  for (double v : p) {
    if (v <= 0.0) throw Error("gen_shifted: " + what + " has a non-positive entry");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) throw Error("gen_shifted: " + what + " does not sum to 1");
}

inline void check_variances(const Vector& v) {
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    if (v[j] <= 0.0) throw Error("gen_shifted: covariance is not positive definite");
  }
}

inline Vector gaussian_point(const Vector& mean, const Vector& variances, Rng& rng) {
  Vector x(mean.size());
  for (Eigen::Index j = 0; j < mean.size(); ++j) {
    x[j] = mean[j] + std::sqrt(variances[j]) * rng.normal();
  }
  return x;
}

}  // namespace detail

// Label rules for the concept kind, exposed so disagreement between the two
// rules can be evaluated directly on generated points.
inline int concept_train_label(const ShiftSpec& spec, const Vector& x) {
  return spec.rule_weights.dot(x) + spec.rule_bias > 0.0 ? 1 : 0;
}

inline int concept_test_label(const ShiftSpec& spec, const Vector& x) {
  const int base = concept_train_label(spec, x);
  return x[spec.flip_dim] > spec.flip_threshold ? 1 - base : base;
}

namespace detail {

inline double class_contamination(const ShiftSpec& spec, int y) {
  if (spec.contamination.empty()) return 0.0;
  if (spec.contamination.size() == 1) return spec.contamination[0];
  return spec.contamination[static_cast<std::size_t>(y)];
}

inline Vector class_variance_row(const ShiftSpec& spec, int y) {
  if (spec.class_variances.rows() > 0) return spec.class_variances.row(y);
  return spec.variances;
}

inline Dataset sample_prior_kind(const ShiftSpec& spec, const std::vector<double>& priors,
                                 int n, Rng rng, const std::string& name) {
  const int k = static_cast<int>(priors.size());
  Dataset d;
  d.name = name;
  d.n_classes = k;
  d.features.resize(n, spec.class_means.cols());
  d.labels.resize(static_cast<std::size_t>(n));
  d.feature_kinds.assign(static_cast<std::size_t>(spec.class_means.cols()), FeatureKind::kNumeric);
  for (int i = 0; i < n; ++i) {
    const int y = rng.categorical(priors);
    int source = y;
    const double nu = class_contamination(spec, y);
    if (nu > 0.0 && rng.bernoulli(nu)) {
      // Draw from one of the other classes' Gaussians.
      source = static_cast<int>(rng.below(static_cast<std::uint64_t>(k - 1)));
      if (source >= y) source += 1;
    }
    d.features.row(i) =
        gaussian_point(spec.class_means.row(source), class_variance_row(spec, source), rng);
    d.labels[static_cast<std::size_t>(i)] = y;
  }
  return d;
}

inline Dataset sample_covariate_kind(const ShiftSpec& spec, const Vector& marginal_mean, int n,
                                     Rng rng, const std::string& name) {
  Dataset d;
  d.name = name;
  d.n_classes = 2;
  d.features.resize(n, marginal_mean.size());
  d.labels.resize(static_cast<std::size_t>(n));
  d.feature_kinds.assign(static_cast<std::size_t>(marginal_mean.size()), FeatureKind::kNumeric);
  for (int i = 0; i < n; ++i) {
    const Vector x = gaussian_point(marginal_mean, spec.variances, rng);
    const double logit = spec.rule_sharpness * (spec.rule_weights.dot(x) + spec.rule_bias);
    const double p1 = 1.0 / (1.0 + std::exp(-logit));
    d.features.row(i) = x;
    d.labels[static_cast<std::size_t>(i)] = rng.bernoulli(p1) ? 1 : 0;
  }
  return d;
}

inline Dataset sample_concept_kind(const ShiftSpec& spec, bool flipped, int n, Rng rng,
                                   const std::string& name) {
  Dataset d;
  d.name = name;
  d.n_classes = 2;
  d.features.resize(n, spec.marginal_mean_train.size());
  d.labels.resize(static_cast<std::size_t>(n));
  d.feature_kinds.assign(static_cast<std::size_t>(spec.marginal_mean_train.size()),
                         FeatureKind::kNumeric);
  for (int i = 0; i < n; ++i) {
    const Vector x = gaussian_point(spec.marginal_mean_train, spec.variances, rng);
    d.features.row(i) = x;
    d.labels[static_cast<std::size_t>(i)] =
        flipped ? concept_test_label(spec, x) : concept_train_label(spec, x);
  }
  return d;
}

}  // namespace detail

// Generates a (train, test) pair under the requested shift kind.
inline std::pair<Dataset, Dataset> gen_shifted(const ShiftSpec& spec) {
  if (spec.n_train < 2 || spec.n_test < 2) throw Error("gen_shifted: partition sizes too small");
  if (spec.class_variances.rows() > 0) {
    for (Eigen::Index c = 0; c < spec.class_variances.rows(); ++c) {
      detail::check_variances(spec.class_variances.row(c));
    }
  } else {
    detail::check_variances(spec.variances);
  }
  for (double nu : spec.contamination) {
    if (nu < 0.0 || nu >= 1.0) throw Error("gen_shifted: contamination must be in [0, 1)");
  }
  const Rng root(spec.seed);

  switch (spec.kind) {
    case ShiftKind::kPrior: {
      detail::check_priors(spec.base_priors, "base_priors");
      detail::check_priors(spec.shifted_priors, "shifted_priors");
      if (spec.class_means.rows() != static_cast<Eigen::Index>(spec.base_priors.size())) {
        throw Error("gen_shifted: class_means rows must match prior length");
      }
      Dataset train = detail::sample_prior_kind(spec, spec.base_priors, spec.n_train,
                                                root.split("train"), "synthetic/prior/train");
      Dataset test = detail::sample_prior_kind(spec, spec.shifted_priors, spec.n_test,
                                               root.split("test"), "synthetic/prior/test");
      validate_dataset(train);
      validate_dataset(test);
      return {std::move(train), std::move(test)};
    }
    case ShiftKind::kCovariate: {
      Dataset train = detail::sample_covariate_kind(spec, spec.marginal_mean_train, spec.n_train,
                                                    root.split("train"), "synthetic/covariate/train");
      Dataset test = detail::sample_covariate_kind(spec, spec.marginal_mean_test, spec.n_test,
                                                   root.split("test"), "synthetic/covariate/test");
      validate_dataset(train);
      validate_dataset(test);
      return {std::move(train), std::move(test)};
    }
    case ShiftKind::kConcept: {
      Dataset train = detail::sample_concept_kind(spec, false, spec.n_train, root.split("train"),
                                                  "synthetic/concept/train");
      Dataset test = detail::sample_concept_kind(spec, true, spec.n_test, root.split("test"),
                                                 "synthetic/concept/test");
      validate_dataset(train);
      validate_dataset(test);
      return {std::move(train), std::move(test)};
    }
  }
  throw Error("gen_shifted: unknown kind");
}

// Two-class contamination mixture with prior and covariate shift combined,
// used for the desk-scale audit experiments. Each class's feature law is a
// Gaussian plus a per-class contamination fraction drawn from the opposite
// class, so high-capacity models have pointwise structure to memorize while
// the coarse boundary stays learnable. An optional leading block of features
// carries class information in the variances instead of the means; that
// signal survives in raw feature space but not in mean-threshold bit codes.
// The test partition may change priors (prior shift) and translate all
// features (covariate shift).
struct CompositeSpec {
  std::string name = "composite";
  int n_features = 8;
  double separation = 2.0;  // |mu1 - mu0| over the mean-signal block
  std::vector<double> contamination = {0.0, 0.0};  // per class
  double variance_ratio = 1.0;   // class-0 variance on the variance block
  int n_variance_features = 0;   // leading features carrying variance signal
  // Snap features to a lattice of this pitch (0 disables). Residual class
  // overlap then sits on shared lattice points that no model can memorize,
  // the way quantized pixel data behaves.
  double quantize_step = 0.0;
  std::vector<double> train_priors = {0.5, 0.5};
  std::vector<double> test_priors = {0.5, 0.5};
  Vector test_translation;       // empty means none
  int n_train = 0;
  int n_test = 0;
  std::uint64_t seed = 0;

  // Class-mean offset direction: positive weights tapering across the
  // mean-signal block, zero on the variance block.
  Vector direction() const {
    Vector dir = Vector::Zero(n_features);
    for (int j = n_variance_features; j < n_features; ++j) {
      dir[j] = 1.0 / std::sqrt(1.0 + static_cast<double>(j - n_variance_features));
    }
    if (dir.norm() > 0.0) dir.normalize();
    return dir;
  }
};

inline std::pair<Dataset, Dataset> gen_composite(const CompositeSpec& spec) {
  detail::check_priors(spec.train_priors, "train_priors");
  detail::check_priors(spec.test_priors, "test_priors");
  if (spec.n_variance_features < 0 || spec.n_variance_features > spec.n_features) {
    throw Error("gen_composite: variance block out of range");
  }

  ShiftSpec base;
  base.kind = ShiftKind::kPrior;
  base.n_train = spec.n_train;
  base.n_test = spec.n_test;
  base.seed = spec.seed;
  base.base_priors = spec.train_priors;
  base.shifted_priors = spec.test_priors;
  base.contamination = spec.contamination;
  base.variances = Vector::Ones(spec.n_features);
  base.class_means.setZero(2, spec.n_features);
  base.class_means.row(1) = (spec.separation * spec.direction()).transpose();
  if (spec.variance_ratio != 1.0 && spec.n_variance_features > 0) {
    base.class_variances = Matrix::Ones(2, spec.n_features);
    for (int j = 0; j < spec.n_variance_features; ++j) {
      base.class_variances(0, j) = spec.variance_ratio;
    }
  }

  auto [train, test] = gen_shifted(base);
  train.name = spec.name + "/train";
  test.name = spec.name + "/test";
  if (spec.test_translation.size() > 0) {
    if (spec.test_translation.size() != spec.n_features) {
      throw Error("gen_composite: translation length mismatch");
    }
    test.features.rowwise() += spec.test_translation.transpose();
  }
  if (spec.quantize_step > 0.0) {
    auto snap = [&](Matrix& m) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
          m(i, j) = std::round(m(i, j) / spec.quantize_step) * spec.quantize_step;
        }
      }
    };
    snap(train.features);
    snap(test.features);
  }
  return {std::move(train), std::move(test)};
}

}  // namespace footprint
