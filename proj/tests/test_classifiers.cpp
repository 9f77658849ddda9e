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

#include "footprint/classifiers.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "footprint/metrics.hpp"
#include "footprint/synth.hpp"

namespace footprint {
namespace {

// Two overlapping Gaussian blobs; the workhorse fixture for fit checks.
Dataset blobs(int n, double separation, std::uint64_t seed, int n_classes = 2) {
  Rng rng(seed);
  Dataset d;
  d.name = "blobs";
  d.features.resize(n, 3);
  d.labels.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int y = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_classes)));
    for (Eigen::Index j = 0; j < 3; ++j) {
      d.features(i, j) = rng.normal() + separation * y * (j == 0 ? 1.0 : 0.3);
    }
    d.labels[static_cast<std::size_t>(i)] = y;
  }
  d.n_classes = n_classes;
  d.feature_kinds.assign(3, FeatureKind::kNumeric);
  return d;
}

TEST(DecisionTree, SeparableDataReachesPerfectTrainingAccuracy) {
  Matrix x(4, 2);
  x << 0.0, 0.0, 0.1, 0.2, 5.0, 5.0, 5.2, 4.9;
  const Labels y{0, 0, 1, 1};
  ClassifierSpec spec = standard_spec("decision_tree");
  spec.hyper["max_features"] = 2;
  const TrainedModel m = fit(spec, x, y, 2);
  EXPECT_EQ(m.predict(x), y);
  EXPECT_DOUBLE_EQ(m.training_loss(), 0.0);
}

TEST(DecisionTree, DepthCapHolds) {
  const Dataset d = blobs(600, 0.5, 1);
  TreeParams params;
  params.max_depth = 10;
  params.max_features = 0;
  auto tree = fit_decision_tree(d.features, d.labels, 2, params, 3);
  EXPECT_LE(tree->max_path_depth(), 10);

  params.max_depth = 3;
  auto shallow = fit_decision_tree(d.features, d.labels, 2, params, 3);
  EXPECT_LE(shallow->max_path_depth(), 3);
}

TEST(DecisionTree, DeterministicGivenSeed) {
  const Dataset d = blobs(300, 1.0, 2);
  const Dataset probe = blobs(100, 1.0, 99);
  const auto spec = standard_spec("decision_tree").with_seed(21);
  const TrainedModel a = fit(spec, d);
  const TrainedModel b = fit(spec, d);
  EXPECT_EQ(a.predict(probe.features), b.predict(probe.features));
}

TEST(DecisionTree, PredictionIsPointwise) {
  const Dataset d = blobs(200, 1.5, 3);
  const TrainedModel m = fit(standard_spec("decision_tree").with_seed(1), d);
  Matrix queries = blobs(40, 1.5, 4).features;
  const Labels straight = m.predict(queries);
  Matrix reversed(queries.rows(), queries.cols());
  for (Eigen::Index i = 0; i < queries.rows(); ++i) {
    reversed.row(i) = queries.row(queries.rows() - 1 - i);
  }
  const Labels back = m.predict(reversed);
  for (Eigen::Index i = 0; i < queries.rows(); ++i) {
    EXPECT_EQ(straight[static_cast<std::size_t>(i)],
              back[static_cast<std::size_t>(queries.rows() - 1 - i)]);
  }
}

TEST(RandomForest, SingleTreeNoBootstrapEqualsDecisionTree) {
  const Dataset d = blobs(400, 1.0, 5);
  const Dataset probe = blobs(150, 1.0, 55);

  ClassifierSpec forest_spec = standard_spec("random_forest");
  forest_spec.hyper["n_trees"] = 1;
  forest_spec.hyper["bootstrap"] = 0;
  const TrainedModel forest = fit(forest_spec.with_seed(77), d);
  const TrainedModel tree = fit(standard_spec("decision_tree").with_seed(77), d);
  EXPECT_EQ(forest.predict(probe.features), tree.predict(probe.features));
}

TEST(RandomForest, UnanimousVoteGivesScoreOne) {
  // Well-separated data: every tree votes the same way.
  Matrix x(6, 2);
  x << 0, 0, 0.1, 0, 0.2, 0.1, 9, 9, 9.1, 9, 9.2, 9.1;
  const Labels y{0, 0, 0, 1, 1, 1};
  ClassifierSpec spec = standard_spec("random_forest");
  spec.hyper["n_trees"] = 25;
  spec.hyper["max_features"] = 2;
  spec.hyper["bootstrap"] = 0;  // every tree sees both clusters
  const TrainedModel m = fit(spec.with_seed(1), x, y, 2);
  Matrix q(1, 2);
  q << 9.05, 9.05;
  const Matrix scores = m.predict_scores(q);
  EXPECT_DOUBLE_EQ(scores(0, 1), 1.0);
}

TEST(RandomForest, ScoresAreDistributions) {
  const Dataset d = blobs(300, 0.8, 6, 3);
  const TrainedModel m = fit(standard_spec("random_forest").with_seed(9), d);
  const Matrix scores = m.predict_scores(d.features.topRows(50));
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    EXPECT_NEAR(scores.row(i).sum(), 1.0, 1e-9);
    EXPECT_GE(scores.row(i).minCoeff(), 0.0);
  }
}

TEST(Knn, StoresTrainingRowsAndMemorizesPureNeighborhoods) {
  // Tight, far-apart clusters: each training row's 5-neighborhood is pure.
  Rng rng(7);
  Matrix x(40, 2);
  Labels y(40);
  for (int i = 0; i < 40; ++i) {
    const int cls = i % 2;
    x(i, 0) = cls * 50.0 + rng.uniform(-0.5, 0.5);
    x(i, 1) = cls * 50.0 + rng.uniform(-0.5, 0.5);
    y[static_cast<std::size_t>(i)] = cls;
  }
  const TrainedModel m = fit(standard_spec("knn"), x, y, 2);
  const auto* knn = dynamic_cast<const KnnClassifier*>(m.model.get());
  ASSERT_NE(knn, nullptr);
  EXPECT_TRUE(knn->stored_training_features() == x);
  EXPECT_EQ(m.predict(x), y);
}

TEST(Knn, MajorityVoteAndScores) {
  // Query at the origin: three class-1 points slightly farther than two
  // class-0 points still win the 3:2 vote.
  Matrix x(6, 1);
  x << -1.0, -1.1, 1.2, 1.3, 1.4, 50.0;
  const Labels y{0, 0, 1, 1, 1, 0};
  const TrainedModel m = fit(standard_spec("knn"), x, y, 2);
  Matrix q(1, 1);
  q << 0.0;
  EXPECT_EQ(m.predict(q)[0], 1);
  const Matrix scores = m.predict_scores(q);
  EXPECT_NEAR(scores(0, 0), 0.4, 1e-6);
  EXPECT_NEAR(scores(0, 1), 0.6, 1e-6);
  EXPECT_NEAR(scores.row(0).sum(), 1.0, 1e-9);
}

TEST(Knn, VoteTieGoesToNearestNeighbor) {
  ClassifierSpec spec = standard_spec("knn");
  spec.hyper["k"] = 4;
  // Two votes each; the single nearest point belongs to class 1.
  Matrix x(4, 1);
  x << 0.5, 2.0, -1.0, -2.5;
  const Labels y{1, 1, 0, 0};
  const TrainedModel m = fit(spec, x, y, 2);
  Matrix q(1, 1);
  q << 0.0;
  EXPECT_EQ(m.predict(q)[0], 1);
}

TEST(GaussianNb, NearBayesAccuracyOnWellSeparatedClasses) {
  // Two unit-variance classes at -3 and +3: Bayes error ~0.13%, so a fresh
  // sample of 1000 points classifies at 95%+ (Monte Carlo oracle).
  Rng rng(8);
  auto draw = [&](int n, std::uint64_t seed) {
    Rng local(seed);
    Dataset d;
    d.features.resize(n, 1);
    d.labels.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const int y = local.bernoulli(0.5) ? 1 : 0;
      d.features(i, 0) = local.normal() + (y == 1 ? 3.0 : -3.0);
      d.labels[static_cast<std::size_t>(i)] = y;
    }
    d.n_classes = 2;
    d.feature_kinds.assign(1, FeatureKind::kNumeric);
    return d;
  };
  const Dataset train = draw(500, 101);
  const Dataset test = draw(1000, 202);
  const TrainedModel m = fit(standard_spec("gaussian_nb"), train);
  EXPECT_GE(accuracy(m.predict(test.features), test.labels).value, 0.95);
}

TEST(GaussianNb, SymmetricMidpointScoresAreHalfHalf) {
  Matrix x(8, 1);
  x << -4.0, -3.0, -2.0, -3.0, 2.0, 3.0, 4.0, 3.0;
  const Labels y{0, 0, 0, 0, 1, 1, 1, 1};
  const TrainedModel m = fit(standard_spec("gaussian_nb"), x, y, 2);
  Matrix mid(1, 1);
  mid << 0.0;
  const Matrix scores = m.predict_scores(mid);
  EXPECT_NEAR(scores(0, 0), 0.5, 1e-9);
  EXPECT_NEAR(scores(0, 1), 0.5, 1e-9);
}

TEST(LogisticRegression, SignRule) {
  Rng rng(9);
  Matrix x(200, 1);
  Labels y(200);
  for (int i = 0; i < 200; ++i) {
    x(i, 0) = rng.uniform(-4.0, 4.0);
    y[static_cast<std::size_t>(i)] = x(i, 0) > 0 ? 1 : 0;
  }
  const TrainedModel m = fit(standard_spec("logistic_regression"), x, y, 2);
  Matrix q(2, 1);
  q << 5.0, -5.0;
  const Labels pred = m.predict(q);
  EXPECT_EQ(pred[0], 1);
  EXPECT_EQ(pred[1], 0);
  const Matrix scores = m.predict_scores(q);
  EXPECT_NEAR(scores.row(0).sum(), 1.0, 1e-9);
  EXPECT_GT(scores(0, 1), 0.9);
}

TEST(LogisticRegression, MulticlassConvergesAndNormalizes) {
  const Dataset d = blobs(400, 2.0, 10, 3);
  const TrainedModel m = fit(standard_spec("logistic_regression"), d);
  const Matrix scores = m.predict_scores(d.features.topRows(20));
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    EXPECT_NEAR(scores.row(i).sum(), 1.0, 1e-6);
  }
  EXPECT_GT(accuracy(m.predict(d.features), d.labels).value, 0.8);
}

TEST(SgdLinear, LearnsSeparableDataAndReturnsMargins) {
  Rng rng(11);
  Matrix x(400, 2);
  Labels y(400);
  for (int i = 0; i < 400; ++i) {
    x(i, 0) = rng.normal();
    x(i, 1) = rng.normal();
    y[static_cast<std::size_t>(i)] = (x(i, 0) + x(i, 1) > 0) ? 1 : 0;
  }
  const TrainedModel m = fit(standard_spec("sgd_linear").with_seed(5), x, y, 2);
  EXPECT_GT(accuracy(m.predict(x), y).value, 0.9);
  // Margins, not probabilities: rows are not normalized.
  const Matrix scores = m.predict_scores(x.topRows(10));
  bool any_unnormalized = false;
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    if (std::abs(scores.row(i).sum() - 1.0) > 1e-3) any_unnormalized = true;
  }
  EXPECT_TRUE(any_unnormalized);
}

TEST(SgdLinear, DeterministicGivenSeed) {
  const Dataset d = blobs(300, 1.0, 12);
  const TrainedModel a = fit(standard_spec("sgd_linear").with_seed(3), d);
  const TrainedModel b = fit(standard_spec("sgd_linear").with_seed(3), d);
  EXPECT_TRUE(a.predict_scores(d.features) == b.predict_scores(d.features));
}

TEST(AdaBoost, StageErrorsStayBelowChanceBound) {
  const Dataset d = blobs(500, 1.2, 13);
  const TrainedModel m = fit(standard_spec("adaboost").with_seed(2), d);
  const auto* ada = dynamic_cast<const AdaBoost*>(m.model.get());
  ASSERT_NE(ada, nullptr);
  ASSERT_GT(ada->n_stages(), 0u);
  for (std::size_t s = 0; s < ada->n_stages(); ++s) {
    EXPECT_LT(ada->stage_errors()[s], 0.5);  // binary bound
    EXPECT_TRUE(std::isfinite(ada->stage_alpha(s)));
    EXPECT_GT(ada->stage_alpha(s), 0.0);
  }
  const Matrix scores = m.predict_scores(d.features.topRows(10));
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    EXPECT_NEAR(scores.row(i).sum(), 1.0, 1e-9);
  }
}

TEST(AdaBoost, PerfectStumpStopsTraining) {
  Matrix x(6, 1);
  x << 0, 1, 2, 10, 11, 12;
  const Labels y{0, 0, 0, 1, 1, 1};
  const TrainedModel m = fit(standard_spec("adaboost"), x, y, 2);
  const auto* ada = dynamic_cast<const AdaBoost*>(m.model.get());
  EXPECT_EQ(ada->n_stages(), 1u);
  EXPECT_EQ(m.predict(x), y);
}

TEST(GBoost, TrainingLossIsNonIncreasing) {
  const Dataset d = blobs(400, 0.8, 14);
  const TrainedModel m = fit(standard_spec("gboost"), d);
  const auto* gb = dynamic_cast<const GBoost*>(m.model.get());
  ASSERT_NE(gb, nullptr);
  const auto& curve = gb->loss_curve();
  ASSERT_EQ(curve.size(), 100u);
  for (std::size_t i = 1; i < curve.size(); ++i) {
    EXPECT_LE(curve[i], curve[i - 1] + 1e-9) << "round " << i;
  }
}

TEST(GBoost, MulticlassProbabilitiesAndFit) {
  const Dataset d = blobs(300, 2.0, 15, 3);
  ClassifierSpec spec = standard_spec("gboost");
  spec.hyper["n_rounds"] = 30;
  const TrainedModel m = fit(spec, d);
  const Matrix scores = m.predict_scores(d.features.topRows(20));
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    EXPECT_NEAR(scores.row(i).sum(), 1.0, 1e-9);
  }
  EXPECT_GT(accuracy(m.predict(d.features), d.labels).value, 0.9);
}

TEST(Mlp, ZeroOutputLayerGivesUniformScores) {
  MlpNetwork net(4, {8}, 3, Rng(1));
  net.weights.back().setZero();
  net.biases.back().setZero();
  Rng rng(2);
  Matrix x(5, 4);
  for (Eigen::Index i = 0; i < 5; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) x(i, j) = rng.normal();
  }
  const Matrix probs = net.forward(x);
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    for (Eigen::Index j = 0; j < probs.cols(); ++j) {
      EXPECT_NEAR(probs(i, j), 1.0 / 3.0, 1e-12);
    }
  }
}

TEST(Mlp, GradientsMatchCentralFiniteDifferences) {
  Rng data_rng(3);
  Matrix x(10, 5);
  Labels y(10);
  for (Eigen::Index i = 0; i < 10; ++i) {
    for (Eigen::Index j = 0; j < 5; ++j) x(i, j) = data_rng.normal();
    y[static_cast<std::size_t>(i)] = static_cast<int>(data_rng.below(3));
  }
  MlpNetwork net(5, {8, 6}, 3, Rng(4));
  const double alpha = 1e-4;

  std::vector<Matrix> grad_w;
  std::vector<Eigen::RowVectorXd> grad_b;
  net.loss_and_gradients(x, y, alpha, grad_w, grad_b);

  const double h = 1e-6;
  std::vector<Matrix> unused_w;
  std::vector<Eigen::RowVectorXd> unused_b;
  double worst = 0.0;
  for (std::size_t l = 0; l < net.n_layers(); ++l) {
    for (Eigen::Index r = 0; r < net.weights[l].rows(); ++r) {
      for (Eigen::Index c = 0; c < net.weights[l].cols(); ++c) {
        const double saved = net.weights[l](r, c);
        net.weights[l](r, c) = saved + h;
        const double up = net.loss_and_gradients(x, y, alpha, unused_w, unused_b);
        net.weights[l](r, c) = saved - h;
        const double down = net.loss_and_gradients(x, y, alpha, unused_w, unused_b);
        net.weights[l](r, c) = saved;
        const double fd = (up - down) / (2.0 * h);
        const double denom = std::max({1e-8, std::abs(fd), std::abs(grad_w[l](r, c))});
        worst = std::max(worst, std::abs(fd - grad_w[l](r, c)) / denom);
      }
    }
    for (Eigen::Index c = 0; c < net.biases[l].size(); ++c) {
      const double saved = net.biases[l][c];
      net.biases[l][c] = saved + h;
      const double up = net.loss_and_gradients(x, y, alpha, unused_w, unused_b);
      net.biases[l][c] = saved - h;
      const double down = net.loss_and_gradients(x, y, alpha, unused_w, unused_b);
      net.biases[l][c] = saved;
      const double fd = (up - down) / (2.0 * h);
      const double denom = std::max({1e-8, std::abs(fd), std::abs(grad_b[l][c])});
      worst = std::max(worst, std::abs(fd - grad_b[l][c]) / denom);
    }
  }
  EXPECT_LE(worst, 1e-4);
}

TEST(Mlp, FitsBlobsDeterministically) {
  const Dataset d = blobs(300, 2.5, 16);
  ClassifierSpec spec = standard_spec("mlp_shallow");
  spec.hyper["epochs"] = 60;
  const TrainedModel a = fit(spec.with_seed(8), d);
  const TrainedModel b = fit(spec.with_seed(8), d);
  EXPECT_TRUE(a.predict_scores(d.features) == b.predict_scores(d.features));
  EXPECT_GT(accuracy(a.predict(d.features), d.labels).value, 0.85);
  const Matrix scores = a.predict_scores(d.features.topRows(10));
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    EXPECT_NEAR(scores.row(i).sum(), 1.0, 1e-9);
  }
}

TEST(FitDispatch, AllTenConfigurationsSatisfyScoreContracts) {
  Dataset d = blobs(240, 1.5, 17);
  for (const auto& base : standard_grid()) {
    ClassifierSpec spec = base.with_seed(31);
    if (spec.family == Family::kMlp) spec.hyper["epochs"] = 15;
    if (spec.family == Family::kGBoost) spec.hyper["n_rounds"] = 20;
    if (spec.family == Family::kRandomForest) spec.hyper["n_trees"] = 20;
    const TrainedModel m = fit(spec, d);

    const Matrix scores = m.predict_scores(d.features.topRows(30));
    const Labels pred = m.predict(d.features.topRows(30));
    EXPECT_TRUE(scores.allFinite()) << spec.name;
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
      // predict agrees with the argmax of scores, lowest class id on ties.
      int best = 0;
      for (Eigen::Index j = 1; j < scores.cols(); ++j) {
        if (scores(i, j) > scores(i, best)) best = static_cast<int>(j);
      }
      EXPECT_EQ(pred[static_cast<std::size_t>(i)], best) << spec.name;
      if (spec.family != Family::kSgdLinear) {
        EXPECT_NEAR(scores.row(i).sum(), 1.0, 1e-6) << spec.name;
      }
    }
    EXPECT_TRUE(std::isfinite(m.training_loss())) << spec.name;

    // Dimension mismatch is an error for every family.
    EXPECT_THROW(m.predict(Matrix::Zero(3, 7)), Error) << spec.name;
  }
}

TEST(FitDispatch, RejectsMalformedInputs) {
  const Dataset d = blobs(50, 1.0, 18);
  ClassifierSpec bad = standard_spec("knn");
  bad.hyper["k"] = 0;
  EXPECT_THROW(fit(bad, d), Error);

  ClassifierSpec tree = standard_spec("decision_tree");
  tree.hyper["max_depth"] = 0;
  EXPECT_THROW(fit(tree, d), Error);

  EXPECT_THROW(fit(standard_spec("gaussian_nb"), Matrix(0, 2), Labels{}, 2), Error);
}

}  // namespace
}  // namespace footprint
