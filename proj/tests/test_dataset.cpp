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

#include "footprint/dataset.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

namespace footprint {
namespace {

class TempCsv {
 public:
  explicit TempCsv(const std::string& content) {
    path_ = std::filesystem::temp_directory_path() /
            ("footprint_test_" + std::to_string(counter_++) + ".csv");
    std::ofstream out(path_);
    out << content;
  }
  ~TempCsv() { std::filesystem::remove(path_); }
  std::string path() const { return path_.string(); }

 private:
  static inline int counter_ = 0;
  std::filesystem::path path_;
};

TEST(LoadCsv, DenseLabelReindexing) {
  TempCsv csv("x,y,label\n1.0,2.0,a\n3.0,4.0,b\n5.0,6.0,a\n");
  const Dataset d = load_csv(csv.path(), "label");
  EXPECT_EQ(d.n_points(), 3);
  EXPECT_EQ(d.n_features(), 2);
  EXPECT_EQ(d.n_classes, 2);
  EXPECT_EQ(d.labels, (Labels{0, 1, 0}));
}

TEST(LoadCsv, NumericLabelsSortNumerically) {
  TempCsv csv("x,label\n1,10\n2,2\n3,10\n4,2\n");
  const Dataset d = load_csv(csv.path(), "label");
  // 2 -> 0, 10 -> 1 (numeric order, not lexicographic).
  EXPECT_EQ(d.labels, (Labels{1, 0, 1, 0}));
}

TEST(LoadCsv, LabelColumnByIndexAndLast) {
  TempCsv csv("1,2,0\n3,4,1\n5,6,0\n");
  LoadCsvOptions opts;
  opts.has_header = false;
  const Dataset by_last = load_csv(csv.path(), "last", opts);
  const Dataset by_index = load_csv(csv.path(), "2", opts);
  EXPECT_EQ(by_last.labels, by_index.labels);
  EXPECT_EQ(by_last.n_features(), 2);
}

TEST(LoadCsv, CategoricalOrdinalAndOneHot) {
  TempCsv csv("color,size,label\nred,1,0\nblue,2,1\nred,3,0\ngreen,4,1\n");
  const Dataset ordinal = load_csv(csv.path(), "label");
  EXPECT_EQ(ordinal.n_features(), 2);
  EXPECT_EQ(ordinal.feature_kinds[0], FeatureKind::kCategoricalEncoded);
  EXPECT_EQ(ordinal.feature_kinds[1], FeatureKind::kNumeric);
  // blue=0, green=1, red=2 in sorted vocabulary order.
  EXPECT_DOUBLE_EQ(ordinal.features(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(ordinal.features(1, 0), 0.0);
  EXPECT_DOUBLE_EQ(ordinal.features(3, 0), 1.0);

  LoadCsvOptions opts;
  opts.one_hot_categoricals = true;
  const Dataset onehot = load_csv(csv.path(), "label", opts);
  EXPECT_EQ(onehot.n_features(), 4);  // 3 colors + size
  EXPECT_DOUBLE_EQ(onehot.features(0, 2), 1.0);  // red
  EXPECT_DOUBLE_EQ(onehot.features(0, 0), 0.0);
}

TEST(LoadCsv, Errors) {
  EXPECT_THROW(load_csv("/nonexistent/file.csv", "label"), Error);

  TempCsv empty("");
  EXPECT_THROW(load_csv(empty.path(), "label"), Error);

  TempCsv single_class("x,label\n1,a\n2,a\n");
  EXPECT_THROW(load_csv(single_class.path(), "label"), Error);

  TempCsv missing_label("x,y\n1,2\n");
  EXPECT_THROW(load_csv(missing_label.path(), "label"), Error);

  TempCsv nan_cell("x,label\nnan,0\n2,1\n");
  try {
    load_csv(nan_cell.path(), "label");
    FAIL() << "expected error for nan cell";
  } catch (const Error& e) {
    // The message names the offending cell.
    EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("column 1"), std::string::npos);
  }

  TempCsv ragged("x,y,label\n1,2,0\n1,1\n2,3,1\n");
  EXPECT_THROW(load_csv(ragged.path(), "label"), Error);
}

TEST(LoadCsv, OptdigitsShapeWhenAvailable) {
  const char* candidates[] = {"data/optdigits.csv", "../data/optdigits.csv",
                              "../../data/optdigits.csv"};
  std::string found;
  for (const char* c : candidates) {
    if (std::filesystem::exists(c)) found = c;
  }
  if (found.empty()) GTEST_SKIP() << "optdigits.csv not present (fetch-optdigits needs network)";
  LoadCsvOptions opts;
  opts.has_header = false;
  const Dataset d = load_csv(found, "last", opts);
  EXPECT_EQ(d.n_points(), 5620);
  EXPECT_EQ(d.n_features(), 64);
  EXPECT_EQ(d.n_classes, 10);
}

TEST(Standardize, TwoPointColumn) {
  Dataset d;
  d.name = "two";
  d.features.resize(2, 1);
  d.features << 2.0, 4.0;
  d.labels = {0, 1};
  d.n_classes = 2;
  d.feature_kinds = {FeatureKind::kNumeric};
  const auto [scaled, scale] = standardize(d);
  EXPECT_DOUBLE_EQ(scale.mean[0], 3.0);
  EXPECT_DOUBLE_EQ(scale.stddev[0], 1.0);  // population stddev
  EXPECT_DOUBLE_EQ(scaled.features(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(scaled.features(1, 0), 1.0);
}

TEST(Standardize, ConstantColumnFlaggedUnchanged) {
  Dataset d;
  d.features.resize(3, 2);
  d.features << 5.0, 1.0, 5.0, 2.0, 5.0, 3.0;
  d.labels = {0, 1, 0};
  d.n_classes = 2;
  d.feature_kinds = {FeatureKind::kNumeric, FeatureKind::kNumeric};
  const auto [scaled, scale] = standardize(d);
  EXPECT_TRUE(scale.degenerate[0]);
  EXPECT_FALSE(scale.degenerate[1]);
  EXPECT_DOUBLE_EQ(scaled.features(0, 0), 5.0);
  EXPECT_DOUBLE_EQ(scaled.features(2, 0), 5.0);
}

TEST(Standardize, Idempotence) {
  Rng rng(9);
  Dataset d;
  d.features.resize(50, 3);
  for (Eigen::Index i = 0; i < 50; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) d.features(i, j) = rng.normal(2.0, 3.0);
  }
  d.labels.assign(50, 0);
  d.labels[1] = 1;
  d.n_classes = 2;
  d.feature_kinds.assign(3, FeatureKind::kNumeric);
  const auto [once, s1] = standardize(d);
  const auto [twice, s2] = standardize(once);
  EXPECT_LT((twice.features - once.features).cwiseAbs().maxCoeff(), 1e-9);
  for (Eigen::Index j = 0; j < 3; ++j) {
    EXPECT_NEAR(once.features.col(j).mean(), 0.0, 1e-9);
    EXPECT_NEAR(std::sqrt(once.features.col(j).array().square().mean()), 1.0, 1e-9);
  }
}

Dataset make_balanced(int n, int n_classes) {
  Rng rng(17);
  Dataset d;
  d.name = "balanced";
  d.features.resize(n, 2);
  d.labels.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    d.features(i, 0) = rng.normal();
    d.features(i, 1) = rng.normal();
    d.labels[static_cast<std::size_t>(i)] = i % n_classes;
  }
  d.n_classes = n_classes;
  d.feature_kinds.assign(2, FeatureKind::kNumeric);
  return d;
}

TEST(SplitDataset, RatioAndProbeArithmetic) {
  const Dataset d = make_balanced(100, 2);
  const Split s = split_dataset(d, 7);
  EXPECT_EQ(s.train.n_points(), 80);
  EXPECT_EQ(s.test.n_points(), 20);
  EXPECT_EQ(s.probe.size(), 40u);
}

TEST(SplitDataset, DeterministicGivenSeed) {
  const Dataset d = make_balanced(100, 2);
  const Split a = split_dataset(d, 7);
  const Split b = split_dataset(d, 7);
  EXPECT_EQ(a.probe, b.probe);
  EXPECT_TRUE(a.train.features == b.train.features);
  EXPECT_TRUE(a.test.features == b.test.features);

  const Split c = split_dataset(d, 8);
  EXPECT_FALSE(a.train.features == c.train.features);
}

TEST(SplitDataset, SmallClassRejected) {
  Dataset d = make_balanced(10, 2);
  // Rewrite labels so class 1 has only 3 members.
  for (std::size_t i = 0; i < d.labels.size(); ++i) d.labels[i] = i < 3 ? 1 : 0;
  EXPECT_THROW(split_dataset(d, 1), Error);
}

TEST(SplitDataset, StratificationWithinOnePointPerClass) {
  Rng rng(23);
  Dataset d;
  const int n = 473;
  d.features.resize(n, 1);
  d.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    d.features(i, 0) = rng.normal();
    d.labels[static_cast<std::size_t>(i)] = rng.bernoulli(0.3) ? (rng.bernoulli(0.5) ? 1 : 2) : 0;
  }
  d.n_classes = 3;
  d.feature_kinds.assign(1, FeatureKind::kNumeric);

  const Split s = split_dataset(d, 5);
  const auto full_counts = d.class_counts();
  const auto test_counts = s.test.class_counts();
  for (int c = 0; c < 3; ++c) {
    EXPECT_NEAR(test_counts[c], 0.2 * full_counts[c], 1.0) << "class " << c;
  }
}

TEST(SplitDataset, ProbeIsSubsetOfTrainAndDisjointFromTest) {
  const Dataset d = make_balanced(200, 4);
  const Split s = split_dataset(d, 3);
  // Probe indexes rows of the train partition, so it is inside train and
  // disjoint from test by construction; check index validity and distinctness.
  std::set<std::size_t> unique(s.probe.begin(), s.probe.end());
  EXPECT_EQ(unique.size(), s.probe.size());
  for (auto idx : s.probe) EXPECT_LT(idx, static_cast<std::size_t>(s.train.n_points()));
  // Union of partitions restores the source size.
  EXPECT_EQ(s.train.n_points() + s.test.n_points(), d.n_points());
}

TEST(ValidateDataset, CatchesBrokenInvariants) {
  Dataset d = make_balanced(10, 2);
  d.labels[0] = 5;
  EXPECT_THROW(validate_dataset(d), Error);

  Dataset e = make_balanced(10, 2);
  e.features(0, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(validate_dataset(e), Error);
}

}  // namespace
}  // namespace footprint
