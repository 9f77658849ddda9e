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
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "footprint/common.hpp"
#include "footprint/rng.hpp"

namespace footprint {

// Random-hyperplane codec: bit j of a point is 1 iff the point lies on the
// non-negative side of plane j. Planes are fitted on the training partition
// only; by default each plane passes through a uniformly sampled training
// point so the codes stay informative on non-centered data. Boundary points
// encode 1.
struct LshCodec {
  Matrix hyperplanes;  // n_planes x (n_features + 1): normal then offset
  std::uint64_t seed = 0;

  Eigen::Index n_planes() const { return hyperplanes.rows(); }
  Eigen::Index n_features() const { return hyperplanes.cols() - 1; }
};

inline LshCodec fit_lsh(const Matrix& train_features, int n_planes, std::uint64_t seed,
                        bool origin_anchored = false) {
  if (train_features.rows() == 0) throw Error("fit_lsh: empty training matrix");
  if (n_planes < 1) throw Error("fit_lsh: n_planes must be >= 1");
  const Eigen::Index d = train_features.cols();

  LshCodec codec;
  codec.seed = seed;
  codec.hyperplanes.resize(n_planes, d + 1);
  Rng rng = Rng(seed).split("lsh");
  for (int p = 0; p < n_planes; ++p) {
    double norm_sq = 0.0;
    do {
      for (Eigen::Index j = 0; j < d; ++j) {
        const double v = rng.normal();
        codec.hyperplanes(p, j) = v;
        norm_sq += v * v;
      }
    } while (norm_sq == 0.0);
    if (origin_anchored) {
      codec.hyperplanes(p, d) = 0.0;
    } else {
      const auto anchor = static_cast<Eigen::Index>(
          rng.below(static_cast<std::uint64_t>(train_features.rows())));
      codec.hyperplanes(p, d) =
          -codec.hyperplanes.row(p).head(d).dot(train_features.row(anchor));
    }
  }
  return codec;
}

inline Matrix encode_lsh(const LshCodec& codec, const Matrix& features) {
  if (features.cols() != codec.n_features()) {
    throw Error("encode_lsh: feature count mismatch (" + std::to_string(features.cols()) +
                " vs " + std::to_string(codec.n_features()) + ")");
  }
  const Eigen::Index d = codec.n_features();
  Matrix bits(features.rows(), codec.n_planes());
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    for (Eigen::Index p = 0; p < codec.n_planes(); ++p) {
      const double side = codec.hyperplanes.row(p).head(d).dot(features.row(i)) +
                          codec.hyperplanes(p, d);
      bits(i, p) = side >= 0.0 ? 1.0 : 0.0;
    }
  }
  return bits;
}

// Mean-threshold binarizer: bit = 1 iff the value matches or exceeds the
// per-feature mean of the training partition.
struct HammingCodec {
  Vector means;

  Eigen::Index n_features() const { return means.size(); }
};

inline HammingCodec fit_hamming(const Matrix& train_features) {
  if (train_features.rows() == 0) throw Error("fit_hamming: empty training matrix");
  HammingCodec codec;
  codec.means = train_features.colwise().mean();
  return codec;
}

inline Matrix encode_hamming(const HammingCodec& codec, const Matrix& features) {
  if (features.cols() != codec.n_features()) {
    throw Error("encode_hamming: feature count mismatch (" + std::to_string(features.cols()) +
                " vs " + std::to_string(codec.n_features()) + ")");
  }
  Matrix bits(features.rows(), features.cols());
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    for (Eigen::Index j = 0; j < features.cols(); ++j) {
      bits(i, j) = features(i, j) >= codec.means[j] ? 1.0 : 0.0;
    }
  }
  return bits;
}

// JSON round-trips so an audit is replayable bit-exactly.

inline nlohmann::json lsh_to_json(const LshCodec& c) {
  nlohmann::json planes = nlohmann::json::array();
  for (Eigen::Index p = 0; p < c.hyperplanes.rows(); ++p) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < c.hyperplanes.cols(); ++j) row.push_back(c.hyperplanes(p, j));
    planes.push_back(row);
  }
  return {{"type", "lsh"}, {"hyperplanes", planes}, {"seed", c.seed}};
}

inline LshCodec lsh_from_json(const nlohmann::json& j) {
  if (j.at("type") != "lsh") throw Error("lsh_from_json: wrong codec type");
  const auto& planes = j.at("hyperplanes");
  if (planes.empty()) throw Error("lsh_from_json: no hyperplanes");
  LshCodec c;
  c.seed = j.value("seed", std::uint64_t{0});
  c.hyperplanes.resize(static_cast<Eigen::Index>(planes.size()),
                       static_cast<Eigen::Index>(planes[0].size()));
  for (std::size_t p = 0; p < planes.size(); ++p) {
    for (std::size_t col = 0; col < planes[p].size(); ++col) {
      c.hyperplanes(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(col)) =
          planes[p][col].get<double>();
    }
  }
  return c;
}

inline nlohmann::json hamming_to_json(const HammingCodec& c) {
  nlohmann::json means = nlohmann::json::array();
  for (Eigen::Index j = 0; j < c.means.size(); ++j) means.push_back(c.means[j]);
  return {{"type", "hamming"}, {"means", means}};
}

inline HammingCodec hamming_from_json(const nlohmann::json& j) {
  if (j.at("type") != "hamming") throw Error("hamming_from_json: wrong codec type");
  HammingCodec c;
  const auto& means = j.at("means");
  c.means.resize(static_cast<Eigen::Index>(means.size()));
  for (std::size_t k = 0; k < means.size(); ++k) c.means[static_cast<Eigen::Index>(k)] = means[k].get<double>();
  return c;
}

}  // namespace footprint
