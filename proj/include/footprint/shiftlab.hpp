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

#include <nlohmann/json.hpp>

#include "footprint/common.hpp"
#include "footprint/rng.hpp"

namespace footprint::shiftlab {

// Finite joint distribution over (domain point, class). Everything the
// train/test risk-gap decompositions need is derived from the joint table.
struct DiscreteJoint {
  std::vector<std::vector<double>> domain;  // coordinates of each domain point
  int n_classes = 0;
  Matrix joint;                              // n_points x n_classes, sums to 1

  Eigen::Index n_points() const { return joint.rows(); }

  double p_x(Eigen::Index x) const { return joint.row(x).sum(); }
  double p_y(int y) const { return joint.col(y).sum(); }
  double cond_x_given_y(Eigen::Index x, int y) const { return joint(x, y) / p_y(y); }
  double cond_y_given_x(int y, Eigen::Index x) const { return joint(x, y) / p_x(x); }
};

inline void validate_joint(const DiscreteJoint& p) {
  if (p.joint.rows() < 1 || p.n_classes < 2) throw Error("DiscreteJoint: degenerate shape");
  if (p.joint.cols() != p.n_classes) throw Error("DiscreteJoint: class column mismatch");
  if (p.domain.size() != static_cast<std::size_t>(p.joint.rows())) {
    throw Error("DiscreteJoint: domain/table row mismatch");
  }
  if ((p.joint.array() < 0.0).any()) throw Error("DiscreteJoint: negative mass");
  if (std::abs(p.joint.sum() - 1.0) > 1e-12) throw Error("DiscreteJoint: mass does not sum to 1");
}

inline DiscreteJoint joint_from_prior_and_conditional(std::vector<std::vector<double>> domain,
                                                      const std::vector<double>& priors,
                                                      const Matrix& cond_x_given_y) {
  DiscreteJoint p;
  p.domain = std::move(domain);
  p.n_classes = static_cast<int>(priors.size());
  p.joint.resize(cond_x_given_y.rows(), p.n_classes);
  for (int y = 0; y < p.n_classes; ++y) {
    p.joint.col(y) = priors[static_cast<std::size_t>(y)] * cond_x_given_y.col(y);
  }
  return p;
}

inline DiscreteJoint joint_from_marginal_and_posterior(std::vector<std::vector<double>> domain,
                                                       const std::vector<double>& marginal_x,
                                                       const Matrix& cond_y_given_x) {
  DiscreteJoint p;
  p.domain = std::move(domain);
  p.n_classes = static_cast<int>(cond_y_given_x.cols());
  p.joint.resize(cond_y_given_x.rows(), p.n_classes);
  for (Eigen::Index x = 0; x < p.joint.rows(); ++x) {
    p.joint.row(x) = marginal_x[static_cast<std::size_t>(x)] * cond_y_given_x.row(x);
  }
  return p;
}

// Nonnegative pointwise loss over (predicted, true) label pairs.
struct LossTable {
  Matrix cost;  // n_classes x n_classes

  static LossTable zero_one(int n_classes) {
    LossTable l;
    l.cost = Matrix::Ones(n_classes, n_classes) - Matrix::Identity(n_classes, n_classes);
    return l;
  }

  static LossTable constant(int n_classes, double c) {
    LossTable l;
    l.cost = Matrix::Constant(n_classes, n_classes, c);
    return l;
  }

  double operator()(int predicted, int truth) const { return cost(predicted, truth); }
};

inline void validate_loss(const LossTable& l) {
  if ((l.cost.array() < 0.0).any() || !l.cost.allFinite()) {
    throw Error("LossTable: entries must be finite and nonnegative");
  }
}

// A deterministic classifier over the finite domain: label per domain point.
using TabularClassifier = std::vector<int>;

inline void check_classifier(const TabularClassifier& f, const DiscreteJoint& p) {
  if (f.size() != static_cast<std::size_t>(p.n_points())) {
    throw Error("classifier undefined on part of the domain");
  }
  for (int label : f) {
    if (label < 0 || label >= p.n_classes) throw Error("classifier label out of range");
  }
}

// Expected risk sum_{x,y} loss(f(x), y) P(x, y).
inline double exact_risk(const TabularClassifier& f, const DiscreteJoint& p, const LossTable& loss) {
  check_classifier(f, p);
  double risk = 0.0;
  for (Eigen::Index x = 0; x < p.n_points(); ++x) {
    for (int y = 0; y < p.n_classes; ++y) {
      risk += loss(f[static_cast<std::size_t>(x)], y) * p.joint(x, y);
    }
  }
  return risk;
}

// A draw of (domain index, label) pairs from a joint.
struct EmpiricalSample {
  std::vector<int> xs;
  Labels ys;
};

inline EmpiricalSample sample_joint(const DiscreteJoint& p, std::size_t n, Rng& rng) {
  std::vector<double> cell_mass;
  cell_mass.reserve(static_cast<std::size_t>(p.n_points()) * p.n_classes);
  for (Eigen::Index x = 0; x < p.n_points(); ++x) {
    for (int y = 0; y < p.n_classes; ++y) cell_mass.push_back(p.joint(x, y));
  }
  EmpiricalSample s;
  s.xs.reserve(n);
  s.ys.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int cell = rng.categorical(cell_mass);
    s.xs.push_back(cell / p.n_classes);
    s.ys.push_back(cell % p.n_classes);
  }
  return s;
}

// Mean pointwise loss over a sample; converges to exact_risk as n grows.
inline double empirical_risk(const TabularClassifier& f, const EmpiricalSample& sample,
                             const LossTable& loss) {
  if (sample.xs.empty()) throw Error("empirical_risk: empty sample");
  double total = 0.0;
  for (std::size_t i = 0; i < sample.xs.size(); ++i) {
    total += loss(f[static_cast<std::size_t>(sample.xs[i])], sample.ys[i]);
  }
  return total / static_cast<double>(sample.xs.size());
}

namespace detail {

inline void require_shared_conditional_x_given_y(const DiscreteJoint& a, const DiscreteJoint& b) {
  for (Eigen::Index x = 0; x < a.n_points(); ++x) {
    for (int y = 0; y < a.n_classes; ++y) {
      if (std::abs(a.cond_x_given_y(x, y) - b.cond_x_given_y(x, y)) > 1e-9) {
        throw Error("gap_prior: P(x|y) differs between the two joints");
      }
    }
  }
}

inline void require_shared_posterior(const DiscreteJoint& a, const DiscreteJoint& b) {
  for (Eigen::Index x = 0; x < a.n_points(); ++x) {
    for (int y = 0; y < a.n_classes; ++y) {
      if (std::abs(a.cond_y_given_x(y, x) - b.cond_y_given_x(y, x)) > 1e-9) {
        throw Error("gap_covariate: P(y|x) differs between the two joints");
      }
    }
  }
}

inline void require_shared_marginal(const DiscreteJoint& a, const DiscreteJoint& b) {
  for (Eigen::Index x = 0; x < a.n_points(); ++x) {
    if (std::abs(a.p_x(x) - b.p_x(x)) > 1e-9) {
      throw Error("gap_concept: P(x) differs between the two joints");
    }
  }
}

}  // namespace detail

// Prior-shift decomposition of the risk gap:
// sum_y [P_test(y) - P_train(y)] * sum_x loss(f(x), y) P(x|y).
inline double gap_prior(const TabularClassifier& f, const DiscreteJoint& p_train,
                        const DiscreteJoint& p_test, const LossTable& loss) {
  check_classifier(f, p_train);
  detail::require_shared_conditional_x_given_y(p_train, p_test);
  double gap = 0.0;
  for (int y = 0; y < p_train.n_classes; ++y) {
    double class_loss = 0.0;
    for (Eigen::Index x = 0; x < p_train.n_points(); ++x) {
      class_loss += loss(f[static_cast<std::size_t>(x)], y) * p_train.cond_x_given_y(x, y);
    }
    gap += (p_test.p_y(y) - p_train.p_y(y)) * class_loss;
  }
  return gap;
}

// Covariate-shift decomposition:
// sum_x [P_test(x) - P_train(x)] * sum_y loss(f(x), y) P(y|x).
inline double gap_covariate(const TabularClassifier& f, const DiscreteJoint& p_train,
                            const DiscreteJoint& p_test, const LossTable& loss) {
  check_classifier(f, p_train);
  detail::require_shared_posterior(p_train, p_test);
  double gap = 0.0;
  for (Eigen::Index x = 0; x < p_train.n_points(); ++x) {
    double weighted_loss = 0.0;
    for (int y = 0; y < p_train.n_classes; ++y) {
      weighted_loss += loss(f[static_cast<std::size_t>(x)], y) * p_train.cond_y_given_x(y, x);
    }
    gap += (p_test.p_x(x) - p_train.p_x(x)) * weighted_loss;
  }
  return gap;
}

// Concept-shift decomposition:
// sum_x P(x) * sum_y loss(f(x), y) [P_test(y|x) - P_train(y|x)].
inline double gap_concept(const TabularClassifier& f, const DiscreteJoint& p_train,
                          const DiscreteJoint& p_test, const LossTable& loss) {
  check_classifier(f, p_train);
  detail::require_shared_marginal(p_train, p_test);
  double gap = 0.0;
  for (Eigen::Index x = 0; x < p_train.n_points(); ++x) {
    double bracket = 0.0;
    for (int y = 0; y < p_train.n_classes; ++y) {
      bracket += loss(f[static_cast<std::size_t>(x)], y) *
                 (p_test.cond_y_given_x(y, x) - p_train.cond_y_given_x(y, x));
    }
    gap += p_train.p_x(x) * bracket;
  }
  return gap;
}

struct RiskReport {
  double r_train = 0.0;
  double r_test = 0.0;
  double gap = 0.0;  // r_test - r_train
  std::string decomposition_kind;  // prior | covariate | concept | general
};

inline RiskReport risk_report(const TabularClassifier& f, const DiscreteJoint& p_train,
                              const DiscreteJoint& p_test, const LossTable& loss,
                              std::string kind = "general") {
  RiskReport r;
  r.r_train = exact_risk(f, p_train, loss);
  r.r_test = exact_risk(f, p_test, loss);
  r.gap = r.r_test - r.r_train;
  r.decomposition_kind = std::move(kind);
  return r;
}

// One shift instance: a pair of joints sharing the structure the
// decomposition requires, plus classifier and loss.
struct ShiftInstance {
  std::string kind;  // prior | covariate | concept
  DiscreteJoint p_train;
  DiscreteJoint p_test;
  LossTable loss;
  TabularClassifier classifier;
};

namespace detail {

inline std::vector<double> random_simplex(Rng& rng, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  double total = 0.0;
  for (auto& x : v) {
    x = -std::log(1.0 - rng.uniform());
    total += x;
  }
  for (auto& x : v) x /= total;
  return v;
}

inline std::vector<std::vector<double>> random_domain(Rng& rng, int n_points) {
  std::vector<std::vector<double>> domain(static_cast<std::size_t>(n_points));
  for (auto& pt : domain) {
    pt = {rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
  }
  return domain;
}

inline LossTable random_loss(Rng& rng, int n_classes) {
  LossTable l;
  l.cost.resize(n_classes, n_classes);
  for (Eigen::Index a = 0; a < n_classes; ++a) {
    for (Eigen::Index b = 0; b < n_classes; ++b) l.cost(a, b) = rng.uniform(0.0, 2.0);
  }
  return l;
}

inline TabularClassifier random_classifier(Rng& rng, int n_points, int n_classes) {
  TabularClassifier f(static_cast<std::size_t>(n_points));
  for (auto& label : f) label = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_classes)));
  return f;
}

}  // namespace detail

// Draws one random instance of the requested shift kind with generic loss and
// classifier. Domain size 2-6, classes 2-4.
inline ShiftInstance random_instance(const std::string& kind, Rng& rng) {
  const int n_points = 2 + static_cast<int>(rng.below(5));
  const int n_classes = 2 + static_cast<int>(rng.below(3));
  auto domain = detail::random_domain(rng, n_points);

  ShiftInstance inst;
  inst.kind = kind;
  inst.loss = detail::random_loss(rng, n_classes);
  inst.classifier = detail::random_classifier(rng, n_points, n_classes);

  if (kind == "prior") {
    Matrix cond(n_points, n_classes);
    for (int y = 0; y < n_classes; ++y) {
      auto col = detail::random_simplex(rng, n_points);
      for (int x = 0; x < n_points; ++x) cond(x, y) = col[static_cast<std::size_t>(x)];
    }
    inst.p_train = joint_from_prior_and_conditional(domain, detail::random_simplex(rng, n_classes), cond);
    inst.p_test = joint_from_prior_and_conditional(domain, detail::random_simplex(rng, n_classes), cond);
  } else if (kind == "covariate") {
    Matrix posterior(n_points, n_classes);
    for (int x = 0; x < n_points; ++x) {
      auto row = detail::random_simplex(rng, n_classes);
      for (int y = 0; y < n_classes; ++y) posterior(x, y) = row[static_cast<std::size_t>(y)];
    }
    inst.p_train = joint_from_marginal_and_posterior(domain, detail::random_simplex(rng, n_points), posterior);
    inst.p_test = joint_from_marginal_and_posterior(domain, detail::random_simplex(rng, n_points), posterior);
  } else if (kind == "concept") {
    auto marginal = detail::random_simplex(rng, n_points);
    Matrix post_train(n_points, n_classes), post_test(n_points, n_classes);
    for (int x = 0; x < n_points; ++x) {
      auto a = detail::random_simplex(rng, n_classes);
      auto b = detail::random_simplex(rng, n_classes);
      for (int y = 0; y < n_classes; ++y) {
        post_train(x, y) = a[static_cast<std::size_t>(y)];
        post_test(x, y) = b[static_cast<std::size_t>(y)];
      }
    }
    inst.p_train = joint_from_marginal_and_posterior(domain, marginal, post_train);
    inst.p_test = joint_from_marginal_and_posterior(domain, marginal, post_test);
  } else {
    throw Error("random_instance: unknown kind " + kind);
  }
  return inst;
}

inline double analytic_gap(const ShiftInstance& inst) {
  if (inst.kind == "prior") return gap_prior(inst.classifier, inst.p_train, inst.p_test, inst.loss);
  if (inst.kind == "covariate") return gap_covariate(inst.classifier, inst.p_train, inst.p_test, inst.loss);
  if (inst.kind == "concept") return gap_concept(inst.classifier, inst.p_train, inst.p_test, inst.loss);
  throw Error("analytic_gap: unknown kind " + inst.kind);
}

// Degenerate constructions where the decomposition collapses to exactly zero.
// All masses are dyadic so the cancellation is exact in floating point.
inline ShiftInstance degenerate_instance(const std::string& kind) {
  ShiftInstance inst;
  inst.kind = kind;
  std::vector<std::vector<double>> domain = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  const std::vector<double> base = {0.25, 0.75};
  const std::vector<double> shifted = {0.5, 0.5};

  if (kind == "prior") {
    // Constant loss: the per-class loss term no longer depends on y.
    Matrix cond(3, 2);
    cond << 0.5, 0.25, 0.25, 0.5, 0.25, 0.25;
    inst.loss = LossTable::constant(2, 1.5);
    inst.classifier = {0, 1, 0};
    inst.p_train = joint_from_prior_and_conditional(domain, base, cond);
    inst.p_test = joint_from_prior_and_conditional(domain, shifted, cond);
  } else if (kind == "covariate") {
    // Uniform posterior with 0-1 loss: the weighted loss is 0.5 everywhere.
    Matrix posterior(3, 2);
    posterior << 0.5, 0.5, 0.5, 0.5, 0.5, 0.5;
    inst.loss = LossTable::zero_one(2);
    inst.classifier = {1, 0, 1};
    inst.p_train = joint_from_marginal_and_posterior(domain, {0.25, 0.25, 0.5}, posterior);
    inst.p_test = joint_from_marginal_and_posterior(domain, {0.5, 0.25, 0.25}, posterior);
  } else if (kind == "concept") {
    // Constant loss: each bracket sums the difference of two unit rows.
    const std::vector<double> marginal = {0.5, 0.25, 0.25};
    Matrix post_train(3, 2), post_test(3, 2);
    post_train << 0.25, 0.75, 0.5, 0.5, 0.75, 0.25;
    post_test << 0.5, 0.5, 0.25, 0.75, 0.5, 0.5;
    inst.loss = LossTable::constant(2, 2.0);
    inst.classifier = {0, 0, 1};
    inst.p_train = joint_from_marginal_and_posterior(domain, marginal, post_train);
    inst.p_test = joint_from_marginal_and_posterior(domain, marginal, post_test);
  } else {
    throw Error("degenerate_instance: unknown kind " + kind);
  }
  return inst;
}

struct Prop1CaseReport {
  std::string kind;
  int trials = 0;
  int matches = 0;          // analytic gap equals direct risk difference
  int nonzero_gaps = 0;     // |gap| > 0 among non-degenerate trials
  int degenerate = 0;       // trials whose weighted-loss spread fell below 1e-6
  double worst_residual = 0.0;
  double degenerate_construction_gap = 0.0;  // must be exactly zero
  int overfit_direction = 0;  // trials with r_test >= r_train (reported, not asserted)
};

struct Prop1Report {
  std::vector<Prop1CaseReport> cases;
  double worst_residual = 0.0;
  bool all_matched = true;
};

namespace detail {

// Spread of the weighted-loss profile the decomposition multiplies against.
// Below 1e-6 the instance counts as degenerate and a zero gap is expected.
inline double loss_profile_spread(const ShiftInstance& inst) {
  std::vector<double> profile;
  if (inst.kind == "prior") {
    for (int y = 0; y < inst.p_train.n_classes; ++y) {
      double v = 0.0;
      for (Eigen::Index x = 0; x < inst.p_train.n_points(); ++x) {
        v += inst.loss(inst.classifier[static_cast<std::size_t>(x)], y) *
             inst.p_train.cond_x_given_y(x, y);
      }
      profile.push_back(v);
    }
  } else {
    for (Eigen::Index x = 0; x < inst.p_train.n_points(); ++x) {
      double v = 0.0;
      for (int y = 0; y < inst.p_train.n_classes; ++y) {
        v += inst.loss(inst.classifier[static_cast<std::size_t>(x)], y) *
             inst.p_train.cond_y_given_x(y, x);
      }
      profile.push_back(v);
    }
  }
  const auto [lo, hi] = std::minmax_element(profile.begin(), profile.end());
  return *hi - *lo;
}

}  // namespace detail

// Checks that each analytic decomposition reproduces the direct risk
// difference on randomly generated instances, that non-degenerate instances
// have a strictly nonzero gap, and that the constructed degenerate instances
// collapse to a gap of exactly zero.
inline Prop1Report verify_prop1(int trials, std::uint64_t seed, double residual_tol = 1e-10) {
  if (trials < 1) throw Error("verify_prop1: trials must be >= 1");
  Prop1Report report;
  for (const std::string kind : {"prior", "covariate", "concept"}) {
    Prop1CaseReport c;
    c.kind = kind;
    c.trials = trials;
    Rng rng = Rng(seed).split(kind);
    for (int t = 0; t < trials; ++t) {
      Rng trial_rng = rng.split(static_cast<std::uint64_t>(t));
      const ShiftInstance inst = random_instance(kind, trial_rng);
      const double analytic = analytic_gap(inst);
      const double direct = exact_risk(inst.classifier, inst.p_test, inst.loss) -
                            exact_risk(inst.classifier, inst.p_train, inst.loss);
      const double residual = std::abs(analytic - direct);
      c.worst_residual = std::max(c.worst_residual, residual);
      if (residual <= residual_tol) c.matches++;
      if (detail::loss_profile_spread(inst) > 1e-6) {
        if (std::abs(analytic) > 0.0) c.nonzero_gaps++;
      } else {
        c.degenerate++;
      }
      if (direct >= 0.0) c.overfit_direction++;
    }
    const ShiftInstance degen = degenerate_instance(kind);
    c.degenerate_construction_gap = analytic_gap(degen);
    report.worst_residual = std::max(report.worst_residual, c.worst_residual);
    if (c.matches != c.trials) report.all_matched = false;
    report.cases.push_back(std::move(c));
  }
  return report;
}

// Instance files hold everything needed to replay a counterexample.

inline nlohmann::json joint_to_json(const DiscreteJoint& p) {
  nlohmann::json domain = nlohmann::json::array();
  for (const auto& pt : p.domain) domain.push_back(pt);
  nlohmann::json table = nlohmann::json::array();
  for (Eigen::Index x = 0; x < p.n_points(); ++x) {
    nlohmann::json row = nlohmann::json::array();
    for (int y = 0; y < p.n_classes; ++y) row.push_back(p.joint(x, y));
    table.push_back(row);
  }
  return {{"domain", domain}, {"n_classes", p.n_classes}, {"joint", table}};
}

inline DiscreteJoint joint_from_json(const nlohmann::json& j) {
  DiscreteJoint p;
  for (const auto& pt : j.at("domain")) p.domain.push_back(pt.get<std::vector<double>>());
  p.n_classes = j.at("n_classes").get<int>();
  const auto& table = j.at("joint");
  p.joint.resize(static_cast<Eigen::Index>(table.size()), p.n_classes);
  for (std::size_t x = 0; x < table.size(); ++x) {
    for (int y = 0; y < p.n_classes; ++y) {
      p.joint(static_cast<Eigen::Index>(x), y) = table[x][static_cast<std::size_t>(y)].get<double>();
    }
  }
  validate_joint(p);
  return p;
}

inline nlohmann::json instance_to_json(const ShiftInstance& inst) {
  nlohmann::json loss = nlohmann::json::array();
  for (Eigen::Index a = 0; a < inst.loss.cost.rows(); ++a) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index b = 0; b < inst.loss.cost.cols(); ++b) row.push_back(inst.loss.cost(a, b));
    loss.push_back(row);
  }
  return {{"kind", inst.kind},
          {"train", joint_to_json(inst.p_train)},
          {"test", joint_to_json(inst.p_test)},
          {"loss", loss},
          {"classifier", inst.classifier}};
}

inline ShiftInstance instance_from_json(const nlohmann::json& j) {
  ShiftInstance inst;
  inst.kind = j.at("kind").get<std::string>();
  inst.p_train = joint_from_json(j.at("train"));
  inst.p_test = joint_from_json(j.at("test"));
  const auto& loss = j.at("loss");
  inst.loss.cost.resize(static_cast<Eigen::Index>(loss.size()),
                        static_cast<Eigen::Index>(loss.size()));
  for (std::size_t a = 0; a < loss.size(); ++a) {
    for (std::size_t b = 0; b < loss[a].size(); ++b) {
      inst.loss.cost(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
          loss[a][b].get<double>();
    }
  }
  inst.classifier = j.at("classifier").get<std::vector<int>>();
  validate_loss(inst.loss);
  check_classifier(inst.classifier, inst.p_train);
  return inst;
}

}  // namespace footprint::shiftlab
