#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "adgac/a2.hpp"
#include "adgac/adgac.hpp"
#include "adgac/constants.hpp"
#include "adgac/hypothesis.hpp"

namespace adgac {

/// Homogeneous halfspace sign(w . x) with unit-norm w.
struct Halfspace {
  Eigen::VectorXd w;

  /// Normalises w; throws on a zero or non-finite vector.
  static Halfspace from(const Eigen::VectorXd& w);

  template <typename Derived>
  Label predict(const Eigen::MatrixBase<Derived>& x) const {
    return sign_label(w.dot(x));
  }
};

/// Angle between two non-zero vectors, in [0, pi].
double angle_between(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

/// Per-round parameters of the margin learner. Round k uses b_k, r_k, tau_k, z_k and eps_k; the
/// initial labeling pass uses eps(0), which evaluates the same formulas with b_{-1} = c1' M.
struct MarginSchedule {
  TunableConstants constants;
  double M = 2.0;
  double kappa_prec = 0.125;
  int rounds = 1;

  static MarginSchedule make(double epsilon, const TunableConstants& constants);

  double b(int k) const { return constants.c1_prime * std::pow(M, -k); }
  double r(int k) const { return std::min(std::pow(M, -(k - 1)) / constants.c2, std::acos(-1.0) / 2.0); }
  double tau(int k) const { return constants.c1 * std::min(b(k - 1), 1.0 / 9.0) * kappa_prec / 6.0; }
  double z2(int k) const { return r(k) * r(k) + b(k - 1) * b(k - 1); }
  double eps(int k) const {
    const double t = tau(k);
    return constants.c3 * t * t * b(k) * kappa_prec * kappa_prec / (256.0 * constants.c4 * z2(k));
  }

  /// Fresh unlabeled samples for round k >= 1: margin_n_multiplier * (d / b_k) * ln^3(d k / delta),
  /// plus (1/eps)^(2 kappa - 1) ln(1/delta) under Tsybakov-type noise.
  std::size_t n(int k, int dimension, double epsilon, double delta, const NoiseModel& noise) const;
};

/// l_tau(w, x, y) = max(1 - y (w . x) / tau, 0).
template <typename DW, typename DX>
double hinge_loss(const Eigen::MatrixBase<DW>& w, const Eigen::MatrixBase<DX>& x, Label y, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("hinge_loss: tau must be positive");
  return std::max(1.0 - static_cast<double>(y) * w.dot(x) / tau, 0.0);
}

/// Training set for the hinge objective; one instance per column.
struct HingeData {
  Instances points;
  std::vector<Label> labels;

  std::size_t size() const { return labels.size(); }
};

/// Mean hinge loss over the batch.
double hinge_loss(const Eigen::VectorXd& w, const HingeData& data, double tau);

/// A subgradient of the mean hinge loss (the gradient wherever no margin equals tau exactly).
Eigen::VectorXd hinge_subgradient(const Eigen::VectorXd& w, const HingeData& data, double tau);

/// Mean 0/1 error of sign(w . x) on the batch.
double zero_one_error(const Eigen::VectorXd& w, const HingeData& data);

/// Feasible set B(0, 1) intersected with B(center, radius); a radius of infinity drops the second ball.
struct BallIntersection {
  Eigen::VectorXd center;
  double radius = std::numeric_limits<double>::infinity();

  bool contains(const Eigen::VectorXd& v, double slack = 1e-9) const;
};

/// Euclidean projection onto the intersection by Dykstra's alternating projections.
Eigen::VectorXd project_to_feasible(const Eigen::VectorXd& v, const BallIntersection& region,
                                    int max_alternations = 50, double tol = 1e-10);

struct HingeResult {
  Eigen::VectorXd v;
  double loss = 0.0;
  double gap_bound = 0.0;  // certified bound on loss(v) - min loss, when available
  int iterations = 0;
  bool degraded = false;
};

struct HingeOptions {
  double slack = 1e-3;      // target accuracy in mean-loss units
  int max_newton = 2000;    // total Newton steps across all barrier stages
  int max_subgradient = 20000;
};

/// Barrier interior-point minimiser of the mean hinge loss over the feasible region. The region's
/// center must have unit norm (or the radius must be infinite). The returned point is strictly
/// feasible and its loss is within `gap_bound` of the constrained minimum.
HingeResult minimize_hinge(const HingeData& data, const BallIntersection& region, double tau,
                           const HingeOptions& options = {});

/// Projected subgradient descent with diminishing steps; returns the best iterate seen and flags
/// `degraded` when the final window brought no improvement. Used as an independent cross-check.
HingeResult minimize_hinge_subgradient(const HingeData& data, const BallIntersection& region,
                                       double tau, const HingeOptions& options = {});

/// |w . x| <= b, boundary inclusive.
template <typename DX>
bool band_membership(const Eigen::VectorXd& w, const Eigen::MatrixBase<DX>& x, double b) {
  return std::abs(w.dot(x)) <= b;
}

struct MarginRoundTrace {
  int round = 0;
  double b = 0.0;
  double r = 0.0;
  double tau = 0.0;
  double z2 = 0.0;
  double eps = 0.0;
  std::size_t n = 0;
  std::size_t subset = 0;
  double loss = 0.0;
  std::uint64_t labels = 0;
  std::uint64_t comparisons = 0;
};

struct MarginResult {
  Eigen::VectorXd w;
  Eigen::VectorXd w0;
  std::vector<MarginRoundTrace> trace;
  QueryCounters queries;
  int rounds = 0;
  std::vector<std::string> flags;
};

struct MarginParams {
  RunParams run;
  std::size_t seed_labels = 32;
  HingeOptions hinge;
};

/// Initial direction from `count` oracle-direct labels: the tau = 1 hinge minimiser over the unit
/// ball, normalised.
template <QueryOracle O>
Eigen::VectorXd seed_direction(const ScenarioSpec& spec, std::size_t count, O& oracle, Rng& rng) {
  HingeData data;
  data.points = sample_unlabeled(spec, count, rng);
  data.labels.resize(count);
  for (std::size_t i = 0; i < count; ++i) data.labels[i] = oracle.label(data.points.col(static_cast<Eigen::Index>(i)));
  BallIntersection region{Eigen::VectorXd::Zero(spec.dimension), std::numeric_limits<double>::infinity()};
  const auto fit = minimize_hinge(data, region, 1.0, HingeOptions{1e-6});
  if (fit.v.norm() < 1e-12) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(spec.dimension);
    e(0) = 1.0;
    return e;
  }
  return fit.v.normalized();
}

/// Margin-based learner: label a full sample, then alternate constrained hinge minimisation with
/// relabelling of a fresh sample restricted to the band around the current direction.
/// When `w0` is empty a seed direction is fitted from params.seed_labels direct labels.
template <QueryOracle O>
MarginResult run_margin_adgac(const ScenarioSpec& spec, const MarginParams& params, O& oracle,
                              Rng& rng, std::optional<Eigen::VectorXd> w0 = std::nullopt) {
  params.run.validate();
  if (spec.dist != DistKind::IsotropicGaussian) {
    throw std::invalid_argument("margin learner requires an isotropic-gaussian scenario");
  }
  const double epsilon = params.run.epsilon;
  const double delta = params.run.delta;
  const NoiseModel noise = noise_model_of(spec);
  const MarginSchedule schedule = MarginSchedule::make(epsilon, params.run.constants);
  const double delta_k = per_round_delta(epsilon, delta, 8.0);
  const auto batch = [&](double eps_k) { return label_batch(eps_k, delta_k, noise, params.run.constants); };

  MarginResult out;
  const QueryCounters before = oracle.counters();
  out.w0 = w0 ? Halfspace::from(*w0).w : seed_direction(spec, params.seed_labels, oracle, rng);
  if (angle_between(out.w0, spec.truth.weights) > std::acos(-1.0) / 2.0) out.flags.emplace_back("w0_angle");

  const auto label_with_adgac = [&](const Instances& subset, std::size_t n, double eps_k) {
    auto labeled = adgac(subset, n, eps_k, batch(eps_k), oracle, rng);
    return HingeData{subset, std::move(labeled.labels)};
  };

  const std::size_t n1 = schedule.n(1, spec.dimension, epsilon, delta, noise);
  HingeData w_data = label_with_adgac(sample_unlabeled(spec, n1, rng), n1, schedule.eps(0));
  Eigen::VectorXd w = out.w0;
  for (int k = 1; k <= schedule.rounds; ++k) {
    MarginRoundTrace row;
    row.round = k;
    row.b = schedule.b(k);
    row.r = schedule.r(k);
    row.tau = schedule.tau(k);
    row.z2 = schedule.z2(k);
    row.eps = schedule.eps(k);
    const QueryCounters at_start = oracle.counters();

    const BallIntersection region{w, row.r};
    const auto fit = minimize_hinge(w_data, region, row.tau,
                                    HingeOptions{schedule.kappa_prec / 8.0, params.hinge.max_newton,
                                                 params.hinge.max_subgradient});
    if (fit.degraded) out.flags.emplace_back("hinge_degraded");
    row.loss = fit.loss;
    w = Halfspace::from(fit.v).w;

    row.n = schedule.n(k, spec.dimension, epsilon, delta, noise);
    const Instances fresh = sample_unlabeled(spec, row.n, rng);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < fresh.cols(); ++j) {
      if (band_membership(w, fresh.col(j), row.b)) keep.push_back(j);
    }
    if (keep.empty()) {
      throw std::runtime_error("margin round " + std::to_string(k) +
                               ": band sample is empty; increase margin_n_multiplier");
    }
    row.subset = keep.size();
    Instances subset(fresh.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) subset.col(static_cast<Eigen::Index>(c)) = fresh.col(keep[c]);
    w_data = label_with_adgac(subset, row.n, row.eps);

    row.labels = oracle.counters().labels - at_start.labels;
    row.comparisons = oracle.counters().comparisons - at_start.comparisons;
    out.trace.push_back(row);
    out.rounds = k;
    out.queries.labels = oracle.counters().labels - before.labels;
    out.queries.comparisons = oracle.counters().comparisons - before.comparisons;
    detail::check_budget(out.queries, params.run);
  }
  out.w = w;
  out.queries.labels = oracle.counters().labels - before.labels;
  out.queries.comparisons = oracle.counters().comparisons - before.comparisons;
  return out;
}

}  // namespace adgac
