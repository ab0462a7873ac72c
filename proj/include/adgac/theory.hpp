#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "adgac/scenario.hpp"

namespace adgac {

// ---------------------------------------------------------------------------------------------
// Combinatorial inequality: for non-negative x, y with sum_i sum_{j>=i} x_i y_j <= t,
// min_k f(k) <= sqrt(2 n t / (n + 1)) where f(k) = x_1 + ... + x_k + y_{k+1} + ... + y_n.

struct LemmaInstance {
  std::vector<double> x;
  std::vector<double> y;
  double t = 0.0;
};

struct LemmaResult {
  double min_f = 0.0;
  std::size_t argmin = 0;
  double bound = 0.0;
  bool holds = false;  // min_f <= bound + 1e-9
};

/// sum_i sum_{j>=i} x_i y_j.
double lemma_constraint_value(const std::vector<double>& x, const std::vector<double>& y);

/// Exact scan of f(0..n). Throws on negative entries, length mismatch or a violated constraint.
LemmaResult lemma_min_f(const LemmaInstance& instance);

/// x_i = y_i = sqrt(2t / (n (n + 1))), where the bound is attained.
LemmaInstance lemma_equality_instance(std::size_t n, double t);

// ---------------------------------------------------------------------------------------------
// Worst-case comparison oracles for threshold learning.

/// One-dimensional base score with h*(s) = sign(s - cut).
struct BaseScore {
  DistKind kind = DistKind::UniformInterval;  // uniform(0, 1) or standard normal
  double cut = 0.5;

  double cdf(double s) const;
  double quantile(double u) const;
  /// Pr[h* = +1] and Pr[h* = -1].
  double positive_mass() const { return 1.0 - cdf(cut); }
  double negative_mass() const { return cdf(cut); }
};

/// Order-scrambling map that maximises threshold error at comparison error nu':
/// on [a, cut] and (cut, b] the score is replaced by its within-side cdf rank stretched over [a, b],
/// so both sides interleave; outside [a, b] it is the identity. F(cut) - F(a) = F(b) - F(cut) = sqrt(nu').
struct GhatConstruction {
  BaseScore base;
  double nu_prime = 0.0;
  double a = 0.0;
  double b = 0.0;

  double operator()(double s) const;
};

/// Throws std::invalid_argument when min(Pr[h* = 1], Pr[h* = -1]) < sqrt(nu') or nu' < 0.
GhatConstruction construct_ghat(const BaseScore& base, double nu_prime);

/// Scores on the equal-mass quantile grid u_i = (i + 1/2) / n, with their h* labels.
struct QuantileGrid {
  std::vector<double> score;
  std::vector<Label> truth;
};

QuantileGrid quantile_grid(const BaseScore& base, std::size_t n);

/// 2 * fraction of ordered pairs (i, j) with ghat_i > ghat_j, h*_i = -1, h*_j = +1, on equal-weight points.
double comparison_error(const std::vector<double>& ghat, const std::vector<Label>& truth);

struct ThresholdScan {
  double min_error = 1.0;
  double argmin_t = 0.0;
};

/// Best sign(ghat - t) over every realisable cut between consecutive sorted ghat values.
ThresholdScan best_threshold(const std::vector<double>& ghat, const std::vector<Label>& truth);

/// Grid-quadrature comparison error of a score map.
double comparison_error_of(const std::function<double(double)>& ghat, const BaseScore& base, std::size_t n);

/// Grid-quadrature minimum threshold error of a score map.
ThresholdScan best_threshold_error(const std::function<double(double)>& ghat, const BaseScore& base,
                                   std::size_t n);

}  // namespace adgac
