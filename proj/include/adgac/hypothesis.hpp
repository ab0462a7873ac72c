#pragma once

#include <Eigen/Dense>

#include <concepts>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "adgac/scenario.hpp"

namespace adgac {

/// Thrown when version-space filtering removes every hypothesis.
class EmptyVersionSpaceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename C>
concept HypothesisClass = requires(const C& c, std::size_t i, const Eigen::VectorXd& x) {
  { c.size() } -> std::convertible_to<std::size_t>;
  { c.predict(i, x) } -> std::convertible_to<Label>;
};

/// 1-D thresholds h_t(x) = +1 iff x > t over a sorted grid of candidate t.
class ThresholdClass {
 public:
  explicit ThresholdClass(std::vector<double> grid);

  /// `count` evenly spaced thresholds covering [lo, hi] inclusive.
  static ThresholdClass uniform_grid(std::size_t count, double lo = 0.0, double hi = 1.0);

  std::size_t size() const { return grid_.size(); }
  double threshold(std::size_t i) const { return grid_[i]; }
  const std::vector<double>& grid() const { return grid_; }

  template <typename Derived>
  Label predict(std::size_t i, const Eigen::MatrixBase<Derived>& x) const {
    return x(0) > grid_[i] ? 1 : -1;
  }

 private:
  std::vector<double> grid_;
};

/// Explicit finite class of arbitrary predictors.
class FiniteClass {
 public:
  using Predictor = std::function<Label(const Eigen::Ref<const Eigen::VectorXd>&)>;

  explicit FiniteClass(std::vector<Predictor> hypotheses);

  /// sign(w . x) for every weight vector, ties counted positive.
  static FiniteClass halfspaces(const std::vector<Eigen::VectorXd>& weights);

  std::size_t size() const { return hypotheses_.size(); }

  template <typename Derived>
  Label predict(std::size_t i, const Eigen::MatrixBase<Derived>& x) const {
    return hypotheses_[i](x);
  }

 private:
  std::vector<Predictor> hypotheses_;
};

/// Surviving hypothesis indices, kept sorted.
struct VersionSpace {
  std::vector<std::size_t> survivors;

  std::size_t size() const { return survivors.size(); }
  bool empty() const { return survivors.empty(); }
  /// True when the survivors form one contiguous index range.
  bool is_interval() const;
};

template <HypothesisClass C>
VersionSpace full_version_space(const C& cls) {
  VersionSpace v;
  v.survivors.resize(cls.size());
  for (std::size_t i = 0; i < cls.size(); ++i) v.survivors[i] = i;
  return v;
}

enum class Provenance : std::uint8_t { OracleDirect, AdgacPredicted };

struct LabeledDataset {
  Instances points;  // one instance per column
  std::vector<Label> labels;
  std::vector<Provenance> provenance;

  std::size_t size() const { return labels.size(); }
  bool empty() const { return labels.empty(); }
};

LabeledDataset make_dataset(Instances points, std::vector<Label> labels, Provenance source);

/// Fraction of W on which hypothesis h disagrees with the recorded label.
template <HypothesisClass C>
double empirical_error(const C& cls, std::size_t h, const LabeledDataset& w) {
  if (w.empty()) throw std::invalid_argument("empirical_error: empty dataset");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (cls.predict(h, w.points.col(static_cast<Eigen::Index>(i))) != w.labels[i]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(w.size());
}

/// Exact DIS(V) membership: some pair of survivors disagrees on x.
template <HypothesisClass C, typename Derived>
bool in_disagreement_region(const C& cls, const VersionSpace& v,
                            const Eigen::MatrixBase<Derived>& x) {
  if (v.empty()) throw std::invalid_argument("in_disagreement_region: empty version space");
  const Label first = cls.predict(v.survivors.front(), x);
  for (std::size_t j = 1; j < v.survivors.size(); ++j) {
    if (cls.predict(v.survivors[j], x) != first) return true;
  }
  return false;
}

/// Thresholds are ordered, so DIS(V) is the half-open interval (t_min, t_max].
template <typename Derived>
bool in_disagreement_region(const ThresholdClass& cls, const VersionSpace& v,
                            const Eigen::MatrixBase<Derived>& x) {
  if (v.empty()) throw std::invalid_argument("in_disagreement_region: empty version space");
  return x(0) > cls.threshold(v.survivors.front()) && x(0) <= cls.threshold(v.survivors.back());
}

/// Mistake counts |W| * err_W(h) for every survivor, aligned with v.survivors.
template <HypothesisClass C>
std::vector<std::size_t> mistake_counts(const C& cls, const VersionSpace& v,
                                        const LabeledDataset& w) {
  std::vector<std::size_t> counts(v.size(), 0);
  for (std::size_t j = 0; j < v.size(); ++j) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (cls.predict(v.survivors[j], w.points.col(static_cast<Eigen::Index>(i))) != w.labels[i]) {
        ++counts[j];
      }
    }
  }
  return counts;
}

/// O((|V| + |W|) log |W|) mistake counts for thresholds via sorted prefix sums.
std::vector<std::size_t> mistake_counts(const ThresholdClass& cls, const VersionSpace& v,
                                        const LabeledDataset& w);

/// Keeps the survivors with |W| * err_W(h) < threshold. Throws EmptyVersionSpaceError if none remain.
template <HypothesisClass C>
VersionSpace filter_version_space(const C& cls, const VersionSpace& v, const LabeledDataset& w,
                                  double threshold) {
  if (threshold < 0.0) throw std::invalid_argument("filter_version_space: negative threshold");
  if (w.empty()) return v;
  const auto counts = mistake_counts(cls, v, w);
  VersionSpace out;
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (static_cast<double>(counts[j]) < threshold) out.survivors.push_back(v.survivors[j]);
  }
  if (out.empty()) {
    throw EmptyVersionSpaceError("version-space filtering removed every hypothesis");
  }
  return out;
}

struct MassEstimate {
  double value = 0.0;
  double standard_error = 0.0;
};

/// Monte Carlo estimate of Pr[X in DIS(V)] on n_mc fresh draws.
template <HypothesisClass C>
MassEstimate estimate_disagreement_mass(const C& cls, const VersionSpace& v,
                                        const ScenarioSpec& spec, std::size_t n_mc, Rng& rng) {
  if (n_mc < 1) throw std::invalid_argument("estimate_disagreement_mass: n_mc must be >= 1");
  const Instances xs = sample_unlabeled(spec, n_mc, rng);
  std::size_t hits = 0;
  for (Eigen::Index j = 0; j < xs.cols(); ++j) {
    if (in_disagreement_region(cls, v, xs.col(j))) ++hits;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(n_mc);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n_mc))};
}

/// Diagnostic estimate of the disagreement coefficient sup_r Pr[DIS(B(h_ref, r))] / r over a
/// finite radius grid; distances and masses are measured on one shared Monte Carlo sample.
template <HypothesisClass C>
double estimate_disagreement_coefficient(const C& cls, std::size_t reference,
                                         const std::vector<double>& radii,
                                         const ScenarioSpec& spec, std::size_t n_mc, Rng& rng) {
  const Instances xs = sample_unlabeled(spec, n_mc, rng);
  const auto n = static_cast<double>(n_mc);
  std::vector<double> distance(cls.size(), 0.0);
  for (std::size_t h = 0; h < cls.size(); ++h) {
    std::size_t differ = 0;
    for (Eigen::Index j = 0; j < xs.cols(); ++j) {
      if (cls.predict(h, xs.col(j)) != cls.predict(reference, xs.col(j))) ++differ;
    }
    distance[h] = static_cast<double>(differ) / n;
  }
  double theta = 0.0;
  for (const double r : radii) {
    if (r <= 0.0) continue;
    VersionSpace ball;
    for (std::size_t h = 0; h < cls.size(); ++h) {
      if (distance[h] <= r) ball.survivors.push_back(h);
    }
    std::size_t hits = 0;
    for (Eigen::Index j = 0; j < xs.cols(); ++j) {
      if (in_disagreement_region(cls, ball, xs.col(j))) ++hits;
    }
    theta = std::max(theta, static_cast<double>(hits) / n / r);
  }
  return theta;
}

}  // namespace adgac
