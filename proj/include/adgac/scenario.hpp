#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>

#include "adgac/numerics.hpp"

namespace adgac {

/// Binary label in {-1, +1}.
using Label = int;

/// A batch of instances, one per column.
using Instances = Eigen::MatrixXd;

inline Label sign_label(double v) { return v >= 0.0 ? 1 : -1; }

enum class DistKind { UniformInterval, IsotropicGaussian };
enum class LabelNoiseKind { Tsybakov, Massart, Adversarial };
enum class ComparisonNoiseKind { Perfect, BandAdversarial };

std::string to_string(DistKind kind);
std::string to_string(LabelNoiseKind kind);
std::string to_string(ComparisonNoiseKind kind);
DistKind parse_dist_kind(const std::string& text);
LabelNoiseKind parse_label_noise_kind(const std::string& text);
ComparisonNoiseKind parse_comparison_noise_kind(const std::string& text);

/// Linear score g*(x) = w . x - offset. The Bayes classifier is h*(x) = sign(g*(x)).
struct GroundTruth {
  Eigen::VectorXd weights;
  double offset = 0.0;

  template <typename Derived>
  double score(const Eigen::MatrixBase<Derived>& x) const {
    return weights.dot(x) - offset;
  }

  template <typename Derived>
  Label label(const Eigen::MatrixBase<Derived>& x) const {
    return sign_label(score(x));
  }
};

struct LabelNoiseSpec {
  LabelNoiseKind kind = LabelNoiseKind::Massart;
  double kappa = 1.0;         // Tsybakov exponent, >= 1
  double mu_tilde = 1.0;      // constant of Pr[|eta - 1/2| < t] <= mu_tilde * t^(1/(kappa-1))
  double massart_flip = 0.0;  // beta in [0, 1/2)
  double nu = 0.0;            // adversarial flipped mass
};

struct ComparisonNoiseSpec {
  ComparisonNoiseKind kind = ComparisonNoiseKind::Perfect;
  double nu_prime = 0.0;
  double band_radius = 0.0;  // filled in by calibrate_band when the oracle is built
};

struct ScenarioSpec {
  DistKind dist = DistKind::UniformInterval;
  int dimension = 1;
  GroundTruth truth;
  LabelNoiseSpec label_noise;
  ComparisonNoiseSpec comparison_noise;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on inconsistent fields.
  void validate() const;
};

/// uniform(0, 1) instances with g*(x) = x - t_star; noiseless oracles.
ScenarioSpec make_threshold_scenario(double t_star = 0.5);

/// Isotropic gaussian instances in R^d with g*(x) = w_star . x; w_star is normalised.
ScenarioSpec make_halfspace_scenario(Eigen::VectorXd w_star);

/// Law of the score g*(X) under the scenario's marginal.
class ScoreDistribution {
 public:
  explicit ScoreDistribution(const ScenarioSpec& spec);

  double cdf(double s) const;
  /// Upper bound on the score density.
  double pdf_max() const;
  /// Smallest radius beyond which every score mass is covered (infinite for gaussian).
  double support_radius() const;

 private:
  bool gaussian_ = false;
  double lo_ = 0.0;
  double hi_ = 1.0;
  double mean_ = 0.0;
  double sd_ = 1.0;
};

/// n i.i.d. draws from the scenario's marginal, one per column.
Instances sample_unlabeled(const ScenarioSpec& spec, std::size_t n, Rng& rng);

enum class BandTarget {
  Label,       // Pr[|g*(X)| < rho]
  Comparison,  // Pr over independent pairs that both scores lie in (-rho, rho) with opposite signs
};

/// Mass carried by a band of radius rho for the given target.
double band_mass(const ScenarioSpec& spec, BandTarget target, double rho);

/// Largest mass reachable by any band radius for the given target.
double max_band_mass(const ScenarioSpec& spec, BandTarget target);

/// Band radius whose mass equals `target_mass`. Bisection on the score cdf.
double calibrate_band(const ScenarioSpec& spec, BandTarget target, double target_mass);

}  // namespace adgac
