#pragma once

#include <Eigen/Dense>

#include <concepts>
#include <cstdint>

#include "adgac/scenario.hpp"

namespace adgac {

struct QueryCounters {
  std::uint64_t labels = 0;
  std::uint64_t comparisons = 0;

  QueryCounters& operator+=(const QueryCounters& other) {
    labels += other.labels;
    comparisons += other.comparisons;
    return *this;
  }
  friend bool operator==(const QueryCounters&, const QueryCounters&) = default;
};

/// Anything that answers label and pairwise-comparison queries on instances.
template <typename O>
concept QueryOracle = requires(O& oracle, const Eigen::VectorXd& x) {
  { oracle.label(x) } -> std::convertible_to<Label>;
  { oracle.compare(x, x) } -> std::convertible_to<Label>;
};

/// Simulated labeling and comparison oracles for one trial.
///
/// Label noise follows the scenario's kind:
///  - massart: Y = h*(x) with probability 1 - beta;
///  - tsybakov (kappa > 1): eta(x) = 1/2 + sign(g)*min(1/2, (|g|/s)^(kappa-1)/2), with the scale s
///    chosen so that Pr[|eta(X) - 1/2| < t] <= mu_tilde * t^(1/(kappa-1)) for every t;
///    kappa == 1 falls back to the massart rule;
///  - adversarial: h*(x) flipped deterministically on the band |g*(x)| < rho_nu of mass nu.
///
/// Band-adversarial comparisons invert sign(g(x) - g(x')) when both scores lie in the band
/// (-rho', rho') on opposite sides of zero; rho' is calibrated so the flipped-pair mass is nu'.
///
/// The oracle owns its random stream and counters; every call increments exactly one counter.
class Oracle {
 public:
  Oracle(const ScenarioSpec& spec, std::uint64_t stream_seed);

  Label label(const Eigen::Ref<const Eigen::VectorXd>& x);
  Label compare(const Eigen::Ref<const Eigen::VectorXd>& x,
                const Eigen::Ref<const Eigen::VectorXd>& x_prime);

  /// Pr[Y = +1 | x] for the label model (0/1 for the deterministic adversarial kind).
  double eta(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  const ScenarioSpec& spec() const { return spec_; }
  const QueryCounters& counters() const { return counters_; }
  double label_band() const { return label_band_; }
  double comparison_band() const { return spec_.comparison_noise.band_radius; }
  double tsybakov_scale() const { return tsybakov_scale_; }

 private:
  ScenarioSpec spec_;
  double label_band_ = 0.0;
  double tsybakov_scale_ = 1.0;
  Rng rng_;
  QueryCounters counters_;
};

}  // namespace adgac
