#pragma once

#include <map>
#include <string>

namespace adgac {

/// Leading constants that the guarantees leave unspecified. Everything is configuration; the
/// acceptance suite runs against a frozen file (config/constants.conf).
struct TunableConstants {
  // Gates and label batch: eps < C1, nu' <= C2 eps^(2 kappa) delta, k = C3 * ..., nu <= C4 eps.
  double C1 = 0.5;
  double C2 = 1.0;
  double C3 = 1.0;
  double C4 = 1.0;
  // VC deviation bound U(n, gamma) = c0 (d log(n/d) + log(1/gamma)) / n.
  double c0 = 1.0;
  // Log-concave constants. c1_prime is c6 evaluated at c5 = c2 / (4M).
  double c1 = 0.2;
  double c2 = 0.28;
  double c3 = 1.0;
  double c4 = 2.0;
  double c1_prime = 1.0;
  // Multipliers on the per-round unlabeled sample sizes.
  double a2_n_multiplier = 1.0;
  double a2_tnc_multiplier = 1.0;
  double margin_n_multiplier = 1.0;

  /// Throws std::invalid_argument unless every constant is strictly positive.
  void validate() const;

  std::map<std::string, double> to_map() const;
  /// Applies key/value overrides; unknown keys throw std::invalid_argument.
  void apply(const std::map<std::string, double>& values);
};

}  // namespace adgac
