#include "adgac/oracle.hpp"

#include <cmath>

namespace adgac {

Oracle::Oracle(const ScenarioSpec& spec, std::uint64_t stream_seed)
    : spec_(spec), rng_(stream_seed) {
  spec_.validate();
  const auto& ln = spec_.label_noise;
  if (ln.kind == LabelNoiseKind::Adversarial) {
    label_band_ = calibrate_band(spec_, BandTarget::Label, ln.nu);
  }
  if (ln.kind == LabelNoiseKind::Tsybakov && ln.kappa > 1.0) {
    // Pr[|g| < r] <= 2 * pdf_max * r, and |eta - 1/2| < t  <=>  |g| < s * (2t)^(1/(kappa-1)).
    const double p = 1.0 / (ln.kappa - 1.0);
    tsybakov_scale_ = ln.mu_tilde / (2.0 * ScoreDistribution(spec_).pdf_max() * std::pow(2.0, p));
  }
  auto& cn = spec_.comparison_noise;
  cn.band_radius = cn.kind == ComparisonNoiseKind::BandAdversarial
                       ? calibrate_band(spec_, BandTarget::Comparison, cn.nu_prime)
                       : 0.0;
}

double Oracle::eta(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const double g = spec_.truth.score(x);
  const double s = g >= 0.0 ? 1.0 : -1.0;
  const auto& ln = spec_.label_noise;
  switch (ln.kind) {
    case LabelNoiseKind::Adversarial: {
      const bool flipped = std::abs(g) < label_band_;
      return (s > 0.0) != flipped ? 1.0 : 0.0;
    }
    case LabelNoiseKind::Tsybakov:
      if (ln.kappa > 1.0) {
        const double margin = std::pow(std::abs(g) / tsybakov_scale_, ln.kappa - 1.0);
        return 0.5 + s * 0.5 * std::min(1.0, margin);
      }
      [[fallthrough]];
    case LabelNoiseKind::Massart:
      return 0.5 + s * (0.5 - ln.massart_flip);
  }
  return 0.5;
}

Label Oracle::label(const Eigen::Ref<const Eigen::VectorXd>& x) {
  ++counters_.labels;
  const double p = eta(x);
  if (p >= 1.0) return 1;
  if (p <= 0.0) return -1;
  std::bernoulli_distribution coin(p);
  return coin(rng_) ? 1 : -1;
}

Label Oracle::compare(const Eigen::Ref<const Eigen::VectorXd>& x,
                      const Eigen::Ref<const Eigen::VectorXd>& x_prime) {
  ++counters_.comparisons;
  const double g = spec_.truth.score(x);
  const double g_prime = spec_.truth.score(x_prime);
  Label z = g >= g_prime ? 1 : -1;
  const double rho = spec_.comparison_noise.band_radius;
  if (rho > 0.0 && std::abs(g) < rho && std::abs(g_prime) < rho &&
      sign_label(g) != sign_label(g_prime)) {
    z = -z;
  }
  return z;
}

}  // namespace adgac
