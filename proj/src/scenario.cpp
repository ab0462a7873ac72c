#include "adgac/scenario.hpp"

#include <limits>
#include <stdexcept>

namespace adgac {

std::string to_string(DistKind kind) {
  return kind == DistKind::UniformInterval ? "uniform-interval" : "isotropic-gaussian";
}

std::string to_string(LabelNoiseKind kind) {
  switch (kind) {
    case LabelNoiseKind::Tsybakov:
      return "tsybakov";
    case LabelNoiseKind::Massart:
      return "massart";
    case LabelNoiseKind::Adversarial:
      return "adversarial";
  }
  return "unknown";
}

std::string to_string(ComparisonNoiseKind kind) {
  return kind == ComparisonNoiseKind::Perfect ? "perfect" : "band-adversarial";
}

DistKind parse_dist_kind(const std::string& text) {
  if (text == "uniform-interval") return DistKind::UniformInterval;
  if (text == "isotropic-gaussian") return DistKind::IsotropicGaussian;
  throw std::invalid_argument("unknown distribution kind '" + text + "'");
}

LabelNoiseKind parse_label_noise_kind(const std::string& text) {
  if (text == "tsybakov") return LabelNoiseKind::Tsybakov;
  if (text == "massart") return LabelNoiseKind::Massart;
  if (text == "adversarial") return LabelNoiseKind::Adversarial;
  throw std::invalid_argument("unknown label noise kind '" + text + "'");
}

ComparisonNoiseKind parse_comparison_noise_kind(const std::string& text) {
  if (text == "perfect") return ComparisonNoiseKind::Perfect;
  if (text == "band-adversarial") return ComparisonNoiseKind::BandAdversarial;
  throw std::invalid_argument("unknown comparison noise kind '" + text + "'");
}

void ScenarioSpec::validate() const {
  if (dimension < 1) throw std::invalid_argument("scenario: dimension must be positive");
  if (dist == DistKind::UniformInterval && dimension != 1) {
    throw std::invalid_argument("scenario: uniform-interval requires dimension 1");
  }
  if (truth.weights.size() != dimension) {
    throw std::invalid_argument("scenario: ground-truth weights do not match dimension");
  }
  if (truth.weights.norm() == 0.0) throw std::invalid_argument("scenario: zero ground-truth weights");
  const auto& ln = label_noise;
  if (ln.kappa < 1.0) throw std::invalid_argument("scenario: kappa must be >= 1");
  if (ln.mu_tilde <= 0.0) throw std::invalid_argument("scenario: mu_tilde must be positive");
  if (ln.massart_flip < 0.0 || ln.massart_flip >= 0.5) {
    throw std::invalid_argument("scenario: massart flip must lie in [0, 1/2)");
  }
  if (ln.nu < 0.0 || ln.nu >= 1.0) throw std::invalid_argument("scenario: nu must lie in [0, 1)");
  if (comparison_noise.nu_prime < 0.0) throw std::invalid_argument("scenario: nu' must be >= 0");
}

ScenarioSpec make_threshold_scenario(double t_star) {
  ScenarioSpec spec;
  spec.dist = DistKind::UniformInterval;
  spec.dimension = 1;
  spec.truth.weights = Eigen::VectorXd::Ones(1);
  spec.truth.offset = t_star;
  return spec;
}

ScenarioSpec make_halfspace_scenario(Eigen::VectorXd w_star) {
  ScenarioSpec spec;
  spec.dist = DistKind::IsotropicGaussian;
  spec.dimension = static_cast<int>(w_star.size());
  spec.truth.weights = w_star.normalized();
  spec.truth.offset = 0.0;
  return spec;
}

ScoreDistribution::ScoreDistribution(const ScenarioSpec& spec) {
  const double w_norm = spec.truth.weights.norm();
  if (spec.dist == DistKind::IsotropicGaussian) {
    gaussian_ = true;
    mean_ = -spec.truth.offset;
    sd_ = w_norm;
  } else {
    const double w = spec.truth.weights(0);
    lo_ = std::min(0.0, w) - spec.truth.offset;
    hi_ = std::max(0.0, w) - spec.truth.offset;
  }
}

double ScoreDistribution::cdf(double s) const {
  if (gaussian_) return normal_cdf((s - mean_) / sd_);
  if (s <= lo_) return 0.0;
  if (s >= hi_) return 1.0;
  return (s - lo_) / (hi_ - lo_);
}

double ScoreDistribution::pdf_max() const {
  return gaussian_ ? normal_pdf(0.0) / sd_ : 1.0 / (hi_ - lo_);
}

double ScoreDistribution::support_radius() const {
  return gaussian_ ? std::numeric_limits<double>::infinity() : std::max(std::abs(lo_), std::abs(hi_));
}

Instances sample_unlabeled(const ScenarioSpec& spec, std::size_t n, Rng& rng) {
  if (n == 0) throw std::invalid_argument("sample_unlabeled: n must be at least 1");
  Instances out(spec.dimension, static_cast<Eigen::Index>(n));
  if (spec.dist == DistKind::UniformInterval) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (Eigen::Index j = 0; j < out.cols(); ++j) out(0, j) = unif(rng);
  } else {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
      for (Eigen::Index i = 0; i < out.rows(); ++i) out(i, j) = gauss(rng);
    }
  }
  return out;
}

double band_mass(const ScenarioSpec& spec, BandTarget target, double rho) {
  if (rho <= 0.0) return 0.0;
  const ScoreDistribution score(spec);
  const double below = score.cdf(0.0) - score.cdf(-rho);
  const double above = score.cdf(rho) - score.cdf(0.0);
  if (target == BandTarget::Label) return below + above;
  return 2.0 * below * above;
}

double max_band_mass(const ScenarioSpec& spec, BandTarget target) {
  if (target == BandTarget::Label) return 1.0;
  const double f0 = ScoreDistribution(spec).cdf(0.0);
  return 2.0 * f0 * (1.0 - f0);
}

double calibrate_band(const ScenarioSpec& spec, BandTarget target, double target_mass) {
  if (!(target_mass >= 0.0 && target_mass < 1.0)) {
    throw std::invalid_argument("calibrate_band: target mass must lie in [0, 1)");
  }
  if (target_mass == 0.0) return 0.0;
  if (target_mass >= max_band_mass(spec, target)) {
    throw std::invalid_argument("calibrate_band: target mass exceeds the achievable maximum");
  }
  const double cap = ScoreDistribution(spec).support_radius();
  double hi = 1.0;
  while (band_mass(spec, target, hi) < target_mass) {
    hi *= 2.0;
    if (hi > 1e6 || hi > 2.0 * cap) {
      throw std::invalid_argument("calibrate_band: target mass not reachable");
    }
  }
  return bisect_increasing([&](double r) { return band_mass(spec, target, r); }, target_mass, 0.0,
                           hi, 1e-15);
}

}  // namespace adgac
