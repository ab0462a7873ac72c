#include "adgac/a2.hpp"

#include <sstream>

namespace adgac {

double vc_bound_u(double n, double gamma, double d, double c0) {
  if (!(d >= 1.0)) throw std::invalid_argument("vc_bound_u: d must be >= 1");
  if (!(n >= d)) throw std::invalid_argument("vc_bound_u: n must be >= d");
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("vc_bound_u: gamma must lie in (0, 1)");
  if (!(c0 > 0.0)) throw std::invalid_argument("vc_bound_u: c0 must be positive");
  return c0 * (d * std::log(n / d) + std::log(1.0 / gamma)) / n;
}

NoiseModel noise_model_of(const ScenarioSpec& spec) {
  switch (spec.label_noise.kind) {
    case LabelNoiseKind::Adversarial:
      return {true, 1.0};
    case LabelNoiseKind::Tsybakov:
      return {false, spec.label_noise.kappa};
    case LabelNoiseKind::Massart:
      break;
  }
  return {false, 1.0};
}

double per_round_delta(double epsilon, double delta, double share) {
  return delta / (share * std::max(1.0, std::log2(1.0 / epsilon)));
}

std::size_t label_batch(double epsilon_i, double delta_i, const NoiseModel& noise,
                        const TunableConstants& constants) {
  return noise.adversarial ? k_adv(epsilon_i, delta_i, constants.C3)
                           : k_tnc(epsilon_i, delta_i, noise.kappa, constants.C3);
}

int a2_rounds(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("a2: epsilon must lie in (0, 1)");
  // The small slack keeps exact powers of two from rounding up an extra round.
  return std::max(1, static_cast<int>(std::ceil(std::log2(1.0 / epsilon) - 1e-12)));
}

namespace {

double smallest_n_meeting(double target, double gamma, double d, double c0) {
  const auto u = [&](double n) { return vc_bound_u(n, gamma, d, c0); };
  // U can rise on [d, d*e) before it decreases, so scan that stretch directly.
  const double start = std::ceil(d);
  const double peak = std::ceil(d * std::exp(1.0)) + 1.0;
  for (double n = start; n <= peak; n += 1.0) {
    if (u(n) <= target) return n;
  }
  double lo = peak;  // U(lo) > target
  double hi = 2.0 * peak;
  constexpr double limit = 1e18;
  while (u(hi) > target) {
    lo = hi;
    hi *= 2.0;
    if (hi > limit) return std::numeric_limits<double>::infinity();
  }
  while (hi - lo > 1.0) {
    const double mid = std::floor(0.5 * (lo + hi));
    (u(mid) <= target ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

std::size_t choose_n_i(int round, double epsilon, double delta, double vc_dim,
                       const NoiseModel& noise, const TunableConstants& constants,
                       std::size_t budget) {
  if (round < 1) throw std::invalid_argument("choose_n_i: round must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("choose_n_i: delta must lie in (0, 1)");
  const double eps_i = a2_round_epsilon(round);
  const double gamma = per_round_delta(epsilon, delta, 4.0);
  double n = smallest_n_meeting(eps_i, gamma, vc_dim, constants.c0);
  if (!noise.adversarial) {
    const double tnc = constants.a2_tnc_multiplier * std::pow(1.0 / eps_i, 2.0 * noise.kappa - 1.0) *
                       std::log(1.0 / delta);
    n = std::max(n, tnc);
  }
  n = std::ceil(constants.a2_n_multiplier * n);
  if (!(n <= static_cast<double>(budget))) {
    std::ostringstream msg;
    msg << "round " << round << " needs " << n << " unlabeled samples, budget is " << budget;
    throw BudgetExceededError(msg.str());
  }
  return static_cast<std::size_t>(n);
}

std::vector<std::string> gate_flags(const ScenarioSpec& spec, double epsilon, double delta,
                                    const TunableConstants& constants) {
  std::vector<std::string> flags;
  if (!(epsilon < constants.C1)) flags.emplace_back("gate_eps");
  const double kappa = noise_model_of(spec).kappa;
  if (spec.comparison_noise.kind == ComparisonNoiseKind::BandAdversarial &&
      spec.comparison_noise.nu_prime > constants.C2 * std::pow(epsilon, 2.0 * kappa) * delta) {
    flags.emplace_back("gate_comparison_noise");
  }
  if (spec.label_noise.kind == LabelNoiseKind::Adversarial &&
      spec.label_noise.nu > constants.C4 * epsilon) {
    flags.emplace_back("gate_label_noise");
  }
  return flags;
}

void RunParams::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  constants.validate();
}

namespace detail {

double vc_dimension_of(const ThresholdClass&) { return 1.0; }

}  // namespace detail

}  // namespace adgac
