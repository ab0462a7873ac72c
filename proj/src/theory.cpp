#include "adgac/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "adgac/numerics.hpp"

namespace adgac {

double lemma_constraint_value(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("lemma: x and y differ in length");
  // sum_j y_j * (x_1 + ... + x_j)
  double prefix = 0.0;
  double total = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    prefix += x[j];
    total += y[j] * prefix;
  }
  return total;
}

LemmaResult lemma_min_f(const LemmaInstance& instance) {
  const auto& x = instance.x;
  const auto& y = instance.y;
  if (x.size() != y.size()) throw std::invalid_argument("lemma: x and y differ in length");
  if (x.empty()) throw std::invalid_argument("lemma: empty instance");
  const auto negative = [](double v) { return v < 0.0; };
  if (std::any_of(x.begin(), x.end(), negative) || std::any_of(y.begin(), y.end(), negative)) {
    throw std::invalid_argument("lemma: entries must be non-negative");
  }
  const double constraint = lemma_constraint_value(x, y);
  if (constraint > instance.t * (1.0 + 1e-12) + 1e-15) {
    throw std::invalid_argument("lemma: constraint exceeds t");
  }
  const std::size_t n = x.size();
  // f(0) = sum y; f(k) = f(k - 1) + x_k - y_k.
  double f = std::accumulate(y.begin(), y.end(), 0.0);
  LemmaResult out;
  out.min_f = f;
  out.argmin = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    f += x[k - 1] - y[k - 1];
    if (f < out.min_f) {
      out.min_f = f;
      out.argmin = k;
    }
  }
  const auto nd = static_cast<double>(n);
  out.bound = std::sqrt(2.0 * nd * instance.t / (nd + 1.0));
  out.holds = out.min_f <= out.bound + 1e-9;
  return out;
}

LemmaInstance lemma_equality_instance(std::size_t n, double t) {
  if (n == 0) throw std::invalid_argument("lemma: n must be >= 1");
  const auto nd = static_cast<double>(n);
  const double v = std::sqrt(2.0 * t / (nd * (nd + 1.0)));
  return {std::vector<double>(n, v), std::vector<double>(n, v), t};
}

double BaseScore::cdf(double s) const {
  if (kind == DistKind::UniformInterval) return std::clamp(s, 0.0, 1.0);
  return normal_cdf(s);
}

double BaseScore::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("BaseScore: quantile level must lie in (0, 1)");
  if (kind == DistKind::UniformInterval) return u;
  return normal_quantile(u);
}

double GhatConstruction::operator()(double s) const {
  if (nu_prime == 0.0) return s;
  const double root = std::sqrt(nu_prime);
  if (s >= a && s <= base.cut) return a + (b - a) * (base.cdf(s) - base.cdf(a)) / root;
  if (s > base.cut && s <= b) return a + (b - a) * (base.cdf(s) - base.cdf(base.cut)) / root;
  return s;
}

GhatConstruction construct_ghat(const BaseScore& base, double nu_prime) {
  if (!(nu_prime >= 0.0)) throw std::invalid_argument("construct_ghat: nu' must be non-negative");
  const double root = std::sqrt(nu_prime);
  if (std::min(base.positive_mass(), base.negative_mass()) < root) {
    throw std::invalid_argument("construct_ghat: each side of h* needs mass at least sqrt(nu')");
  }
  GhatConstruction g{base, nu_prime, base.cut, base.cut};
  if (nu_prime == 0.0) return g;
  const double f_cut = base.cdf(base.cut);
  // Clamp away from {0, 1} so the quantile stays finite when a side has exactly sqrt(nu') mass.
  const auto level = [](double u) { return std::clamp(u, 1e-300, 1.0 - 1e-16); };
  g.a = base.quantile(level(f_cut - root));
  g.b = base.quantile(level(f_cut + root));
  return g;
}

QuantileGrid quantile_grid(const BaseScore& base, std::size_t n) {
  if (n == 0) throw std::invalid_argument("quantile_grid: n must be >= 1");
  QuantileGrid grid;
  grid.score.resize(n);
  grid.truth.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = base.quantile((static_cast<double>(i) + 0.5) / static_cast<double>(n));
    grid.score[i] = s;
    grid.truth[i] = sign_label(s - base.cut);
  }
  return grid;
}

double comparison_error(const std::vector<double>& ghat, const std::vector<Label>& truth) {
  if (ghat.size() != truth.size()) throw std::invalid_argument("comparison_error: size mismatch");
  if (ghat.empty()) throw std::invalid_argument("comparison_error: empty grid");
  std::vector<double> positives;
  for (std::size_t i = 0; i < ghat.size(); ++i) {
    if (truth[i] > 0) positives.push_back(ghat[i]);
  }
  std::sort(positives.begin(), positives.end());
  double inverted = 0.0;
  for (std::size_t i = 0; i < ghat.size(); ++i) {
    if (truth[i] > 0) continue;
    inverted += static_cast<double>(std::lower_bound(positives.begin(), positives.end(), ghat[i]) - positives.begin());
  }
  const auto n = static_cast<double>(ghat.size());
  return 2.0 * inverted / (n * n);
}

ThresholdScan best_threshold(const std::vector<double>& ghat, const std::vector<Label>& truth) {
  if (ghat.size() != truth.size()) throw std::invalid_argument("best_threshold: size mismatch");
  if (ghat.empty()) throw std::invalid_argument("best_threshold: empty grid");
  const std::size_t n = ghat.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return ghat[l] < ghat[r]; });

  // Cut p predicts -1 on the p smallest values: errors = positives below + negatives above.
  std::size_t positives_below = 0;
  std::size_t negatives_above = 0;
  for (std::size_t i = 0; i < n; ++i) negatives_above += truth[i] < 0 ? 1 : 0;
  ThresholdScan best;
  std::size_t best_errors = n + 1;
  for (std::size_t p = 0; p <= n; ++p) {
    const bool realisable = p == 0 || p == n || ghat[order[p - 1]] < ghat[order[p]];
    if (realisable && positives_below + negatives_above < best_errors) {
      best_errors = positives_below + negatives_above;
      if (p == 0) {
        best.argmin_t = ghat[order[0]] - 1.0;
      } else if (p == n) {
        best.argmin_t = ghat[order[n - 1]] + 1.0;
      } else {
        best.argmin_t = 0.5 * (ghat[order[p - 1]] + ghat[order[p]]);
      }
    }
    if (p < n) {
      if (truth[order[p]] > 0) {
        ++positives_below;
      } else {
        --negatives_above;
      }
    }
  }
  best.min_error = static_cast<double>(best_errors) / static_cast<double>(n);
  return best;
}

namespace {

std::vector<double> mapped(const std::function<double(double)>& ghat, const QuantileGrid& grid) {
  std::vector<double> out(grid.score.size());
  std::transform(grid.score.begin(), grid.score.end(), out.begin(), ghat);
  return out;
}

}  // namespace

double comparison_error_of(const std::function<double(double)>& ghat, const BaseScore& base, std::size_t n) {
  const auto grid = quantile_grid(base, n);
  return comparison_error(mapped(ghat, grid), grid.truth);
}

ThresholdScan best_threshold_error(const std::function<double(double)>& ghat, const BaseScore& base,
                                   std::size_t n) {
  const auto grid = quantile_grid(base, n);
  return best_threshold(mapped(ghat, grid), grid.truth);
}

}  // namespace adgac
