#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace adgac {

using Rng = std::mt19937_64;

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double normal_pdf(double x) {
  constexpr double inv_sqrt_2pi = 0.39894228040143267794;
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

/// Inverse of a monotone non-decreasing function on [lo, hi] by bisection.
/// Returns the smallest x (to `tol`) with f(x) >= target.
template <typename F>
double bisect_increasing(F&& f, double target, double lo, double hi, double tol = 1e-14,
                         int max_iter = 400) {
  for (int i = 0; i < max_iter && hi - lo > tol * std::max(1.0, std::abs(hi)); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Standard normal quantile. Bisection bracket on the cdf followed by Newton polish.
inline double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw std::invalid_argument("normal_quantile: u must lie in (0, 1)");
  }
  double x = bisect_increasing([](double z) { return normal_cdf(z); }, u, -40.0, 40.0, 1e-10);
  for (int i = 0; i < 3; ++i) {
    const double pdf = normal_pdf(x);
    if (pdf <= 0.0) break;
    x -= (normal_cdf(x) - u) / pdf;
  }
  return x;
}

/// Derives an independent 64-bit stream seed (splitmix64 finaliser).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

/// Linear-interpolated sample quantile (type 7).
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

}  // namespace adgac
