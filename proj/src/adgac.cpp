#include "adgac/adgac.hpp"

#include <cmath>
#include <limits>

namespace adgac {

void AdgacParams::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("adgac: epsilon must lie in (0, 1)");
  if (m > n) throw std::invalid_argument("adgac: |S| exceeds the ambient sample size n");
  if (k < 1) throw std::invalid_argument("adgac: k must be >= 1");
}

RankedGroups partition_groups(std::vector<std::size_t> sorted, const AdgacParams& params) {
  params.validate();
  RankedGroups out;
  const std::size_t m = sorted.size();
  out.order = std::move(sorted);
  if (m == 0) return out;
  const double target = params.group_target();
  const double rounded = std::round(target);
  out.group_size = rounded < 1.0 ? 1 : static_cast<std::size_t>(rounded);
  const std::size_t count = std::max<std::size_t>(1, m / out.group_size);
  out.starts.resize(count + 1);
  for (std::size_t g = 0; g < count; ++g) out.starts[g] = g * out.group_size;
  out.starts[count] = m;
  return out;
}

std::vector<GroupDiagnostics> group_diagnostics(const RankedGroups& groups, const Instances& S,
                                                const GroundTruth& truth) {
  std::vector<GroupDiagnostics> out(groups.count());
  for (std::size_t g = 0; g < groups.count(); ++g) {
    const auto members = groups.group(g);
    long sum = 0;
    for (const std::size_t i : members) sum += truth.label(S.col(static_cast<Eigen::Index>(i)));
    const auto size = static_cast<double>(members.size());
    const double positives = (static_cast<double>(sum) + size) / 2.0;
    out[g].majority = sum >= 0 ? 1 : -1;
    out[g].minority_fraction = std::min(positives, size - positives) / size;
  }
  return out;
}

std::size_t count_mismatches(const std::vector<Label>& labels, const Instances& S,
                             const GroundTruth& truth) {
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != truth.label(S.col(static_cast<Eigen::Index>(i)))) ++mismatches;
  }
  return mismatches;
}

namespace {

void check_k_domain(double epsilon, double delta, double c3) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw std::invalid_argument("k: epsilon must lie in (0, 1/2)");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("k: delta must lie in (0, 1)");
  if (!(c3 > 0.0)) throw std::invalid_argument("k: C3 must be positive");
}

std::size_t ceil_count(double value) {
  // Saturate far above any realistic group size; min(k, |group|) is what gets queried.
  constexpr double cap = 1e15;
  if (!(value < cap)) return static_cast<std::size_t>(cap);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(value)));
}

}  // namespace

std::size_t k_tnc(double epsilon, double delta, double kappa, double c3) {
  check_k_domain(epsilon, delta, c3);
  if (kappa < 1.0) throw std::invalid_argument("k: kappa must be >= 1");
  const double base = c3 * std::log(std::log(1.0 / epsilon) / delta);
  return ceil_count(base * std::pow(1.0 / epsilon, 2.0 * kappa - 2.0));
}

std::size_t k_adv(double epsilon, double delta, double c3) {
  check_k_domain(epsilon, delta, c3);
  return ceil_count(c3 * std::log(std::log(1.0 / epsilon) / delta));
}

}  // namespace adgac
