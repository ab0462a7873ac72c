#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "adgac/oracle.hpp"

namespace adgac {

/// Parameters of one labeling invocation over a subset S (|S| = m) of an ambient sample of size n.
struct AdgacParams {
  std::size_t n = 0;
  std::size_t m = 0;
  double epsilon = 0.1;
  std::size_t k = 1;

  double alpha() const { return epsilon * static_cast<double>(n) / (2.0 * static_cast<double>(m)); }
  /// alpha * m before rounding, i.e. epsilon * n / 2.
  double group_target() const { return epsilon * static_cast<double>(n) / 2.0; }
  void validate() const;
};

struct SortOutcome {
  std::vector<std::size_t> order;  // increasing preference
  std::uint64_t comparisons = 0;
};

/// Randomised-pivot quicksort driven by a +-1 comparator. Each queried pair is presented in a
/// uniformly random argument order; compare(a, b) = +1 means a ranks above b.
template <typename Compare>
SortOutcome noisy_quicksort(std::vector<std::size_t> items, Compare&& compare, Rng& rng) {
  SortOutcome out;
  out.order.reserve(items.size());
  std::bernoulli_distribution coin(0.5);
  std::vector<std::size_t> left;
  std::vector<std::size_t> right;

  // Explicit stack of pending ranges; emitted in order by always popping the leftmost piece.
  struct Piece {
    std::vector<std::size_t> items;
    bool is_pivot;
  };
  std::vector<Piece> stack;
  stack.push_back({std::move(items), false});
  while (!stack.empty()) {
    Piece piece = std::move(stack.back());
    stack.pop_back();
    if (piece.is_pivot || piece.items.size() <= 1) {
      out.order.insert(out.order.end(), piece.items.begin(), piece.items.end());
      continue;
    }
    std::uniform_int_distribution<std::size_t> pick(0, piece.items.size() - 1);
    const std::size_t pivot_pos = pick(rng);
    const std::size_t pivot = piece.items[pivot_pos];
    left.clear();
    right.clear();
    for (std::size_t i = 0; i < piece.items.size(); ++i) {
      if (i == pivot_pos) continue;
      const std::size_t e = piece.items[i];
      bool above;
      if (coin(rng)) {
        above = compare(e, pivot) > 0;
      } else {
        above = compare(pivot, e) < 0;
      }
      ++out.comparisons;
      (above ? right : left).push_back(e);
    }
    stack.push_back({right, false});
    stack.push_back({{pivot}, true});
    stack.push_back({left, false});
  }
  return out;
}

/// Sorted list cut into contiguous groups; the last group absorbs the remainder.
struct RankedGroups {
  std::vector<std::size_t> order;
  std::vector<std::size_t> starts;  // count() + 1 offsets into order
  std::size_t group_size = 1;

  std::size_t count() const { return starts.empty() ? 0 : starts.size() - 1; }
  std::span<const std::size_t> group(std::size_t g) const {
    return std::span<const std::size_t>(order).subspan(starts[g], starts[g + 1] - starts[g]);
  }
};

/// Groups of size max(1, round(epsilon*n/2)); throws std::invalid_argument when m > n.
RankedGroups partition_groups(std::vector<std::size_t> sorted, const AdgacParams& params);

struct SearchOutcome {
  std::size_t boundary = 0;        // index of the boundary group
  Label boundary_label = -1;       // majority vote inside the boundary group
  bool boundary_probed = false;   // visited by the search itself
  std::size_t probes = 0;
  std::uint64_t labels = 0;
};

/// Binary search for the first group whose sampled label sum is >= 0.
///
/// Each probe draws min(k, |group|) members without replacement. A boundary group that was never
/// probed (the last group, after every probe came back negative) gets one extra probe for its
/// majority vote, so at most floor(log2(#groups)) + 1 probes are made.
template <typename LabelQuery>
SearchOutcome group_binary_search(const RankedGroups& groups, LabelQuery&& query, std::size_t k,
                                  Rng& rng) {
  if (k < 1) throw std::invalid_argument("group_binary_search: k must be >= 1");
  SearchOutcome out;
  if (groups.count() == 0) return out;
  std::vector<std::size_t> members;
  const auto probe = [&](std::size_t t) {
    const auto group = groups.group(t);
    members.assign(group.begin(), group.end());
    const std::size_t draws = std::min(k, members.size());
    // Partial Fisher-Yates: first `draws` entries become a uniform sample without replacement.
    for (std::size_t i = 0; i < draws; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, members.size() - 1);
      std::swap(members[i], members[pick(rng)]);
    }
    long sum = 0;
    for (std::size_t i = 0; i < draws; ++i) sum += query(members[i]);
    out.labels += draws;
    ++out.probes;
    return sum >= 0;
  };
  std::size_t t_min = 0;
  std::size_t t_max = groups.count() - 1;
  std::size_t last_positive = groups.count();
  while (t_min < t_max) {
    const std::size_t t = (t_min + t_max) / 2;
    if (probe(t)) {
      t_max = t;
      last_positive = t;
    } else {
      t_min = t + 1;
    }
  }
  out.boundary = t_min;
  // A probed boundary group is the last positive probe, so its majority vote is +1.
  out.boundary_probed = last_positive == out.boundary;
  out.boundary_label = out.boundary_probed || probe(out.boundary) ? 1 : -1;
  return out;
}

struct AdgacResult {
  std::vector<Label> labels;  // aligned with the columns of S
  std::size_t boundary = 0;
  std::size_t groups = 0;
  std::size_t group_size = 0;
  std::size_t probes = 0;
  std::uint64_t label_queries = 0;
  std::uint64_t comparison_queries = 0;
  RankedGroups ranking;
};

/// Labels every column of S by noisy ranking plus group binary search.
template <QueryOracle O>
AdgacResult adgac(const Instances& S, std::size_t n, double epsilon, std::size_t k, O& oracle,
                  Rng& rng) {
  AdgacResult out;
  const auto m = static_cast<std::size_t>(S.cols());
  if (m == 0) return out;
  AdgacParams params{n, m, epsilon, k};
  params.validate();

  std::vector<std::size_t> items(m);
  std::iota(items.begin(), items.end(), std::size_t{0});
  auto sorted = noisy_quicksort(
      std::move(items),
      [&](std::size_t a, std::size_t b) -> Label { return oracle.compare(S.col(a), S.col(b)); },
      rng);
  out.comparison_queries = sorted.comparisons;
  out.ranking = partition_groups(std::move(sorted.order), params);
  const auto search = group_binary_search(
      out.ranking, [&](std::size_t i) -> Label { return oracle.label(S.col(i)); }, k, rng);

  out.labels.assign(m, -1);
  for (std::size_t g = search.boundary; g < out.ranking.count(); ++g) {
    const Label y = g == search.boundary ? search.boundary_label : 1;
    for (const std::size_t i : out.ranking.group(g)) out.labels[i] = y;
  }
  out.boundary = search.boundary;
  out.groups = out.ranking.count();
  out.group_size = out.ranking.group_size;
  out.probes = search.probes;
  out.label_queries = search.labels;
  return out;
}

/// Test-mode diagnostics of one group against the ground truth.
struct GroupDiagnostics {
  double minority_fraction = 0.0;  // q(S_i)
  Label majority = 1;              // mu(S_i), ties counted positive
};

std::vector<GroupDiagnostics> group_diagnostics(const RankedGroups& groups, const Instances& S,
                                                const GroundTruth& truth);

/// Number of entries of `labels` that disagree with h* on the matching column of S.
std::size_t count_mismatches(const std::vector<Label>& labels, const Instances& S,
                             const GroundTruth& truth);

/// Per-group label batch under Tsybakov label noise:
/// ceil(C3 * ln(ln(1/eps)/delta) * (1/eps)^(2 kappa - 2)), at least 1.
std::size_t k_tnc(double epsilon, double delta, double kappa, double c3);

/// Per-group label batch under adversarial label noise: ceil(C3 * ln(ln(1/eps)/delta)), at least 1.
std::size_t k_adv(double epsilon, double delta, double c3);

}  // namespace adgac
