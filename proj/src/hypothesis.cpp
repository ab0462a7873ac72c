#include "adgac/hypothesis.hpp"

#include <algorithm>
#include <numeric>

namespace adgac {

ThresholdClass::ThresholdClass(std::vector<double> grid) : grid_(std::move(grid)) {
  if (grid_.empty()) throw std::invalid_argument("ThresholdClass: empty grid");
  if (!std::is_sorted(grid_.begin(), grid_.end())) {
    throw std::invalid_argument("ThresholdClass: grid must be sorted");
  }
}

ThresholdClass ThresholdClass::uniform_grid(std::size_t count, double lo, double hi) {
  if (count == 0) throw std::invalid_argument("ThresholdClass: empty grid");
  std::vector<double> grid(count);
  if (count == 1) {
    grid[0] = 0.5 * (lo + hi);
  } else {
    const double step = (hi - lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) grid[i] = lo + step * static_cast<double>(i);
  }
  return ThresholdClass(std::move(grid));
}

FiniteClass::FiniteClass(std::vector<Predictor> hypotheses) : hypotheses_(std::move(hypotheses)) {
  if (hypotheses_.empty()) throw std::invalid_argument("FiniteClass: empty class");
}

FiniteClass FiniteClass::halfspaces(const std::vector<Eigen::VectorXd>& weights) {
  std::vector<Predictor> hs;
  hs.reserve(weights.size());
  for (const auto& w : weights) {
    hs.emplace_back([w](const Eigen::Ref<const Eigen::VectorXd>& x) { return sign_label(w.dot(x)); });
  }
  return FiniteClass(std::move(hs));
}

bool VersionSpace::is_interval() const {
  for (std::size_t j = 1; j < survivors.size(); ++j) {
    if (survivors[j] != survivors[j - 1] + 1) return false;
  }
  return true;
}

LabeledDataset make_dataset(Instances points, std::vector<Label> labels, Provenance source) {
  if (static_cast<std::size_t>(points.cols()) != labels.size()) {
    throw std::invalid_argument("make_dataset: point and label counts differ");
  }
  LabeledDataset w;
  w.provenance.assign(labels.size(), source);
  w.points = std::move(points);
  w.labels = std::move(labels);
  return w;
}

std::vector<std::size_t> mistake_counts(const ThresholdClass& cls, const VersionSpace& v,
                                        const LabeledDataset& w) {
  const std::size_t n = w.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return w.points(0, static_cast<Eigen::Index>(a)) < w.points(0, static_cast<Eigen::Index>(b));
  });
  std::vector<double> xs(n);
  std::vector<std::size_t> pos_prefix(n + 1, 0);
  std::vector<std::size_t> neg_prefix(n + 1, 0);
  for (std::size_t r = 0; r < n; ++r) {
    xs[r] = w.points(0, static_cast<Eigen::Index>(order[r]));
    const bool positive = w.labels[order[r]] > 0;
    pos_prefix[r + 1] = pos_prefix[r] + (positive ? 1 : 0);
    neg_prefix[r + 1] = neg_prefix[r] + (positive ? 0 : 1);
  }
  std::vector<std::size_t> counts(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double t = cls.threshold(v.survivors[j]);
    // Points with x <= t are predicted -1.
    const auto below = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), t) - xs.begin());
    counts[j] = pos_prefix[below] + (neg_prefix[n] - neg_prefix[below]);
  }
  return counts;
}

}  // namespace adgac
