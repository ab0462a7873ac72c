#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "adgac/adgac.hpp"
#include "adgac/constants.hpp"
#include "adgac/hypothesis.hpp"

namespace adgac {

class BudgetExceededError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// U(n, gamma) = c0 (d ln(n/d) + ln(1/gamma)) / n.
double vc_bound_u(double n, double gamma, double d, double c0);

/// How label batches and sample sizes are chosen: Tsybakov exponent kappa (massart is kappa = 1)
/// or the adversarial label-noise schedule.
struct NoiseModel {
  bool adversarial = false;
  double kappa = 1.0;
};

NoiseModel noise_model_of(const ScenarioSpec& spec);

/// Failure probability allotted to each round: delta / (share * log2(1/eps)).
double per_round_delta(double epsilon, double delta, double share);

/// Per-round label batch: k_adv or k_tnc at (eps_i, delta_i).
std::size_t label_batch(double epsilon_i, double delta_i, const NoiseModel& noise,
                        const TunableConstants& constants);

/// Target error of round i (1-based): 2^-(i+2).
inline double a2_round_epsilon(int round) { return std::ldexp(1.0, -(round + 2)); }

/// Number of rounds ceil(log2(1/eps)).
int a2_rounds(double epsilon);

/// Unlabeled sample size of round i: the smallest n with U(n, delta/(4 log2(1/eps))) <= eps_i, maxed
/// with the Tsybakov term (1/eps_i)^(2 kappa - 1) ln(1/delta) and scaled by the multipliers.
/// Throws BudgetExceededError when the result exceeds `budget`.
std::size_t choose_n_i(int round, double epsilon, double delta, double vc_dim,
                       const NoiseModel& noise, const TunableConstants& constants,
                       std::size_t budget);

/// Gate violations for the noise tolerances the guarantees assume (empty when all hold).
std::vector<std::string> gate_flags(const ScenarioSpec& spec, double epsilon, double delta,
                                    const TunableConstants& constants);

struct RunParams {
  double epsilon = 0.05;
  double delta = 0.1;
  TunableConstants constants;
  std::uint64_t max_labels = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t max_comparisons = std::numeric_limits<std::uint64_t>::max();
  std::size_t max_round_samples = 50'000'000;
  bool early_exit_singleton = true;

  void validate() const;
};

struct RoundTrace {
  int round = 0;
  std::size_t n_i = 0;
  std::size_t subset = 0;  // |S|
  std::uint64_t labels = 0;
  std::uint64_t comparisons = 0;
  std::size_t version_space = 0;
  double epsilon_i = 0.0;
  std::size_t k_i = 0;
  std::size_t groups = 0;
};

struct A2Result {
  std::size_t hypothesis = 0;
  std::vector<RoundTrace> trace;
  QueryCounters queries;
  int rounds = 0;
  VersionSpace version_space;
};

namespace detail {

inline void check_budget(const QueryCounters& q, const RunParams& params) {
  if (q.labels > params.max_labels) throw BudgetExceededError("label budget exceeded");
  if (q.comparisons > params.max_comparisons) throw BudgetExceededError("comparison budget exceeded");
}

template <HypothesisClass C>
Instances restrict_to_disagreement(const C& cls, const VersionSpace& v, const Instances& sample) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < sample.cols(); ++j) {
    if (in_disagreement_region(cls, v, sample.col(j))) keep.push_back(j);
  }
  Instances out(sample.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = sample.col(keep[c]);
  return out;
}

double vc_dimension_of(const ThresholdClass&);

template <HypothesisClass C>
double vc_dimension_of(const C& cls) {
  return std::max(1.0, std::log2(static_cast<double>(cls.size())));
}

/// Shared round loop; `label_round` turns S into a labeled dataset and the filtered version space.
template <HypothesisClass C, typename LabelRound>
A2Result run_rounds(const ScenarioSpec& spec, const C& cls, const RunParams& params, Rng& rng,
                    LabelRound&& label_round) {
  params.validate();
  const NoiseModel noise = noise_model_of(spec);
  const double vc_dim = vc_dimension_of(cls);
  A2Result out;
  out.version_space = full_version_space(cls);
  const int total_rounds = a2_rounds(params.epsilon);
  for (int i = 1; i <= total_rounds; ++i) {
    if (params.early_exit_singleton && out.version_space.size() == 1) break;
    RoundTrace row;
    row.round = i;
    row.epsilon_i = a2_round_epsilon(i);
    row.n_i = choose_n_i(i, params.epsilon, params.delta, vc_dim, noise, params.constants,
                         params.max_round_samples);
    const Instances sample = sample_unlabeled(spec, row.n_i, rng);
    const Instances subset = restrict_to_disagreement(cls, out.version_space, sample);
    row.subset = static_cast<std::size_t>(subset.cols());
    if (row.subset > 0) {
      label_round(subset, row, out.version_space);
    }
    row.version_space = out.version_space.size();
    out.queries.labels += row.labels;
    out.queries.comparisons += row.comparisons;
    out.trace.push_back(row);
    out.rounds = i;
    check_budget(out.queries, params);
  }
  out.hypothesis = out.version_space.survivors.front();
  return out;
}

}  // namespace detail

/// A^2 with every round's labels produced by the ranking-plus-binary-search subroutine.
/// Survivors must satisfy |W| err_W(h) < n_i eps_i.
template <HypothesisClass C, QueryOracle O>
A2Result run_a2_adgac(const ScenarioSpec& spec, const C& cls, const RunParams& params, O& oracle,
                      Rng& rng) {
  const NoiseModel noise = noise_model_of(spec);
  const double delta_i = per_round_delta(params.epsilon, params.delta, 4.0);
  return detail::run_rounds(spec, cls, params, rng,
                            [&](const Instances& subset, RoundTrace& row, VersionSpace& v) {
                              row.k_i = label_batch(row.epsilon_i, delta_i, noise, params.constants);
                              auto labeled = adgac(subset, row.n_i, row.epsilon_i, row.k_i, oracle, rng);
                              row.labels = labeled.label_queries;
                              row.comparisons = labeled.comparison_queries;
                              row.groups = labeled.groups;
                              const auto w = make_dataset(subset, std::move(labeled.labels),
                                                          Provenance::AdgacPredicted);
                              v = filter_version_space(cls, v, w,
                                                       static_cast<double>(row.n_i) * row.epsilon_i);
                            });
}

/// Label-only A^2: every x in S is sent to the labeling oracle. Survivors must satisfy
/// |W| err_W(h) < min_h' |W| err_W(h') + n_i eps_i, which reduces to the plain rule when some
/// survivor fits W exactly.
template <HypothesisClass C, QueryOracle O>
A2Result run_baseline_a2(const ScenarioSpec& spec, const C& cls, const RunParams& params, O& oracle,
                         Rng& rng) {
  return detail::run_rounds(
      spec, cls, params, rng, [&](const Instances& subset, RoundTrace& row, VersionSpace& v) {
        std::vector<Label> labels(static_cast<std::size_t>(subset.cols()));
        for (Eigen::Index j = 0; j < subset.cols(); ++j) {
          labels[static_cast<std::size_t>(j)] = oracle.label(subset.col(j));
        }
        row.labels = labels.size();
        const auto w = make_dataset(subset, std::move(labels), Provenance::OracleDirect);
        const auto counts = mistake_counts(cls, v, w);
        const auto best = *std::min_element(counts.begin(), counts.end());
        v = filter_version_space(cls, v, w,
                                 static_cast<double>(best) + static_cast<double>(row.n_i) * row.epsilon_i);
      });
}

}  // namespace adgac
