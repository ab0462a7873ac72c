#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "adgac/a2.hpp"
#include "adgac/constants.hpp"
#include "adgac/hypothesis.hpp"
#include "adgac/scenario.hpp"

namespace adgac {

enum class Method { AdgacOnly, A2Adgac, MarginAdgac, BaselineA2, PassiveErm };

std::string to_string(Method method);
Method parse_method(const std::string& text);

/// Flat `key = value` text; `#` starts a comment, blank lines are ignored.
std::map<std::string, std::string> parse_key_values(const std::string& text);
std::map<std::string, std::string> read_key_values(const std::filesystem::path& path);

/// Constants file: every key must name a tunable constant.
TunableConstants load_constants(const std::filesystem::path& path);

struct ExperimentConfig {
  ScenarioSpec scenario = make_threshold_scenario();
  Method method = Method::A2Adgac;
  double epsilon = 0.05;
  double delta = 0.1;
  std::size_t trials = 1;
  std::uint64_t seed = 1;
  TunableConstants constants;
  std::filesystem::path output;

  std::size_t grid = 1001;            // threshold class size
  std::size_t n = 1000;               // adgac-only sample size (m = n) and passive-erm labels
  std::size_t k = 0;                  // adgac-only label batch; 0 picks k_adv / k_tnc
  std::size_t error_samples = 100000;  // Monte Carlo draws for achieved error
  std::size_t threads = 0;            // 0 = hardware concurrency
  bool early_exit = true;

  /// Keys understood by `apply`: scenario fields, run fields and any tunable constant name.
  void apply(const std::map<std::string, std::string>& values);
  std::map<std::string, std::string> to_key_values() const;
  /// Throws std::invalid_argument on inconsistent settings, before any sampling happens.
  void validate() const;
};

/// A relative `constants` entry is resolved against the directory of `path`.
ExperimentConfig load_config(const std::filesystem::path& path);

struct TrialReport {
  std::uint64_t seed = 0;
  Method method = Method::A2Adgac;
  double epsilon = 0.0;
  double delta = 0.0;
  double err = 0.0;
  double err_se = 0.0;
  std::uint64_t labels = 0;
  std::uint64_t comparisons = 0;
  int rounds = 0;
  double wall_ms = 0.0;
  std::vector<std::string> flags;

  bool failed() const;
  friend bool operator==(const TrialReport&, const TrialReport&) = default;
};

struct Spread {
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
};

struct BatterySummary {
  std::size_t trials = 0;
  std::size_t failures = 0;
  double success_rate = 0.0;  // achieved error <= epsilon
  Spread err;
  Spread labels;
  Spread comparisons;
  std::uint64_t total_labels = 0;
  std::uint64_t total_comparisons = 0;
};

/// One trial with seed = config.seed + index.
TrialReport run_trial(const ExperimentConfig& config, std::size_t index);

/// Every trial, in index order. Trials run concurrently but results do not depend on scheduling.
std::vector<TrialReport> run_trials(const ExperimentConfig& config);

BatterySummary summarize(const std::vector<TrialReport>& reports, double epsilon);

std::string format_summary(const BatterySummary& summary, const ExperimentConfig& config);

inline constexpr const char* kReportHeader =
    "seed,method,epsilon,delta,err,err_se,labels,comparisons,rounds,wall_ms,flags";

std::string to_csv(const std::vector<TrialReport>& reports);
std::vector<TrialReport> parse_csv(const std::string& text);

/// Writes `path` (CSV), `path`.summary.txt and `path`.config.
void emit_report(const std::vector<TrialReport>& reports, const BatterySummary& summary,
                 const ExperimentConfig& config, const std::filesystem::path& path);

std::vector<TrialReport> read_report(const std::filesystem::path& path);

/// Writes `contents` to a sibling temporary file and renames it over `path`.
void write_file_atomically(const std::filesystem::path& path, const std::string& contents);

struct ErmResult {
  std::size_t hypothesis = 0;
  std::uint64_t labels = 0;
};

/// Empirical-error minimiser on n direct labels; ties go to the lowest index.
template <HypothesisClass C, QueryOracle O>
ErmResult passive_erm(const ScenarioSpec& spec, const C& cls, std::size_t n, O& oracle, Rng& rng) {
  if (n < 1) throw std::invalid_argument("passive_erm: n must be >= 1");
  Instances xs = sample_unlabeled(spec, n, rng);
  std::vector<Label> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = oracle.label(xs.col(static_cast<Eigen::Index>(i)));
  const auto w = make_dataset(std::move(xs), std::move(labels), Provenance::OracleDirect);
  const auto v = full_version_space(cls);
  const auto counts = mistake_counts(cls, v, w);
  const auto best = std::min_element(counts.begin(), counts.end()) - counts.begin();
  return {v.survivors[static_cast<std::size_t>(best)], n};
}

}  // namespace adgac
