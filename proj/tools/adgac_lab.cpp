// Command-line front end for the simulation laboratory.
//
// Exit codes: 0 success, 1 usage error, 2 runtime error, 3 threshold failure.

#include <CLI11.hpp>

#include <cmath>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>

#include "adgac/bench.hpp"
#include "adgac/theory.hpp"

namespace {

using namespace adgac;

constexpr int kUsage = 1;
constexpr int kRuntime = 2;
constexpr int kThreshold = 3;

struct TrialFlags {
  std::optional<double> eps;
  std::optional<double> delta;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::string config;
  std::string out;
  std::string constants;
  std::optional<double> min_success;
};

void add_trial_flags(CLI::App* cmd, TrialFlags& f) {
  cmd->add_option("--eps", f.eps, "Target error epsilon");
  cmd->add_option("--delta", f.delta, "Failure probability delta");
  cmd->add_option("--trials", f.trials, "Number of seeded trials");
  cmd->add_option("--seed", f.seed, "Base seed; trial i uses seed + i");
  cmd->add_option("--threads", f.threads, "Worker threads (0 = all cores)");
  cmd->add_option("--config", f.config, "Experiment config file (key = value)");
  cmd->add_option("--out", f.out, "CSV report path");
  cmd->add_option("--constants", f.constants, "Tunable constants file");
  cmd->add_option("--min-success", f.min_success, "Exit 3 when the success rate is below this value");
}

ExperimentConfig build_config(const TrialFlags& f, std::optional<Method> method) {
  ExperimentConfig config;
  if (!f.config.empty()) config = load_config(f.config);
  if (method) config.method = *method;
  if (!f.constants.empty()) config.constants = load_constants(f.constants);
  if (f.eps) config.epsilon = *f.eps;
  if (f.delta) config.delta = *f.delta;
  if (f.trials) config.trials = *f.trials;
  if (f.seed) {
    config.seed = *f.seed;
    config.scenario.seed = *f.seed;
  }
  if (f.threads) config.threads = *f.threads;
  if (!f.out.empty()) config.output = f.out;
  config.validate();
  return config;
}

int run_battery(const TrialFlags& f, std::optional<Method> method) {
  const ExperimentConfig config = build_config(f, method);
  const auto reports = run_trials(config);
  const auto summary = summarize(reports, config.epsilon);
  std::cout << format_summary(summary, config);
  if (!config.output.empty()) {
    emit_report(reports, summary, config, config.output);
    std::cout << "report written to " << config.output.string() << "\n";
  }
  if (f.min_success && summary.success_rate < *f.min_success) {
    std::cerr << "success rate " << summary.success_rate << " below " << *f.min_success << "\n";
    return kThreshold;
  }
  return 0;
}

int lemma_check(std::size_t trials, std::size_t max_n, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> size(1, max_n);
  std::size_t violations = 0;
  double worst_slack = std::numeric_limits<double>::infinity();
  for (std::size_t trial = 0; trial < trials; ++trial) {
    LemmaInstance inst;
    const std::size_t n = size(rng);
    for (std::size_t i = 0; i < n; ++i) {
      inst.x.push_back(unit(rng));
      inst.y.push_back(unit(rng));
    }
    inst.t = lemma_constraint_value(inst.x, inst.y);
    const auto r = lemma_min_f(inst);
    worst_slack = std::min(worst_slack, r.bound - r.min_f);
    if (!r.holds) ++violations;
  }
  std::size_t equality_misses = 0;
  for (std::size_t n = 1; n <= max_n; ++n) {
    const auto r = lemma_min_f(lemma_equality_instance(n, 1.0));
    const bool tight = std::abs(r.min_f - r.bound) <= 1e-9;
    std::cout << "equality n=" << n << "  min f = " << std::setprecision(12) << r.min_f
              << "  bound = " << r.bound << (tight ? "  tight" : "  NOT TIGHT") << "\n";
    if (!tight) ++equality_misses;
  }
  std::cout << "random instances: " << trials << ", violations: " << violations
            << ", smallest slack: " << worst_slack << "\n";
  return violations == 0 && equality_misses == 0 ? 0 : kThreshold;
}

int minimax_check(double nu_prime, std::size_t grid, const std::string& base_name, double cut) {
  BaseScore base{parse_dist_kind(base_name), cut};
  const auto ghat = construct_ghat(base, nu_prime);
  const double comp = comparison_error_of(ghat, base, grid);
  const auto scan = best_threshold_error(ghat, base, grid);
  const double tol = 4.0 / static_cast<double>(grid);
  const double root = std::sqrt(nu_prime);
  std::cout << std::setprecision(8) << "interval [a, b] = [" << ghat.a << ", " << ghat.b << "]\n"
            << "comparison error      " << comp << "  (target " << nu_prime << " +- " << tol << ")\n"
            << "best threshold error  " << scan.min_error << "  (target " << root << " +- " << tol
            << ", at t = " << scan.argmin_t << ")\n";
  const bool ok = std::abs(comp - nu_prime) <= tol && std::abs(scan.min_error - root) <= tol;
  return ok ? 0 : kThreshold;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interactive classification with label and comparison oracles"};
  app.require_subcommand(1);

  TrialFlags flags;
  struct Sub {
    const char* name;
    const char* help;
    std::optional<Method> method;
  };
  const Sub battery_commands[] = {
      {"adgac-run", "Label one sample by ranking plus binary search", Method::AdgacOnly},
      {"a2", "A^2 learner with ranking-based labels over a threshold grid", Method::A2Adgac},
      {"margin", "Margin-based halfspace learner", Method::MarginAdgac},
      {"baseline-a2", "Label-only A^2 baseline", Method::BaselineA2},
      {"erm", "Passive empirical-risk minimiser", Method::PassiveErm},
      {"bench", "Battery defined entirely by --config", std::nullopt},
  };
  std::vector<std::pair<CLI::App*, std::optional<Method>>> batteries;
  for (const auto& sub : battery_commands) {
    auto* cmd = app.add_subcommand(sub.name, sub.help);
    add_trial_flags(cmd, flags);
    batteries.emplace_back(cmd, sub.method);
  }
  batteries.back().first->get_option("--config")->required();

  std::size_t lemma_trials = 10000;
  std::size_t lemma_max_n = 8;
  std::uint64_t lemma_seed = 1;
  auto* lemma = app.add_subcommand("lemma-check", "Random and equality instances of the min-f inequality");
  lemma->add_option("--trials", lemma_trials, "Random instances")->capture_default_str();
  lemma->add_option("--max-n", lemma_max_n, "Largest instance length")->capture_default_str()->check(CLI::PositiveNumber);
  lemma->add_option("--seed", lemma_seed, "Seed")->capture_default_str();

  double nu_prime = 0.01;
  std::size_t grid = 10000;
  std::string base_name = "uniform-interval";
  double cut = 0.5;
  auto* minimax = app.add_subcommand("minimax-check", "Worst-case comparison oracle versus best threshold");
  minimax->add_option("--nu-prime", nu_prime, "Comparison error nu'")->capture_default_str();
  minimax->add_option("--grid", grid, "Quantile grid size")->capture_default_str()->check(CLI::PositiveNumber);
  minimax->add_option("--base", base_name, "uniform-interval or isotropic-gaussian")->capture_default_str();
  minimax->add_option("--cut", cut, "Cut point of h*")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    for (const auto& [cmd, method] : batteries) {
      if (cmd->parsed()) return run_battery(flags, method);
    }
    if (lemma->parsed()) return lemma_check(lemma_trials, lemma_max_n, lemma_seed);
    if (minimax->parsed()) return minimax_check(nu_prime, grid, base_name, cut);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}
