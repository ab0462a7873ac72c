#include "adgac/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "adgac/margin.hpp"

namespace adgac {

std::string to_string(Method method) {
  switch (method) {
    case Method::AdgacOnly: return "adgac-only";
    case Method::A2Adgac: return "a2-adgac";
    case Method::MarginAdgac: return "margin-adgac";
    case Method::BaselineA2: return "baseline-a2";
    case Method::PassiveErm: return "passive-erm";
  }
  return "unknown";
}

Method parse_method(const std::string& text) {
  for (const Method m : {Method::AdgacOnly, Method::A2Adgac, Method::MarginAdgac, Method::BaselineA2,
                         Method::PassiveErm}) {
    if (to_string(m) == text) return m;
  }
  throw std::invalid_argument("unknown method '" + text + "'");
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string format_double(double v) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, result.ptr);
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const std::string t = trim(text);
  const auto result = std::from_chars(t.data(), t.data() + t.size(), v);
  if (result.ec != std::errc() || result.ptr != t.data() + t.size()) {
    if (t == "nan") return std::nan("");
    throw std::invalid_argument("'" + key + "': expected a number, got '" + text + "'");
  }
  return v;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const std::string t = trim(text);
  const auto result = std::from_chars(t.data(), t.data() + t.size(), v);
  if (result.ec != std::errc() || result.ptr != t.data() + t.size()) {
    throw std::invalid_argument("'" + key + "': expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw std::invalid_argument("'" + key + "': expected true or false, got '" + text + "'");
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, sep)) parts.push_back(part);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("line " + std::to_string(number) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw std::invalid_argument("line " + std::to_string(number) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

std::map<std::string, std::string> read_key_values(const std::filesystem::path& path) {
  try {
    return parse_key_values(read_text(path));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

TunableConstants load_constants(const std::filesystem::path& path) {
  TunableConstants c;
  std::map<std::string, double> values;
  for (const auto& [key, value] : read_key_values(path)) values[key] = parse_double(key, value);
  c.apply(values);
  c.validate();
  return c;
}

void ExperimentConfig::apply(const std::map<std::string, std::string>& values) {
  const auto known_constants = constants.to_map();
  std::map<std::string, double> constant_overrides;
  bool rebuild_truth = false;
  double t_star = scenario.dist == DistKind::UniformInterval ? scenario.truth.offset : 0.5;
  Eigen::VectorXd w_star = scenario.truth.weights;

  for (const auto& [key, value] : values) {
    if (key == "method") {
      method = parse_method(value);
    } else if (key == "dist") {
      scenario.dist = parse_dist_kind(value);
      rebuild_truth = true;
    } else if (key == "dimension") {
      scenario.dimension = static_cast<int>(parse_unsigned(key, value));
      rebuild_truth = true;
    } else if (key == "t_star") {
      t_star = parse_double(key, value);
      rebuild_truth = true;
    } else if (key == "w_star") {
      const auto parts = split(value, ',');
      w_star.resize(static_cast<Eigen::Index>(parts.size()));
      for (std::size_t i = 0; i < parts.size(); ++i) w_star(static_cast<Eigen::Index>(i)) = parse_double(key, parts[i]);
      rebuild_truth = true;
    } else if (key == "label_noise") {
      scenario.label_noise.kind = parse_label_noise_kind(value);
    } else if (key == "kappa") {
      scenario.label_noise.kappa = parse_double(key, value);
    } else if (key == "mu_tilde") {
      scenario.label_noise.mu_tilde = parse_double(key, value);
    } else if (key == "massart_flip") {
      scenario.label_noise.massart_flip = parse_double(key, value);
    } else if (key == "nu") {
      scenario.label_noise.nu = parse_double(key, value);
    } else if (key == "comparison_noise") {
      scenario.comparison_noise.kind = parse_comparison_noise_kind(value);
    } else if (key == "nu_prime") {
      scenario.comparison_noise.nu_prime = parse_double(key, value);
    } else if (key == "epsilon") {
      epsilon = parse_double(key, value);
    } else if (key == "delta") {
      delta = parse_double(key, value);
    } else if (key == "trials") {
      trials = parse_unsigned(key, value);
    } else if (key == "seed") {
      seed = parse_unsigned(key, value);
    } else if (key == "output") {
      output = value;
    } else if (key == "grid") {
      grid = parse_unsigned(key, value);
    } else if (key == "n") {
      n = parse_unsigned(key, value);
    } else if (key == "k") {
      k = parse_unsigned(key, value);
    } else if (key == "error_samples") {
      error_samples = parse_unsigned(key, value);
    } else if (key == "threads") {
      threads = parse_unsigned(key, value);
    } else if (key == "early_exit") {
      early_exit = parse_bool(key, value);
    } else if (key == "constants") {
      constants = load_constants(value);
    } else if (known_constants.count(key) != 0) {
      constant_overrides[key] = parse_double(key, value);
    } else {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }
  constants.apply(constant_overrides);

  if (rebuild_truth) {
    const ScenarioSpec fresh = scenario.dist == DistKind::UniformInterval
                                   ? make_threshold_scenario(t_star)
                                   : make_halfspace_scenario(w_star.size() == scenario.dimension
                                                                 ? w_star
                                                                 : Eigen::VectorXd::Ones(scenario.dimension));
    scenario.truth = fresh.truth;
    if (scenario.dist == DistKind::UniformInterval) scenario.dimension = 1;
  }
  scenario.seed = seed;
}

std::map<std::string, std::string> ExperimentConfig::to_key_values() const {
  std::map<std::string, std::string> out;
  out["method"] = to_string(method);
  out["dist"] = to_string(scenario.dist);
  out["dimension"] = std::to_string(scenario.dimension);
  if (scenario.dist == DistKind::UniformInterval) {
    out["t_star"] = format_double(scenario.truth.offset);
  } else {
    std::vector<std::string> parts;
    for (Eigen::Index i = 0; i < scenario.truth.weights.size(); ++i) parts.push_back(format_double(scenario.truth.weights(i)));
    out["w_star"] = join(parts, ',');
  }
  out["label_noise"] = to_string(scenario.label_noise.kind);
  out["kappa"] = format_double(scenario.label_noise.kappa);
  out["mu_tilde"] = format_double(scenario.label_noise.mu_tilde);
  out["massart_flip"] = format_double(scenario.label_noise.massart_flip);
  out["nu"] = format_double(scenario.label_noise.nu);
  out["comparison_noise"] = to_string(scenario.comparison_noise.kind);
  out["nu_prime"] = format_double(scenario.comparison_noise.nu_prime);
  out["epsilon"] = format_double(epsilon);
  out["delta"] = format_double(delta);
  out["trials"] = std::to_string(trials);
  out["seed"] = std::to_string(seed);
  out["grid"] = std::to_string(grid);
  out["n"] = std::to_string(n);
  out["k"] = std::to_string(k);
  out["error_samples"] = std::to_string(error_samples);
  out["early_exit"] = early_exit ? "true" : "false";
  if (!output.empty()) out["output"] = output.string();
  for (const auto& [key, value] : constants.to_map()) out[key] = format_double(value);
  return out;
}

void ExperimentConfig::validate() const {
  scenario.validate();
  constants.validate();
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (error_samples < 1) throw std::invalid_argument("error_samples must be >= 1");
  switch (method) {
    case Method::MarginAdgac:
      if (scenario.dist != DistKind::IsotropicGaussian) {
        throw std::invalid_argument("margin-adgac requires dist = isotropic-gaussian");
      }
      break;
    case Method::A2Adgac:
    case Method::BaselineA2:
    case Method::PassiveErm:
      if (scenario.dimension != 1) throw std::invalid_argument(to_string(method) + " requires dimension = 1");
      if (grid < 1) throw std::invalid_argument("grid must be >= 1");
      if (method == Method::PassiveErm && n < 1) throw std::invalid_argument("n must be >= 1");
      break;
    case Method::AdgacOnly:
      if (n < 1) throw std::invalid_argument("n must be >= 1");
      if (!(epsilon < 0.5) && k == 0) throw std::invalid_argument("epsilon must be < 1/2 to derive k");
      break;
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  ExperimentConfig config;
  try {
    auto values = read_key_values(path);
    // A relative constants path is resolved against the config file's directory.
    if (auto it = values.find("constants"); it != values.end() && std::filesystem::path(it->second).is_relative()) {
      it->second = (path.parent_path() / it->second).string();
    }
    config.apply(values);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
  return config;
}

bool TrialReport::failed() const {
  return std::any_of(flags.begin(), flags.end(), [](const std::string& f) { return f.rfind("error", 0) == 0; });
}

namespace {

ThresholdClass threshold_class_for(const ExperimentConfig& config) {
  return config.scenario.dist == DistKind::UniformInterval ? ThresholdClass::uniform_grid(config.grid, 0.0, 1.0)
                                                           : ThresholdClass::uniform_grid(config.grid, -4.0, 4.0);
}

/// Fraction of fresh draws where `predict` disagrees with h*.
template <typename Predict>
std::pair<double, double> disagreement(const ExperimentConfig& config, Predict&& predict, Rng& rng) {
  const Instances xs = sample_unlabeled(config.scenario, config.error_samples, rng);
  std::size_t wrong = 0;
  for (Eigen::Index j = 0; j < xs.cols(); ++j) {
    if (predict(xs.col(j)) != config.scenario.truth.label(xs.col(j))) ++wrong;
  }
  const auto n = static_cast<double>(xs.cols());
  const double p = static_cast<double>(wrong) / n;
  return {p, std::sqrt(p * (1.0 - p) / n)};
}

std::string sanitize(std::string text) {
  std::replace_if(text.begin(), text.end(), [](char c) { return c == ',' || c == ';' || c == '\n' || c == '\r'; }, ' ');
  return text;
}

void run_method(const ExperimentConfig& config, TrialReport& report, Oracle& oracle, Rng& rng, Rng& eval_rng) {
  RunParams params;
  params.epsilon = config.epsilon;
  params.delta = config.delta;
  params.constants = config.constants;
  params.early_exit_singleton = config.early_exit;

  switch (config.method) {
    case Method::AdgacOnly: {
      const Instances S = sample_unlabeled(config.scenario, config.n, rng);
      const std::size_t k = config.k > 0 ? config.k
                                         : label_batch(config.epsilon, config.delta, noise_model_of(config.scenario),
                                                       config.constants);
      const auto result = adgac(S, config.n, config.epsilon, k, oracle, rng);
      const double p = static_cast<double>(count_mismatches(result.labels, S, config.scenario.truth)) /
                       static_cast<double>(config.n);
      report.err = p;
      report.err_se = std::sqrt(p * (1.0 - p) / static_cast<double>(config.n));
      report.rounds = 1;
      break;
    }
    case Method::A2Adgac:
    case Method::BaselineA2: {
      const auto cls = threshold_class_for(config);
      const auto result = config.method == Method::A2Adgac ? run_a2_adgac(config.scenario, cls, params, oracle, rng)
                                                           : run_baseline_a2(config.scenario, cls, params, oracle, rng);
      std::tie(report.err, report.err_se) =
          disagreement(config, [&](const auto& x) { return cls.predict(result.hypothesis, x); }, eval_rng);
      report.rounds = result.rounds;
      break;
    }
    case Method::MarginAdgac: {
      MarginParams margin;
      margin.run = params;
      const auto result = run_margin_adgac(config.scenario, margin, oracle, rng);
      std::tie(report.err, report.err_se) =
          disagreement(config, [&](const auto& x) { return sign_label(result.w.dot(x)); }, eval_rng);
      report.rounds = result.rounds;
      report.flags.insert(report.flags.end(), result.flags.begin(), result.flags.end());
      break;
    }
    case Method::PassiveErm: {
      const auto cls = threshold_class_for(config);
      const auto result = passive_erm(config.scenario, cls, config.n, oracle, rng);
      std::tie(report.err, report.err_se) =
          disagreement(config, [&](const auto& x) { return cls.predict(result.hypothesis, x); }, eval_rng);
      report.rounds = 1;
      break;
    }
  }
}

}  // namespace

TrialReport run_trial(const ExperimentConfig& config, std::size_t index) {
  TrialReport report;
  report.seed = config.seed + index;
  report.method = config.method;
  report.epsilon = config.epsilon;
  report.delta = config.delta;
  const auto start = std::chrono::steady_clock::now();
  try {
    ScenarioSpec spec = config.scenario;
    spec.seed = report.seed;
    Oracle oracle(spec, derive_seed(report.seed, 1));
    Rng rng(derive_seed(report.seed, 2));
    Rng eval_rng(derive_seed(report.seed, 3));
    report.flags = gate_flags(spec, config.epsilon, config.delta, config.constants);
    run_method(config, report, oracle, rng, eval_rng);
    report.labels = oracle.counters().labels;
    report.comparisons = oracle.counters().comparisons;
  } catch (const std::exception& e) {
    report.err = std::nan("");
    report.err_se = std::nan("");
    report.flags.push_back("error " + sanitize(e.what()));
  }
  report.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::vector<TrialReport> run_trials(const ExperimentConfig& config) {
  config.validate();
  std::vector<TrialReport> reports(config.trials);
  std::size_t workers = config.threads > 0 ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, config.trials);
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < config.trials; i = next++) reports[i] = run_trial(config, i);
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return reports;
}

namespace {

Spread spread_of(std::vector<double> values) {
  if (values.empty()) return {std::nan(""), std::nan(""), std::nan("")};
  return {median(values), quantile(values, 0.25), quantile(values, 0.75)};
}

}  // namespace

BatterySummary summarize(const std::vector<TrialReport>& reports, double epsilon) {
  BatterySummary s;
  s.trials = reports.size();
  std::vector<double> errs;
  std::vector<double> labels;
  std::vector<double> comps;
  std::size_t successes = 0;
  for (const auto& r : reports) {
    s.total_labels += r.labels;
    s.total_comparisons += r.comparisons;
    if (r.failed()) {
      ++s.failures;
      continue;
    }
    errs.push_back(r.err);
    labels.push_back(static_cast<double>(r.labels));
    comps.push_back(static_cast<double>(r.comparisons));
    if (r.err <= epsilon) ++successes;
  }
  s.success_rate = s.trials == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(s.trials);
  s.err = spread_of(errs);
  s.labels = spread_of(labels);
  s.comparisons = spread_of(comps);
  return s;
}

std::string format_summary(const BatterySummary& s, const ExperimentConfig& config) {
  std::ostringstream out;
  out << "method        " << to_string(config.method) << "\n"
      << "epsilon       " << config.epsilon << "\n"
      << "delta         " << config.delta << "\n"
      << "trials        " << s.trials << " (" << s.failures << " failed)\n"
      << "success rate  " << std::fixed << std::setprecision(3) << s.success_rate << "\n\n";
  out << std::left << std::setw(13) << "" << std::right << std::setw(14) << "median" << std::setw(14) << "q25"
      << std::setw(14) << "q75" << "\n";
  const auto row = [&](const char* name, const Spread& v, int precision) {
    out << std::left << std::setw(13) << name << std::right << std::fixed << std::setprecision(precision)
        << std::setw(14) << v.median << std::setw(14) << v.q25 << std::setw(14) << v.q75 << "\n";
  };
  row("error", s.err, 5);
  row("labels", s.labels, 1);
  row("comparisons", s.comparisons, 1);
  out << "\ntotal labels       " << s.total_labels << "\n"
      << "total comparisons  " << s.total_comparisons << "\n";
  return out.str();
}

std::string to_csv(const std::vector<TrialReport>& reports) {
  std::ostringstream out;
  out << kReportHeader << "\n";
  for (const auto& r : reports) {
    out << r.seed << ',' << to_string(r.method) << ',' << format_double(r.epsilon) << ','
        << format_double(r.delta) << ',' << format_double(r.err) << ',' << format_double(r.err_se) << ','
        << r.labels << ',' << r.comparisons << ',' << r.rounds << ',' << format_double(r.wall_ms) << ','
        << join(r.flags, ';') << "\n";
  }
  return out.str();
}

std::vector<TrialReport> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || trim(line) != kReportHeader) {
    throw std::invalid_argument("report: unexpected header");
  }
  std::vector<TrialReport> out;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 11) throw std::invalid_argument("report: expected 11 fields in '" + line + "'");
    TrialReport r;
    r.seed = parse_unsigned("seed", f[0]);
    r.method = parse_method(f[1]);
    r.epsilon = parse_double("epsilon", f[2]);
    r.delta = parse_double("delta", f[3]);
    r.err = parse_double("err", f[4]);
    r.err_se = parse_double("err_se", f[5]);
    r.labels = parse_unsigned("labels", f[6]);
    r.comparisons = parse_unsigned("comparisons", f[7]);
    r.rounds = static_cast<int>(parse_unsigned("rounds", f[8]));
    r.wall_ms = parse_double("wall_ms", f[9]);
    if (!f[10].empty()) r.flags = split(f[10], ';');
    out.push_back(std::move(r));
  }
  return out;
}

void write_file_atomically(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

void emit_report(const std::vector<TrialReport>& reports, const BatterySummary& summary,
                 const ExperimentConfig& config, const std::filesystem::path& path) {
  if (reports.empty()) throw std::invalid_argument("emit_report: no reports");
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  write_file_atomically(path, to_csv(reports));
  auto summary_path = path;
  summary_path += ".summary.txt";
  write_file_atomically(summary_path, format_summary(summary, config));
  std::ostringstream sidecar;
  for (const auto& [key, value] : config.to_key_values()) sidecar << key << " = " << value << "\n";
  auto config_path = path;
  config_path += ".config";
  write_file_atomically(config_path, sidecar.str());
}

std::vector<TrialReport> read_report(const std::filesystem::path& path) {
  try {
    return parse_csv(read_text(path));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

}  // namespace adgac
