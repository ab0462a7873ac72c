#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "adgac/bench.hpp"

using namespace adgac;

namespace {

std::vector<TrialReport> without_times(std::vector<TrialReport> reports) {
  for (auto& r : reports) r.wall_ms = 0.0;
  return reports;
}

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / "adgac_bench_test";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("key-value parsing") {
    const auto kv = parse_key_values("# comment\nmethod = baseline-a2\n\n  epsilon=0.1  # trailing\n");
    CHECK(kv.at("method") == "baseline-a2");
    CHECK(kv.at("epsilon") == "0.1");
    CHECK(kv.size() == 2);
    CHECK_THROWS_AS(parse_key_values("no equals sign"), std::invalid_argument);
  }

  TEST_CASE("apply and echo") {
    ExperimentConfig c;
    c.apply(parse_key_values("method = margin-adgac\ndist = isotropic-gaussian\ndimension = 3\n"
                             "w_star = 1, 0, 0\nlabel_noise = massart\nmassart_flip = 0.2\nC3 = 4\ntrials = 7\n"));
    CHECK(c.method == Method::MarginAdgac);
    CHECK(c.scenario.dimension == 3);
    CHECK(c.scenario.label_noise.massart_flip == 0.2);
    CHECK(c.constants.C3 == 4.0);
    CHECK(c.trials == 7);
    c.validate();
    ExperimentConfig again;
    again.apply(c.to_key_values());
    CHECK(again.to_key_values() == c.to_key_values());
  }

  TEST_CASE("unknown keys and bad values") {
    ExperimentConfig c;
    CHECK_THROWS_AS(c.apply({{"nonsense", "1"}}), std::invalid_argument);
    CHECK_THROWS_AS(c.apply({{"epsilon", "abc"}}), std::invalid_argument);
    CHECK_THROWS_AS(c.apply({{"method", "sgd"}}), std::invalid_argument);
  }

  TEST_CASE("method compatibility is checked before sampling") {
    ExperimentConfig c;
    c.method = Method::MarginAdgac;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    CHECK_THROWS_AS(run_trials(c), std::invalid_argument);
    c.method = Method::A2Adgac;
    c.trials = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  }

  TEST_CASE("relative constants path follows the config file") {
    const auto dir = scratch_dir() / "nested";
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "k.conf") << "C3 = 7\n";
    std::ofstream(dir / "run.conf") << "method = baseline-a2\nconstants = k.conf\n";
    const auto c = load_config(dir / "run.conf");
    CHECK(c.constants.C3 == 7.0);
    CHECK(c.method == Method::BaselineA2);
  }

  TEST_CASE("constants file") {
    const auto path = scratch_dir() / "constants.conf";
    std::ofstream(path) << "C3 = 2.5\nc0 = 0.5\n";
    const auto c = load_constants(path);
    CHECK(c.C3 == 2.5);
    CHECK(c.c0 == 0.5);
    std::ofstream(path) << "C9 = 1\n";
    CHECK_THROWS_AS(load_constants(path), std::invalid_argument);
  }
}

TEST_SUITE("batteries") {
  TEST_CASE("fixed seeds give identical reports") {
    for (const auto method : {Method::AdgacOnly, Method::A2Adgac, Method::BaselineA2, Method::PassiveErm}) {
      ExperimentConfig c;
      c.method = method;
      c.trials = 3;
      c.error_samples = 2000;
      c.scenario.label_noise.massart_flip = 0.1;
      c.threads = 2;
      const auto a = without_times(run_trials(c));
      c.threads = 1;
      const auto b = without_times(run_trials(c));
      CHECK(a == b);
      CHECK(a[1].seed == c.seed + 1);
      CHECK(to_csv(a) == to_csv(b));
    }
  }

  TEST_CASE("margin trials are reproducible") {
    ExperimentConfig c;
    c.method = Method::MarginAdgac;
    c.scenario = make_halfspace_scenario(Eigen::Vector2d(1, 1));
    c.epsilon = 0.1;
    c.delta = 0.2;
    c.trials = 2;
    c.error_samples = 2000;
    CHECK(without_times(run_trials(c)) == without_times(run_trials(c)));
  }

  TEST_CASE("counters are conserved in the summary") {
    ExperimentConfig c;
    c.trials = 5;
    c.error_samples = 1000;
    const auto reports = run_trials(c);
    const auto s = summarize(reports, c.epsilon);
    std::uint64_t labels = 0;
    std::uint64_t comps = 0;
    for (const auto& r : reports) {
      labels += r.labels;
      comps += r.comparisons;
    }
    CHECK(s.total_labels == labels);
    CHECK(s.total_comparisons == comps);
    CHECK(s.trials == 5);
  }

  TEST_CASE("trial errors are recorded, not thrown") {
    ExperimentConfig c;
    c.trials = 2;
    c.error_samples = 1000;
    c.constants.a2_n_multiplier = 1e12;  // exceeds the per-round sample cap
    const auto reports = run_trials(c);
    for (const auto& r : reports) {
      CHECK(r.failed());
      CHECK(std::isnan(r.err));
    }
    const auto s = summarize(reports, c.epsilon);
    CHECK(s.failures == 2);
    CHECK(s.success_rate == 0.0);
  }

  TEST_CASE("noiseless ranking-only battery") {
    ExperimentConfig c;
    c.method = Method::AdgacOnly;
    c.k = 5;
    c.trials = 20;
    const auto s = summarize(run_trials(c), c.epsilon);
    CHECK(s.success_rate >= 0.95);
  }

  TEST_CASE("baseline makes no comparisons") {
    ExperimentConfig c;
    c.method = Method::BaselineA2;
    c.trials = 3;
    c.error_samples = 1000;
    for (const auto& r : run_trials(c)) CHECK(r.comparisons == 0);
  }
}

TEST_SUITE("passive erm") {
  TEST_CASE("ties go to the lowest index") {
    // Both thresholds classify the single negative point at 0.9 identically wrong or right.
    const ThresholdClass cls({0.95, 0.99});
    const auto spec = make_threshold_scenario(0.97);
    Oracle oracle(spec, 1);
    Rng rng(2);
    const auto out = passive_erm(spec, cls, 1, oracle, rng);
    CHECK(out.labels == 1);
  }

  TEST_CASE("one label leaves error at most one half") {
    const auto spec = make_threshold_scenario(0.5);
    const auto cls = ThresholdClass::uniform_grid(101);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      Oracle oracle(spec, seed);
      Rng rng(seed);
      const auto out = passive_erm(spec, cls, 1, oracle, rng);
      REQUIRE(std::abs(cls.threshold(out.hypothesis) - 0.5) <= 0.5 + 1e-12);
    }
  }

  TEST_CASE("many labels recover h*") {
    const auto spec = make_threshold_scenario(0.3);
    const auto cls = ThresholdClass::uniform_grid(101);
    Oracle oracle(spec, 4);
    Rng rng(4);
    const auto out = passive_erm(spec, cls, 20000, oracle, rng);
    CHECK(cls.threshold(out.hypothesis) == doctest::Approx(0.3));
  }

  TEST_CASE("explicit tie") {
    const FiniteClass cls({[](const Eigen::Ref<const Eigen::VectorXd>&) -> Label { return 1; },
                           [](const Eigen::Ref<const Eigen::VectorXd>&) -> Label { return 1; }});
    Oracle oracle(make_threshold_scenario(0.5), 1);
    Rng rng(1);
    CHECK(passive_erm(make_threshold_scenario(0.5), cls, 10, oracle, rng).hypothesis == 0);
    CHECK_THROWS_AS(passive_erm(make_threshold_scenario(0.5), cls, 0, oracle, rng), std::invalid_argument);
  }
}

TEST_SUITE("reports") {
  TEST_CASE("header and column order") {
    CHECK(std::string(kReportHeader) == "seed,method,epsilon,delta,err,err_se,labels,comparisons,rounds,wall_ms,flags");
    const TrialReport r{7, Method::BaselineA2, 0.05, 0.1, 0.01, 0.001, 12, 0, 3, 1.5, {"a", "b"}};
    CHECK(to_csv({r}) == std::string(kReportHeader) + "\n7,baseline-a2,0.05,0.1,0.01,0.001,12,0,3,1.5,a;b\n");
  }

  TEST_CASE("one trial gives two lines and files round-trip") {
    ExperimentConfig c;
    c.trials = 1;
    c.error_samples = 1000;
    const auto reports = run_trials(c);
    const auto path = scratch_dir() / "one.csv";
    emit_report(reports, summarize(reports, c.epsilon), c, path);
    const std::string text = slurp(path);
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
    CHECK(read_report(path) == reports);
    CHECK(std::filesystem::exists(path.string() + ".summary.txt"));
    const auto echoed = read_key_values(path.string() + ".config");
    CHECK(echoed.at("method") == "a2-adgac");
    CHECK_FALSE(std::filesystem::exists(path.string() + ".tmp"));
  }

  TEST_CASE("round trip of awkward values") {
    std::vector<TrialReport> reports{{1, Method::PassiveErm, 0.1, 0.2, 1.0 / 3.0, 1e-17, 5, 6, 1, 0.125, {}},
                                     {2, Method::MarginAdgac, 0.3, 0.01, 0.0, 0.0, 0, 0, 4, 1e9, {"w0_angle"}}};
    CHECK(parse_csv(to_csv(reports)) == reports);
  }

  TEST_CASE("malformed reports") {
    CHECK_THROWS_AS(parse_csv("wrong,header\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_csv(std::string(kReportHeader) + "\n1,2\n"), std::invalid_argument);
  }

  TEST_CASE("empty report is rejected") {
    CHECK_THROWS_AS(emit_report({}, BatterySummary{}, ExperimentConfig{}, scratch_dir() / "x.csv"),
                    std::invalid_argument);
  }
}
