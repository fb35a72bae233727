#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "testgen/errors.hpp"
#include "testgen/harness.hpp"
#include "testgen/stats.hpp"

using namespace testgen;
namespace fs = std::filesystem;

namespace {

constexpr const char* kSmallConfig = R"({
  "sut": {"target_density": 0.01},
  "algorithms": [
    {"kind": "random", "budget": 60, "warmup": 50},
    {"kind": "dn", "budget": 60, "warmup": 50, "batchsize": 4},
    {"kind": "ogan", "budget": 60, "warmup": 50}
  ],
  "runs": 2,
  "master_seed": 7,
  "sma_window": 5,
  "histogram_bins": 10
})";

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("testgen_harness_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string field_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<no error>";
}

const Experiment& small_experiment() {
  static const Experiment e = run_experiment(parse_config(kSmallConfig));
  return e;
}

}  // namespace

TEST(Config, Defaults) {
  const ExperimentConfig cfg = parse_config("{}");
  EXPECT_EQ(cfg.space.cardinality(), 665000u);
  EXPECT_EQ(cfg.runs, 10u);
  EXPECT_EQ(cfg.sma_window, 10u);
  EXPECT_EQ(cfg.histogram_bins, 10u);
  EXPECT_EQ(cfg.fitness.p_m, 6.0);
  ASSERT_EQ(cfg.algorithms.size(), 3u);
  EXPECT_EQ(cfg.algorithms[1].label(), "dn_bs4");
  EXPECT_EQ(cfg.algorithms[2].budget, 200u);
  EXPECT_EQ(cfg.algorithms[2].warmup, 50u);
  EXPECT_EQ(cfg.algorithms[2].treducer, 0.95);
}

TEST(Config, ErrorsNameTheField) {
  EXPECT_EQ(field_of("[]"), "<root>");
  EXPECT_EQ(field_of(R"({"runs": 0})"), "runs");
  EXPECT_EQ(field_of(R"({"bogus": 1})"), "bogus");
  EXPECT_EQ(field_of(R"({"sut": {"gain": -1}})"), "sut.gain");
  EXPECT_EQ(field_of(R"({"sut": {"gain": 1, "target_density": 0.1}})"), "sut");
  EXPECT_EQ(field_of(R"({"fitness": {"p_m": "six"}})"), "fitness.p_m");
  EXPECT_EQ(field_of(R"({"algorithms": [{"kind": "ogan"}, {"kind": "gan"}]})"),
            "algorithms[1].kind");
  EXPECT_EQ(field_of(R"({"algorithms": [{"kind": "dn", "treducer": 1.5}]})"),
            "algorithms[0].treducer");
  EXPECT_EQ(field_of(R"({"algorithms": [{"kind": "random", "batchsize": 4}]})"),
            "algorithms[0].batchsize");
  EXPECT_EQ(field_of(R"({"algorithms": [{"kind": "ogan", "gan": {"minibatch": 0}}]})"),
            "algorithms[0].gan.minibatch");
  EXPECT_EQ(field_of(R"({"algorithms": [{"kind": "ogan", "warmup": 300}]})"),
            "algorithms[0].warmup");
  EXPECT_EQ(field_of(R"({"algorithms": [{"kind": "random"}, {"kind": "random"}]})"),
            "algorithms[1].name");
  EXPECT_EQ(field_of(R"({"space": [{"name": "a", "levels": [1]}]})"), "space");
  EXPECT_EQ(field_of(R"({"sma_window": 500})"), "sma_window");
  EXPECT_EQ(field_of("{not json"), "<root>");
}

TEST(Config, RoundTrip) {
  const ExperimentConfig a = parse_config(kSmallConfig);
  const std::string text = config_to_json(a);
  const ExperimentConfig b = parse_config(text);
  EXPECT_EQ(config_to_json(b), text);
  EXPECT_EQ(b.algorithms.size(), 3u);
  EXPECT_EQ(b.master_seed, 7u);
}

TEST(Config, LoadMissingFile) {
  EXPECT_THROW(load_config("/nonexistent/testgen.json"), IoError);
}

TEST(Config, ShippedDefaultMatchesCalibration) {
  const ExperimentConfig shipped = load_config(fs::path(TESTGEN_SOURCE_DIR) / "configs/default.json");
  const OracleReport report = run_oracle(shipped);
  EXPECT_EQ(report.cardinality, 665000u);
  EXPECT_NEAR(report.density, *shipped.sut.expected_density, 5e-7);
  const ExperimentConfig calibrated = resolve_gain(parse_config(R"({"sut": {"target_density": 0.01}})"));
  EXPECT_EQ(calibrated.sut.params.gain, shipped.sut.params.gain);
}

TEST(RunSeed, PureAndDistinct) {
  EXPECT_EQ(run_seed(2021, 3), run_seed(2021, 3));
  EXPECT_NE(run_seed(2021, 3), run_seed(2021, 4));
  EXPECT_NE(run_seed(2021, 3), run_seed(2022, 3));
}

TEST(Experiment, ResultShapeAndOrder) {
  const Experiment& e = small_experiment();
  ASSERT_EQ(e.runs.size(), 6u);
  EXPECT_EQ(e.runs[0].algorithm, "random");
  EXPECT_EQ(e.runs[1].run_index, 1u);
  EXPECT_EQ(e.runs[2].algorithm, "dn_bs4");
  EXPECT_EQ(e.runs[4].algorithm, "ogan");
  EXPECT_EQ(e.runs[0].seed, e.runs[2].seed);
  for (const auto& r : e.runs) EXPECT_EQ(r.suite.size(), 60u);
}

TEST(Experiment, SummaryInvariants) {
  const Experiment& e = small_experiment();
  ASSERT_TRUE(e.summary.oracle.has_value());
  for (const AlgorithmSummary& s : e.summary.algorithms) {
    std::size_t total = 0;
    for (std::size_t c : s.histogram) total += c;
    EXPECT_EQ(total, 2u * 60u);
    std::size_t positives = 0;
    for (std::size_t c : s.positive_counts) positives += c;
    EXPECT_EQ(s.histogram.back(), positives);
    EXPECT_EQ(s.sma.size(), 60u - 5u + 1u);
    EXPECT_EQ(s.mean_fitness_by_index.size(), 60u);
    EXPECT_EQ(s.accepted_tests, 2u * 10u);
  }
  const AlgorithmSummary& random = e.summary.algorithms[0];
  EXPECT_DOUBLE_EQ(*random.mean_iterations, 1.0);
  const AlgorithmSummary& dn = e.summary.algorithms[1];
  EXPECT_DOUBLE_EQ(*dn.mean_trials, 4.0 * *dn.mean_iterations);
  const AlgorithmSummary& ogan = e.summary.algorithms[2];
  EXPECT_DOUBLE_EQ(*ogan.mean_trials, *ogan.mean_iterations);
}

TEST(Experiment, IndependentSummaryRecomputation) {
  const Experiment& e = small_experiment();
  for (std::size_t a = 0; a < 3; ++a) {
    const AlgorithmSummary& s = e.summary.algorithms[a];
    std::vector<double> by_index(60, 0.0);
    std::vector<double> all;
    double iterations = 0.0;
    double n = 0.0;
    for (std::size_t r = 0; r < 2; ++r) {
      const TestSuite& suite = e.runs[a * 2 + r].suite;
      for (const auto& rec : suite.records) {
        by_index[rec.test_index] += rec.fitness / 2.0;
        all.push_back(rec.fitness);
        if (!rec.warmup) {
          iterations += static_cast<double>(rec.inner_iterations);
          n += 1.0;
        }
      }
    }
    for (std::size_t i = 0; i < 60; ++i) EXPECT_NEAR(s.mean_fitness_by_index[i], by_index[i], 1e-12);
    for (std::size_t j = 0; j < s.sma.size(); ++j) {
      double w = 0.0;
      for (std::size_t k = j; k < j + 5; ++k) w += by_index[k];
      EXPECT_NEAR(s.sma[j], w / 5.0, 1e-12);
    }
    EXPECT_NEAR(s.mean_fitness, mean(all), 1e-12);
    EXPECT_NEAR(*s.mean_iterations, iterations / n, 1e-12);
  }
}

TEST(Experiment, BudgetEqualsWarmupGivesIdenticalSuites) {
  ExperimentConfig cfg = parse_config(R"({
    "sut": {"target_density": 0.01},
    "algorithms": [{"kind": "random", "budget": 50, "warmup": 50},
                   {"kind": "dn", "budget": 50, "warmup": 50},
                   {"kind": "ogan", "budget": 50, "warmup": 50}],
    "runs": 1, "sma_window": 5})");
  ExperimentOptions opt;
  opt.skip_oracle = true;
  const Experiment e = run_experiment(cfg, opt);
  ASSERT_EQ(e.runs.size(), 3u);
  for (std::size_t i = 0; i < 50; ++i) {
    EXPECT_EQ(e.runs[0].suite.records[i].input, e.runs[1].suite.records[i].input);
    EXPECT_EQ(e.runs[0].suite.records[i].input, e.runs[2].suite.records[i].input);
  }
}

TEST(Experiment, ParallelMatchesSequential) {
  ExperimentOptions opt;
  opt.jobs = 3;
  const Experiment parallel = run_experiment(parse_config(kSmallConfig), opt);
  EXPECT_EQ(tests_csv(parallel), tests_csv(small_experiment()));
  EXPECT_EQ(summary_json(parallel), summary_json(small_experiment()));
}

TEST(Outputs, FilesAndSchemas) {
  const Experiment& e = small_experiment();
  const fs::path dir = scratch_dir("outputs");
  emit_outputs(e, dir);

  const std::string csv = read_file(dir / "tests.csv");
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header, kTestsCsvHeader);
  std::size_t rows = 0;
  for (std::string line; std::getline(lines, line);) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 13);
  }
  EXPECT_EQ(rows, 2u * 3u * 60u);
  EXPECT_EQ(csv.find('\r'), std::string::npos);

  const auto doc = nlohmann::json::parse(read_file(dir / "summary.json"));
  EXPECT_EQ(doc["algorithms"].size(), 3u);
  EXPECT_EQ(doc["oracle"]["cardinality"], 665000);
  EXPECT_EQ(nlohmann::json::parse(doc.dump()), doc);
  EXPECT_NO_THROW(parse_config(doc["config"].dump()));

  const std::string hist = read_file(dir / "histogram.csv");
  EXPECT_EQ(std::count(hist.begin(), hist.end(), '\n'), 1 + 3 * 10);
  const std::string sma_text = read_file(dir / "sma.csv");
  EXPECT_EQ(std::count(sma_text.begin(), sma_text.end(), '\n'), 1 + 3 * 56);
  fs::remove_all(dir);
}

TEST(Outputs, ByteIdenticalReruns) {
  const fs::path a = scratch_dir("rerun_a");
  const fs::path b = scratch_dir("rerun_b");
  emit_outputs(run_experiment(parse_config(kSmallConfig)), a);
  emit_outputs(run_experiment(parse_config(kSmallConfig)), b);
  for (const char* name : {"tests.csv", "summary.json", "histogram.csv", "sma.csv"}) {
    EXPECT_EQ(read_file(a / name), read_file(b / name)) << name;
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Outputs, UnwritableDirectory) {
  const fs::path blocker = scratch_dir("blocker");
  { std::ofstream(blocker) << "file"; }
  EXPECT_THROW(emit_outputs(small_experiment(), blocker / "sub"), IoError);
  fs::remove_all(blocker);
}
