#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "testgen/generators.hpp"
#include "testgen/input_space.hpp"
#include "testgen/sut.hpp"

namespace testgen {

struct SutConfig {
  SyntheticSutParams params;
  /// When set, `params.gain` is recalibrated to reach this positive density.
  std::optional<double> target_density;
  /// Density recorded next to a precomputed gain; informational only.
  std::optional<double> expected_density;
  /// Shell command template; replaces the synthetic model when set.
  std::optional<std::string> command;
};

struct ExperimentConfig {
  InputSpace space = InputSpace::default_board();
  SutConfig sut;
  FitnessSpec fitness;
  std::vector<AlgorithmConfig> algorithms;
  std::size_t runs = 10;
  std::uint64_t master_seed = 2021;
  std::size_t sma_window = 10;
  std::size_t histogram_bins = 10;
};

/// Parses and validates a JSON experiment document. Missing keys take their
/// defaults. Throws ConfigError naming the offending field.
ExperimentConfig parse_config(std::string_view json_text);

/// Reads `path` and parses it. Throws IoError if it cannot be read.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical JSON rendering of a configuration (round-trips through
/// parse_config).
std::string config_to_json(const ExperimentConfig& cfg);

/// Throws ConfigError if the configuration is inconsistent.
void validate_config(const ExperimentConfig& cfg);

/// Returns a copy whose sut.params.gain is calibrated when a target density is
/// configured.
ExperimentConfig resolve_gain(const ExperimentConfig& cfg);

/// Builds the system under test from a resolved configuration.
std::unique_ptr<Sut> make_sut(const ExperimentConfig& cfg);

/// Seed of the i-th run. Independent of the algorithm so that every
/// algorithm in a comparison shares the same warmup for a given run index.
std::uint64_t run_seed(std::uint64_t master_seed, std::size_t run_index) noexcept;

struct OracleReport {
  std::uint64_t cardinality = 0;
  std::uint64_t positives = 0;
  double density = 0.0;
  double gain = 0.0;
};

/// Exhaustive enumeration of the synthetic SUT. Requires a synthetic SUT.
OracleReport run_oracle(const ExperimentConfig& cfg);

struct RunResult {
  std::string algorithm;
  AlgorithmKind kind = AlgorithmKind::kRandom;
  std::size_t run_index = 0;
  std::uint64_t seed = 0;
  TestSuite suite;
  double wall_seconds = 0.0;
};

struct AlgorithmSummary {
  std::string algorithm;
  AlgorithmConfig config;
  std::vector<std::size_t> positive_counts;  // one per run
  double mean_positive_count = 0.0;
  double stddev_positive_count = 0.0;
  double mean_fitness = 0.0;
  /// Post-warmup records across all runs.
  std::size_t accepted_tests = 0;
  std::optional<double> mean_iterations;
  std::optional<double> mean_trials;
  std::vector<std::size_t> histogram;
  /// Mean fitness across runs at each test index, and its moving average.
  std::vector<double> mean_fitness_by_index;
  std::vector<double> sma;
};

struct Summary {
  std::vector<AlgorithmSummary> algorithms;
  std::optional<OracleReport> oracle;
  std::size_t sma_window = 10;
  std::size_t histogram_bins = 10;
};

struct ExperimentOptions {
  /// Worker threads; 0 means hardware concurrency.
  std::size_t jobs = 1;
  /// Explicit run seeds. When empty, cfg.runs seeds derive from master_seed.
  std::vector<std::uint64_t> seeds;
  /// Skip the exhaustive oracle in the summary.
  bool skip_oracle = false;
};

struct Experiment {
  ExperimentConfig config;  // with resolved gain
  std::vector<RunResult> runs;
  Summary summary;
};

/// Runs every algorithm for every seed and summarizes. Results are ordered by
/// algorithm, then run index, independent of scheduling.
Experiment run_experiment(const ExperimentConfig& cfg, const ExperimentOptions& options = {});

Summary summarize(const ExperimentConfig& cfg, const std::vector<RunResult>& runs,
                  std::optional<OracleReport> oracle);

/// Writes tests.csv, summary.json, histogram.csv and sma.csv into `out_dir`.
/// Throws IoError on failure.
void emit_outputs(const Experiment& experiment, const std::filesystem::path& out_dir);

/// Column header of tests.csv.
inline constexpr std::string_view kTestsCsvHeader =
    "run_id,algorithm,seed,test_index,big_cpus,big_freq,big_util,little_cpus,little_freq,"
    "little_util,power_w,fitness,inner_iterations,candidate_trials";

std::string tests_csv(const Experiment& experiment);
std::string summary_json(const Experiment& experiment);
std::string histogram_csv(const Experiment& experiment);
std::string sma_csv(const Experiment& experiment);

}  // namespace testgen
