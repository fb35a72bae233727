// testgen: budgeted performance-test generation (random, DN, online GAN)
// against a configurable system under test.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "testgen/errors.hpp"
#include "testgen/harness.hpp"
#include "testgen/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;

void print_summary(const testgen::Experiment& experiment) {
  const auto& summary = experiment.summary;
  if (summary.oracle) {
    std::printf("oracle: |I|=%llu |I_p|=%llu density=%.6f gain=%.17g\n",
                static_cast<unsigned long long>(summary.oracle->cardinality),
                static_cast<unsigned long long>(summary.oracle->positives),
                summary.oracle->density, summary.oracle->gain);
  }
  std::printf("%-14s %6s %10s %8s %12s %10s %12s\n", "algorithm", "runs", "positives", "stddev",
              "mean_fitness", "iters/test", "trials/test");
  for (const auto& s : summary.algorithms) {
    std::printf("%-14s %6zu %10.2f %8.2f %12.4f %10.3f %12.2f\n", s.algorithm.c_str(),
                s.positive_counts.size(), s.mean_positive_count, s.stddev_positive_count,
                s.mean_fitness, s.mean_iterations.value_or(0.0), s.mean_trials.value_or(0.0));
  }
  double wall = 0.0;
  for (const auto& r : experiment.runs) wall += r.wall_seconds;
  std::fprintf(stderr, "total generation time: %.1f s\n", wall);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Budgeted performance-test generation with an online GAN, a discriminator "
               "filter and a random baseline"};
  app.set_version_flag("--version", std::string(testgen::kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::size_t> runs;
  std::optional<std::uint64_t> master_seed;
  std::size_t jobs = 1;

  auto* compare = app.add_subcommand("compare", "Run every configured algorithm over several seeds");
  compare->add_option("--config", config_path, "Experiment JSON file")->required();
  compare->add_option("--out", out_dir, "Output directory")->required();
  compare->add_option("--runs", runs, "Override the number of runs per algorithm");
  compare->add_option("--master-seed", master_seed, "Override the master seed");
  compare->add_option("--jobs", jobs, "Worker threads (0 = all cores)");

  std::string algorithm;
  std::uint64_t seed = 0;
  auto* run = app.add_subcommand("run", "Run one algorithm with one seed");
  run->add_option("--algorithm", algorithm, "Algorithm kind")
      ->required()
      ->check(CLI::IsMember({"random", "dn", "ogan"}));
  run->add_option("--config", config_path, "Experiment JSON file")->required();
  run->add_option("--seed", seed, "Run seed")->required();
  run->add_option("--out", out_dir, "Output directory")->required();

  auto* oracle = app.add_subcommand("oracle", "Enumerate the space and report the positive set");
  oracle->add_option("--config", config_path, "Experiment JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    testgen::ExperimentConfig cfg = testgen::load_config(config_path);

    if (*oracle) {
      const auto report = testgen::run_oracle(cfg);
      std::printf("cardinality: %llu\n", static_cast<unsigned long long>(report.cardinality));
      std::printf("positives: %llu\n", static_cast<unsigned long long>(report.positives));
      std::printf("density: %.6f\n", report.density);
      std::printf("gain: %.17g\n", report.gain);
      if (cfg.sut.expected_density) {
        std::printf("expected_density: %.6f\n", *cfg.sut.expected_density);
      }
      return kExitOk;
    }

    testgen::ExperimentOptions options;
    if (*compare) {
      if (runs) cfg.runs = *runs;
      if (master_seed) cfg.master_seed = *master_seed;
      options.jobs = jobs;
    } else {
      const auto kind = testgen::parse_algorithm_kind(algorithm);
      std::vector<testgen::AlgorithmConfig> selected;
      for (const auto& a : cfg.algorithms) {
        if (a.kind == *kind) {
          selected.push_back(a);
          break;
        }
      }
      if (selected.empty()) {
        testgen::AlgorithmConfig a;
        a.kind = *kind;
        selected.push_back(a);
      }
      cfg.algorithms = selected;
      cfg.runs = 1;
      options.seeds = {seed};
    }
    testgen::validate_config(cfg);
    const testgen::Experiment experiment = testgen::run_experiment(cfg, options);
    testgen::emit_outputs(experiment, out_dir);
    print_summary(experiment);
    return kExitOk;
  } catch (const testgen::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const testgen::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}
