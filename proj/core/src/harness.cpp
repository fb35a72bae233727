#include "testgen/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <chrono>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "testgen/errors.hpp"
#include "testgen/rng.hpp"
#include "testgen/stats.hpp"

namespace testgen {

using ordered_json = nlohmann::ordered_json;

ExperimentConfig resolve_gain(const ExperimentConfig& cfg) {
  ExperimentConfig out = cfg;
  if (cfg.sut.target_density && !cfg.sut.command) {
    try {
      out.sut.params =
          calibrate_gain(cfg.sut.params, cfg.space, cfg.fitness, *cfg.sut.target_density);
    } catch (const CalibrationError& e) {
      throw ConfigError("sut.target_density", e.what());
    }
  }
  return out;
}

std::unique_ptr<Sut> make_sut(const ExperimentConfig& cfg) {
  if (cfg.sut.command) return std::make_unique<ShellSut>(cfg.space, *cfg.sut.command);
  return std::make_unique<SyntheticSut>(cfg.space, cfg.sut.params);
}

std::uint64_t run_seed(std::uint64_t master_seed, std::size_t run_index) noexcept {
  return derive_seed(master_seed, static_cast<std::uint64_t>(run_index));
}

OracleReport run_oracle(const ExperimentConfig& cfg) {
  if (cfg.sut.command) {
    throw ConfigError("sut.command", "the exhaustive oracle needs the synthetic SUT");
  }
  const ExperimentConfig resolved = resolve_gain(cfg);
  const SyntheticSut sut(resolved.space, resolved.sut.params);
  OracleReport report;
  report.cardinality = resolved.space.cardinality();
  report.positives = oracle_positive_count(sut, resolved.space, resolved.fitness);
  report.density =
      static_cast<double>(report.positives) / static_cast<double>(report.cardinality);
  report.gain = resolved.sut.params.gain;
  return report;
}

namespace {

struct RunDescriptor {
  std::size_t algorithm = 0;
  std::size_t run_index = 0;
  std::uint64_t seed = 0;
};

}  // namespace

Experiment run_experiment(const ExperimentConfig& cfg, const ExperimentOptions& options) {
  validate_config(cfg);
  Experiment experiment;
  experiment.config = resolve_gain(cfg);
  const ExperimentConfig& resolved = experiment.config;
  const std::unique_ptr<Sut> sut = make_sut(resolved);

  std::vector<std::uint64_t> seeds = options.seeds;
  if (seeds.empty()) {
    for (std::size_t i = 0; i < resolved.runs; ++i) seeds.push_back(run_seed(resolved.master_seed, i));
  }
  experiment.config.runs = seeds.size();

  std::vector<RunDescriptor> work;
  for (std::size_t a = 0; a < resolved.algorithms.size(); ++a) {
    for (std::size_t i = 0; i < seeds.size(); ++i) work.push_back({a, i, seeds[i]});
  }
  experiment.runs.resize(work.size());

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t w = next++; w < work.size(); w = next++) {
      const RunDescriptor& d = work[w];
      const AlgorithmConfig& alg = resolved.algorithms[d.algorithm];
      try {
        const auto start = std::chrono::steady_clock::now();
        RunResult result;
        result.algorithm = alg.label();
        result.kind = alg.kind;
        result.run_index = d.run_index;
        result.seed = d.seed;
        result.suite = run_algorithm(resolved.space, *sut, resolved.fitness, alg, d.seed);
        result.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        experiment.runs[w] = std::move(result);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = work.size();
      }
    }
  };

  std::size_t jobs = options.jobs == 0 ? std::thread::hardware_concurrency() : options.jobs;
  jobs = std::clamp<std::size_t>(jobs, 1, work.size());
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::optional<OracleReport> oracle;
  if (!options.skip_oracle && !resolved.sut.command) oracle = run_oracle(resolved);
  experiment.summary = summarize(resolved, experiment.runs, oracle);
  return experiment;
}

Summary summarize(const ExperimentConfig& cfg, const std::vector<RunResult>& runs,
                  std::optional<OracleReport> oracle) {
  Summary summary;
  summary.oracle = oracle;
  summary.sma_window = cfg.sma_window;
  summary.histogram_bins = cfg.histogram_bins;

  for (const AlgorithmConfig& alg : cfg.algorithms) {
    AlgorithmSummary s;
    s.algorithm = alg.label();
    s.config = alg;

    std::vector<double> positives;
    std::vector<double> all_fitness;
    std::vector<double> index_sum(alg.budget, 0.0);
    std::size_t run_count = 0;
    double iterations = 0.0;
    double trials = 0.0;
    for (const RunResult& r : runs) {
      if (r.algorithm != s.algorithm) continue;
      ++run_count;
      const SuiteStats st = suite_stats(r.suite);
      s.positive_counts.push_back(st.positive_count);
      positives.push_back(static_cast<double>(st.positive_count));
      all_fitness.insert(all_fitness.end(), st.fitness_series.begin(), st.fitness_series.end());
      for (std::size_t i = 0; i < st.fitness_series.size() && i < index_sum.size(); ++i) {
        index_sum[i] += st.fitness_series[i];
      }
      for (const TestRecord& rec : r.suite.records) {
        if (rec.warmup) continue;
        ++s.accepted_tests;
        iterations += static_cast<double>(rec.inner_iterations);
        trials += static_cast<double>(rec.candidate_trials);
      }
    }
    if (run_count > 0) {
      s.mean_positive_count = mean(positives);
      s.stddev_positive_count = stddev(positives);
    }
    if (!all_fitness.empty()) s.mean_fitness = mean(all_fitness);
    if (s.accepted_tests > 0) {
      s.mean_iterations = iterations / static_cast<double>(s.accepted_tests);
      s.mean_trials = trials / static_cast<double>(s.accepted_tests);
    }
    s.histogram = histogram(all_fitness, cfg.histogram_bins);
    if (run_count > 0) {
      for (double v : index_sum) s.mean_fitness_by_index.push_back(v / static_cast<double>(run_count));
      s.sma = sma(s.mean_fitness_by_index, cfg.sma_window);
    }
    summary.algorithms.push_back(std::move(s));
  }
  return summary;
}

namespace {

std::string num(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string num(std::uint64_t v) { return std::to_string(v); }

}  // namespace

std::string tests_csv(const Experiment& experiment) {
  const InputSpace& space = experiment.config.space;
  std::string out(kTestsCsvHeader);
  out += '\n';
  for (std::size_t run_id = 0; run_id < experiment.runs.size(); ++run_id) {
    const RunResult& r = experiment.runs[run_id];
    for (const TestRecord& rec : r.suite.records) {
      out += num(std::uint64_t{run_id}) + ',' + r.algorithm + ',' + num(r.seed) + ',' +
             num(std::uint64_t{rec.test_index});
      for (std::size_t d = 0; d < kInputDims; ++d) {
        out += ',' + num(space.dims()[d].levels[rec.input.level_indices[d]]);
      }
      out += ',' + num(rec.power) + ',' + num(rec.fitness) + ',' +
             num(std::uint64_t{rec.inner_iterations}) + ',' +
             num(std::uint64_t{rec.candidate_trials}) + '\n';
    }
  }
  return out;
}

std::string histogram_csv(const Experiment& experiment) {
  std::string out = "algorithm,bin,lower,upper,count\n";
  for (const AlgorithmSummary& s : experiment.summary.algorithms) {
    const std::size_t fractional = s.histogram.size() - 1;
    for (std::size_t b = 0; b < s.histogram.size(); ++b) {
      const bool last = b == fractional;
      const double lower = last ? 1.0 : static_cast<double>(b) / static_cast<double>(fractional);
      const double upper =
          last ? 1.0 : static_cast<double>(b + 1) / static_cast<double>(fractional);
      out += s.algorithm + ',' + num(std::uint64_t{b}) + ',' + num(lower) + ',' + num(upper) +
             ',' + num(std::uint64_t{s.histogram[b]}) + '\n';
    }
  }
  return out;
}

std::string sma_csv(const Experiment& experiment) {
  std::string out = "algorithm,start_index,end_index,mean_fitness_sma\n";
  const std::size_t window = experiment.summary.sma_window;
  for (const AlgorithmSummary& s : experiment.summary.algorithms) {
    for (std::size_t j = 0; j < s.sma.size(); ++j) {
      out += s.algorithm + ',' + num(std::uint64_t{j}) + ',' + num(std::uint64_t{j + window - 1}) +
             ',' + num(s.sma[j]) + '\n';
    }
  }
  return out;
}

std::string summary_json(const Experiment& experiment) {
  const Summary& summary = experiment.summary;
  ordered_json doc;
  if (summary.oracle) {
    doc["oracle"] = {{"cardinality", summary.oracle->cardinality},
                     {"positives", summary.oracle->positives},
                     {"density", summary.oracle->density},
                     {"gain", summary.oracle->gain}};
  } else {
    doc["oracle"] = nullptr;
  }
  doc["sma_window"] = summary.sma_window;
  doc["histogram_bins"] = summary.histogram_bins;

  ordered_json algs = ordered_json::array();
  for (const AlgorithmSummary& s : summary.algorithms) {
    ordered_json a;
    a["name"] = s.algorithm;
    a["kind"] = std::string(to_string(s.config.kind));
    a["runs"] = s.positive_counts.size();
    a["budget"] = s.config.budget;
    a["warmup"] = s.config.warmup;
    if (s.config.kind == AlgorithmKind::kDn) a["batchsize"] = s.config.batchsize;
    a["positive_count"] = {{"mean", s.mean_positive_count},
                           {"stddev", s.stddev_positive_count},
                           {"per_run", s.positive_counts}};
    a["mean_fitness"] = s.mean_fitness;
    ordered_json trials;
    trials["accepted_tests"] = s.accepted_tests;
    trials["mean_iterations"] = s.mean_iterations ? ordered_json(*s.mean_iterations) : nullptr;
    trials["mean_trials"] = s.mean_trials ? ordered_json(*s.mean_trials) : nullptr;
    a["trials_per_accepted_test"] = trials;
    a["histogram"] = s.histogram;
    a["mean_fitness_by_index"] = s.mean_fitness_by_index;
    a["sma"] = s.sma;
    algs.push_back(std::move(a));
  }
  doc["algorithms"] = std::move(algs);
  doc["config"] = ordered_json::parse(config_to_json(experiment.config));
  return doc.dump(2) + "\n";
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw IoError(path.string(), "write failed");
}

}  // namespace

void emit_outputs(const Experiment& experiment, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError(out_dir.string(), "cannot create directory: " + ec.message());
  write_file(out_dir / "tests.csv", tests_csv(experiment));
  write_file(out_dir / "summary.json", summary_json(experiment));
  write_file(out_dir / "histogram.csv", histogram_csv(experiment));
  write_file(out_dir / "sma.csv", sma_csv(experiment));
}

}  // namespace testgen
