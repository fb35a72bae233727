#include "testgen/generators.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "testgen/errors.hpp"
#include "testgen/rng.hpp"

namespace testgen {

using detail::require;

std::string_view to_string(AlgorithmKind kind) noexcept {
  switch (kind) {
    case AlgorithmKind::kRandom:
      return "random";
    case AlgorithmKind::kDn:
      return "dn";
    case AlgorithmKind::kOgan:
      return "ogan";
  }
  return "unknown";
}

std::optional<AlgorithmKind> parse_algorithm_kind(std::string_view text) noexcept {
  if (text == "random") return AlgorithmKind::kRandom;
  if (text == "dn") return AlgorithmKind::kDn;
  if (text == "ogan") return AlgorithmKind::kOgan;
  return std::nullopt;
}

std::string AlgorithmConfig::label() const {
  if (!name.empty()) return name;
  if (kind == AlgorithmKind::kDn) return "dn_bs" + std::to_string(batchsize);
  return std::string(to_string(kind));
}

void AlgorithmConfig::validate(const InputSpace& space) const {
  require(budget <= space.cardinality(), "algorithm: budget exceeds the size of the input space");
  require(warmup <= budget, "algorithm: warmup exceeds budget");
  require(treducer > 0.0 && treducer < 1.0, "algorithm: treducer must lie in (0, 1)");
  require(dedup_floor > 0.0 && dedup_floor <= 1.0, "algorithm: dedup_floor must lie in (0, 1]");
  require(batchsize >= 1, "algorithm: batchsize must be >= 1");
  gan.validate();
}

double decay_target(double target, double treducer) noexcept {
  const double next = target * treducer;
  return next < std::numeric_limits<double>::min() ? 0.0 : next;
}

namespace {

// Mutable state of one generation run.
class RunState {
 public:
  RunState(const InputSpace& space, const Sut& sut, const FitnessSpec& spec, std::uint64_t seed)
      : space(space), sut(sut), spec(spec), streams(seed) {}

  bool executed(const TestInput& t) const { return executed_.contains(t); }
  const InputSet& executed_set() const { return executed_; }

  TestRecord& execute(const TestInput& t, std::size_t iterations, std::size_t trials,
                      bool warmup) {
    require(!executed_.contains(t), "generator: input executed twice");
    TestRecord rec;
    rec.input = t;
    rec.power = sut.measure(t);
    rec.fitness = fitness(spec, rec.power);
    rec.inner_iterations = iterations;
    rec.candidate_trials = trials;
    rec.test_index = suite.records.size();
    rec.warmup = warmup;
    executed_.insert(t);
    suite.records.push_back(rec);
    return suite.records.back();
  }

  // Uniform random tests from the warmup stream; shared by all algorithms.
  void run_warmup(std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) {
      execute(space.sample_uniform(executed_, 1, streams.warmup).front(), 1, 1, true);
    }
  }

  const InputSpace& space;
  const Sut& sut;
  const FitnessSpec& spec;
  RunStreams streams;
  TestSuite suite;

 private:
  InputSet executed_;
};

nn::Matrix normalized_batch(const InputSpace& space, const std::vector<TestInput>& inputs) {
  nn::Matrix m(inputs.size(), kInputDims);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const NormalizedInput n = space.normalize(inputs[i]);
    std::copy(n.values.begin(), n.values.end(), m.row(i).begin());
  }
  return m;
}

void check_preconditions(const InputSpace& space, const AlgorithmConfig& cfg) {
  cfg.validate(space);
  require(space.dims().size() == gan::kTestDim, "generator: space must have 6 dimensions");
}

}  // namespace

gan::TrainingSet training_set(const InputSpace& space, const TestSuite& suite) {
  gan::TrainingSet set;
  std::vector<TestInput> inputs;
  inputs.reserve(suite.records.size());
  for (const auto& r : suite.records) {
    inputs.push_back(r.input);
    set.fitness.push_back(r.fitness);
  }
  set.inputs = normalized_batch(space, inputs);
  return set;
}

TestSuite run_random(const InputSpace& space, const Sut& sut, const FitnessSpec& spec,
                     const AlgorithmConfig& cfg, std::uint64_t seed) {
  check_preconditions(space, cfg);
  RunState run(space, sut, spec, seed);
  run.run_warmup(cfg.budget);
  for (auto& r : run.suite.records) r.warmup = r.test_index < cfg.warmup;
  return std::move(run.suite);
}

TestSuite run_dn(const InputSpace& space, const Sut& sut, const FitnessSpec& spec,
                 const AlgorithmConfig& cfg, std::uint64_t seed, const RunOverrides& overrides) {
  check_preconditions(space, cfg);
  RunState run(space, sut, spec, seed);
  run.run_warmup(cfg.warmup);

  nn::NetworkState net = nn::init_network(gan::discriminator_topology(), run.streams.net_init);
  if (overrides.discriminator) net = *overrides.discriminator;
  nn::RmspropState opt = nn::RmspropState::for_network(net);
  const nn::TrainOptions train_opts{cfg.gan.disc_epochs, cfg.gan.minibatch};

  auto retrain = [&] {
    if (!overrides.train || run.suite.records.empty()) return;
    const gan::TrainingSet set = training_set(space, run.suite);
    nn::Matrix targets(set.fitness.size(), 1);
    std::copy(set.fitness.begin(), set.fitness.end(), targets.values().begin());
    nn::train_epochs(net, opt, set.inputs, targets, train_opts, run.streams.shuffling);
  };
  retrain();

  while (run.suite.size() < cfg.budget) {
    double target = 1.0;
    std::size_t iterations = 0;
    std::size_t trials = 0;
    for (;;) {
      ++iterations;
      target = decay_target(target, cfg.treducer);
      const std::uint64_t remaining = space.cardinality() - run.executed_set().size();
      const auto batch = static_cast<std::size_t>(
          std::min<std::uint64_t>(cfg.batchsize, remaining));
      const std::vector<TestInput> candidates =
          space.sample_uniform(run.executed_set(), batch, run.streams.dn_sampling);
      trials += candidates.size();
      const nn::Matrix preds = nn::forward(net, normalized_batch(space, candidates));
      const auto values = preds.values();
      const auto best = static_cast<std::size_t>(
          std::max_element(values.begin(), values.end()) - values.begin());
      if (values[best] >= target) {
        TestRecord& rec = run.execute(candidates[best], iterations, trials, false);
        rec.acceptance_target = target;
        rec.predicted_fitness = values[best];
        break;
      }
    }
    retrain();
  }
  return std::move(run.suite);
}

TestSuite run_ogan(const InputSpace& space, const Sut& sut, const FitnessSpec& spec,
                   const AlgorithmConfig& cfg, std::uint64_t seed, const RunOverrides& overrides) {
  check_preconditions(space, cfg);
  RunState run(space, sut, spec, seed);
  run.run_warmup(cfg.warmup);

  gan::GanModel model = gan::init_gan(cfg.gan, run.streams.net_init);
  if (overrides.generator) model.generator = *overrides.generator;
  if (overrides.discriminator) model.discriminator = *overrides.discriminator;
  model.gen_opt = nn::RmspropState::for_network(model.generator);
  model.disc_opt = nn::RmspropState::for_network(model.discriminator);

  auto retrain = [&] {
    if (!overrides.train || run.suite.records.empty()) return;
    gan::train_gan(model, training_set(space, run.suite), cfg.gan, run.streams.shuffling,
                   run.streams.gan_latent);
  };
  retrain();

  while (run.suite.size() < cfg.budget) {
    double target = 1.0;
    std::size_t iterations = 0;
    for (;;) {
      ++iterations;
      target = decay_target(target, cfg.treducer);
      const nn::Matrix candidate = gan::sample_candidates(model, 1, run.streams.gan_latent);
      NormalizedInput raw;
      std::copy(candidate.values().begin(), candidate.values().end(), raw.values.begin());
      TestInput t = space.snap(raw);
      if (run.executed(t)) {
        if (target >= cfg.dedup_floor) continue;
        t = space.nearest_unexcluded(raw, run.executed_set());
      }
      const double predicted = gan::predict_fitness(model, normalized_batch(space, {t})).front();
      if (predicted >= target) {
        TestRecord& rec = run.execute(t, iterations, iterations, false);
        rec.acceptance_target = target;
        rec.predicted_fitness = predicted;
        break;
      }
    }
    retrain();
  }
  return std::move(run.suite);
}

TestSuite run_algorithm(const InputSpace& space, const Sut& sut, const FitnessSpec& spec,
                        const AlgorithmConfig& cfg, std::uint64_t seed) {
  switch (cfg.kind) {
    case AlgorithmKind::kRandom:
      return run_random(space, sut, spec, cfg, seed);
    case AlgorithmKind::kDn:
      return run_dn(space, sut, spec, cfg, seed);
    case AlgorithmKind::kOgan:
      return run_ogan(space, sut, spec, cfg, seed);
  }
  throw ContractViolation("run_algorithm: unknown algorithm kind");
}

SuiteStats suite_stats(const TestSuite& suite) {
  SuiteStats stats;
  double sum = 0.0;
  for (const auto& r : suite.records) {
    stats.fitness_series.push_back(r.fitness);
    if (r.fitness == 1.0) ++stats.positive_count;
    sum += r.fitness;
  }
  if (!suite.records.empty()) stats.mean_fitness = sum / static_cast<double>(suite.size());
  return stats;
}

}  // namespace testgen
