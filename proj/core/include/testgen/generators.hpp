#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "testgen/gan.hpp"
#include "testgen/input_space.hpp"
#include "testgen/nn.hpp"
#include "testgen/sut.hpp"

namespace testgen {

enum class AlgorithmKind { kRandom, kDn, kOgan };

std::string_view to_string(AlgorithmKind kind) noexcept;
std::optional<AlgorithmKind> parse_algorithm_kind(std::string_view text) noexcept;

struct AlgorithmConfig {
  AlgorithmKind kind = AlgorithmKind::kRandom;
  std::size_t budget = 200;
  std::size_t warmup = 50;
  double treducer = 0.95;
  /// Candidates scored per inner iteration (DN only).
  std::size_t batchsize = 4;
  /// OGAN only: once the target drops below this value, a generator proposal
  /// that snaps onto an executed input is moved to the nearest unexecuted one
  /// instead of being rejected.
  double dedup_floor = 1e-3;
  gan::GanHyperparams gan;
  /// Display name; defaults to "random", "dn_bs<batchsize>" or "ogan".
  std::string name;

  std::string label() const;
  /// Throws ContractViolation unless warmup <= budget <= |space|,
  /// 0 < treducer < 1, batchsize >= 1 and 0 < dedup_floor <= 1.
  void validate(const InputSpace& space) const;
};

/// target * treducer, flushed to 0 once it leaves the normal range (repeated
/// multiplication would otherwise stall at the smallest subnormal).
double decay_target(double target, double treducer) noexcept;

/// One executed test plus the search effort spent to find it.
struct TestRecord {
  TestInput input;
  double power = 0.0;
  double fitness = 0.0;
  /// Inner-loop passes before acceptance (1 for warmup and random tests).
  std::size_t inner_iterations = 1;
  /// Candidates generated before acceptance (1 for warmup and random tests).
  std::size_t candidate_trials = 1;
  std::size_t test_index = 0;
  bool warmup = true;
  /// Moving threshold and surrogate prediction at acceptance; unset for
  /// warmup and random tests.
  std::optional<double> acceptance_target;
  std::optional<double> predicted_fitness;
};

/// Ordered, duplicate-free sequence of executed tests.
struct TestSuite {
  std::vector<TestRecord> records;

  std::size_t size() const noexcept { return records.size(); }
};

/// Test hooks: start from given networks and/or freeze them.
struct RunOverrides {
  std::optional<nn::NetworkState> discriminator;
  std::optional<nn::NetworkState> generator;
  bool train = true;
};

TestSuite run_random(const InputSpace& space, const Sut& sut, const FitnessSpec& spec,
                     const AlgorithmConfig& cfg, std::uint64_t seed);

TestSuite run_dn(const InputSpace& space, const Sut& sut, const FitnessSpec& spec,
                 const AlgorithmConfig& cfg, std::uint64_t seed,
                 const RunOverrides& overrides = {});

TestSuite run_ogan(const InputSpace& space, const Sut& sut, const FitnessSpec& spec,
                   const AlgorithmConfig& cfg, std::uint64_t seed,
                   const RunOverrides& overrides = {});

/// Dispatches on cfg.kind.
TestSuite run_algorithm(const InputSpace& space, const Sut& sut, const FitnessSpec& spec,
                        const AlgorithmConfig& cfg, std::uint64_t seed);

/// Normalized inputs and fitness of every record, for surrogate training.
gan::TrainingSet training_set(const InputSpace& space, const TestSuite& suite);

struct SuiteStats {
  std::size_t positive_count = 0;
  /// Absent for an empty suite.
  std::optional<double> mean_fitness;
  std::vector<double> fitness_series;
};

SuiteStats suite_stats(const TestSuite& suite);

}  // namespace testgen
