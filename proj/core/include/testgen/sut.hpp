#pragma once

#include <cstdint>
#include <string>

#include "testgen/input_space.hpp"

namespace testgen {

/// The system under test composed with its measurement instrument: maps an
/// input to a measured power in watts. Implementations must be deterministic.
class Sut {
 public:
  virtual ~Sut() = default;
  virtual double measure(const TestInput& input) const = 0;
};

struct SyntheticSutParams {
  double p_idle = 0.5;
  double kappa_big = 1.0;
  double kappa_little = 0.15;
  double gain = 1.0;

  /// Throws ContractViolation unless every constant is positive and finite.
  void validate() const;
};

/// Deterministic big/LITTLE power model:
///
///   P = p_idle + gain * (kappa_big    * n_b * u_b * (f_b / f_b_max)^3
///                      + kappa_little * n_l * u_l * (f_l / f_l_max)^3)
///
/// where n, u and f are the physical CPU count, utilization and frequency
/// levels of each cluster and f_max is the top level of that dimension.
class SyntheticSut final : public Sut {
 public:
  SyntheticSut(InputSpace space, SyntheticSutParams params);

  double measure(const TestInput& input) const override;

  /// The gain-free dynamic term, so that measure() = p_idle + gain * dynamic_term().
  double dynamic_term(const TestInput& input) const;

  const SyntheticSutParams& params() const noexcept { return params_; }
  const InputSpace& space() const noexcept { return space_; }

 private:
  InputSpace space_;
  SyntheticSutParams params_;
};

/// Runs an external benchmark per test. `command_template` may contain
/// `{name}` placeholders for every dimension name; they are replaced by the
/// physical level values. The same values are exported to the child as
/// TESTGEN_<NAME> environment variables. The last non-empty line of stdout is
/// parsed as watts. Calls are serialized.
class ShellSut final : public Sut {
 public:
  ShellSut(InputSpace space, std::string command_template);

  double measure(const TestInput& input) const override;

  /// The command line that measure() would run for `input`.
  std::string render_command(const TestInput& input) const;

 private:
  InputSpace space_;
  std::string command_template_;
};

struct FitnessSpec {
  double p_m = 6.0;
};

/// min(1, power / p_m). Returns exactly 1.0 iff power >= p_m.
double fitness(const FitnessSpec& spec, double power);

/// Exhaustive positive set I_p = {i : measure(i) >= p_m}.
InputSet oracle_positive_set(const Sut& sut, const InputSpace& space, const FitnessSpec& spec);

/// |I_p| without materializing the set.
std::uint64_t oracle_positive_count(const Sut& sut, const InputSpace& space,
                                    const FitnessSpec& spec);

/// Chooses `gain` so that the (1 - target_density) quantile of measured power
/// equals p_m: the ceil(target_density * |I|)-th highest dynamic term lands
/// exactly on the threshold. Throws CalibrationError when the required point
/// has no dynamic power or p_m <= p_idle.
SyntheticSutParams calibrate_gain(const SyntheticSutParams& params, const InputSpace& space,
                                  const FitnessSpec& spec, double target_density);

}  // namespace testgen
