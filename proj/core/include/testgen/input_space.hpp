#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <ranges>
#include <string>
#include <unordered_set>
#include <vector>

#include "testgen/rng.hpp"

namespace testgen {

inline constexpr std::size_t kInputDims = 6;

/// Positions of the board-configuration parameters inside a TestInput.
enum class Dim : std::size_t {
  kBigCpus = 0,
  kBigFreq = 1,
  kBigUtil = 2,
  kLittleCpus = 3,
  kLittleFreq = 4,
  kLittleUtil = 5,
};

/// One ordinal parameter: a name and its strictly increasing physical levels.
struct Dimension {
  std::string name;
  std::vector<double> levels;

  std::size_t level_count() const noexcept { return levels.size(); }
};

/// A discrete test input: one level index per dimension.
struct TestInput {
  std::array<std::size_t, kInputDims> level_indices{};

  std::size_t operator[](Dim d) const noexcept {
    return level_indices[static_cast<std::size_t>(d)];
  }

  friend auto operator<=>(const TestInput&, const TestInput&) = default;
};

/// Continuous encoding of a TestInput in [-1, 1]^6.
struct NormalizedInput {
  std::array<double, kInputDims> values{};

  friend bool operator==(const NormalizedInput&, const NormalizedInput&) = default;
};

struct TestInputHash {
  std::size_t operator()(const TestInput& t) const noexcept;
};

using InputSet = std::unordered_set<TestInput, TestInputHash>;

/// The discrete 6-dimensional configuration space. Immutable once built.
class InputSpace {
 public:
  /// Throws ContractViolation unless there are exactly 6 dimensions, each with
  /// a nonempty, strictly increasing list of finite levels.
  explicit InputSpace(std::vector<Dimension> dims);

  /// Big/LITTLE board analog: 5 x 19 x 10 x 5 x 14 x 10 = 665,000 points.
  static InputSpace default_board();

  const std::vector<Dimension>& dims() const noexcept { return dims_; }
  const Dimension& dim(Dim d) const noexcept { return dims_[static_cast<std::size_t>(d)]; }

  std::uint64_t cardinality() const noexcept { return cardinality_; }

  bool contains(const TestInput& input) const noexcept;

  /// Physical level value of `input` along `d`.
  double value(const TestInput& input, Dim d) const;

  /// index j -> -1 + 2 j / (L - 1); single-level dimensions map to 0.
  NormalizedInput normalize(const TestInput& input) const;

  /// Nearest grid point per dimension; exact ties go to the lower index.
  /// Components outside [-1, 1] are clamped first.
  TestInput snap(const NormalizedInput& vector) const;

  /// Lexicographic rank of `input` (dimension 0 most significant).
  std::uint64_t rank(const TestInput& input) const;
  TestInput unrank(std::uint64_t rank) const;

  /// k distinct inputs drawn uniformly without replacement from the space
  /// minus `exclude`. Throws ExhaustionError if fewer than k remain.
  std::vector<TestInput> sample_uniform(const InputSet& exclude, std::size_t k, Rng& rng) const;

  /// Grid point outside `exclude` closest (Euclidean, normalized units) to
  /// `vector`, found by best-first search from snap(vector). Throws
  /// ExhaustionError if every input is excluded.
  TestInput nearest_unexcluded(const NormalizedInput& vector, const InputSet& exclude) const;

  /// Lazy lexicographic stream over every input, each exactly once.
  auto enumerate() const {
    return std::views::iota(std::uint64_t{0}, cardinality_) |
           std::views::transform([this](std::uint64_t r) { return unrank(r); });
  }

 private:
  std::vector<Dimension> dims_;
  std::uint64_t cardinality_ = 1;
};

}  // namespace testgen
