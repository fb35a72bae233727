#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "testgen/errors.hpp"
#include "testgen/input_space.hpp"

using namespace testgen;

namespace {

InputSpace space_with_counts(std::array<std::size_t, 6> counts) {
  std::vector<Dimension> dims;
  for (std::size_t d = 0; d < 6; ++d) {
    Dimension dim{"d" + std::to_string(d), {}};
    for (std::size_t i = 0; i < counts[d]; ++i) dim.levels.push_back(10.0 * static_cast<double>(i));
    dims.push_back(dim);
  }
  return InputSpace(dims);
}

TestInput input_of(std::array<std::size_t, 6> idx) { return TestInput{idx}; }

std::vector<TestInput> all_inputs(const InputSpace& s) {
  std::vector<TestInput> out;
  for (const TestInput& t : s.enumerate()) out.push_back(t);
  return out;
}

InputSet all_set(const InputSpace& s) {
  const auto v = all_inputs(s);
  return InputSet(v.begin(), v.end());
}

}  // namespace

TEST(InputSpace, Cardinality) {
  EXPECT_EQ(InputSpace::default_board().cardinality(), 665000u);
  EXPECT_EQ(space_with_counts({5, 19, 10, 5, 14, 10}).cardinality(), 665000u);
  EXPECT_EQ(space_with_counts({1, 1, 1, 1, 1, 1}).cardinality(), 1u);
  EXPECT_EQ(space_with_counts({2, 2, 2, 2, 2, 2}).cardinality(), 64u);
}

TEST(InputSpace, DefaultBoardLevels) {
  const InputSpace s = InputSpace::default_board();
  EXPECT_EQ(s.dim(Dim::kBigFreq).levels.front(), 200.0);
  EXPECT_EQ(s.dim(Dim::kBigFreq).levels.back(), 2000.0);
  EXPECT_EQ(s.dim(Dim::kLittleFreq).levels.back(), 1500.0);
  EXPECT_EQ(s.dim(Dim::kBigUtil).levels.front(), 0.1);
  EXPECT_EQ(s.dim(Dim::kBigUtil).levels.back(), 1.0);
  EXPECT_EQ(s.dim(Dim::kLittleCpus).levels.front(), 0.0);
  EXPECT_EQ(s.dims()[0].name, "big_cpus");
  EXPECT_EQ(s.dims()[5].name, "little_util");
}

TEST(InputSpace, ConstructionContracts) {
  std::vector<Dimension> five(5, Dimension{"x", {1.0}});
  EXPECT_THROW(InputSpace{five}, ContractViolation);
  std::vector<Dimension> bad(6, Dimension{"x", {1.0, 2.0}});
  bad[2].levels = {2.0, 1.0};
  EXPECT_THROW(InputSpace{bad}, ContractViolation);
  bad[2].levels = {};
  EXPECT_THROW(InputSpace{bad}, ContractViolation);
  bad[2].levels = {1.0, 1.0};
  EXPECT_THROW(InputSpace{bad}, ContractViolation);
}

TEST(Normalize, Endpoints) {
  const InputSpace s = InputSpace::default_board();
  const NormalizedInput lo = s.normalize(input_of({0, 0, 0, 0, 0, 0}));
  const NormalizedInput hi = s.normalize(input_of({4, 18, 9, 4, 13, 9}));
  for (double v : lo.values) EXPECT_EQ(v, -1.0);
  for (double v : hi.values) EXPECT_EQ(v, 1.0);
  EXPECT_EQ(s.normalize(input_of({2, 0, 0, 0, 0, 0})).values[0], 0.0);
}

TEST(Normalize, SingleLevelIsZeroAndInvalidRejected) {
  const InputSpace s = space_with_counts({1, 3, 1, 1, 1, 1});
  EXPECT_EQ(s.normalize(input_of({0, 1, 0, 0, 0, 0})).values[0], 0.0);
  EXPECT_EQ(s.normalize(input_of({0, 1, 0, 0, 0, 0})).values[1], 0.0);
  EXPECT_THROW(s.normalize(input_of({0, 3, 0, 0, 0, 0})), ContractViolation);
}

TEST(Normalize, StrictlyMonotonePerDimension) {
  const InputSpace s = InputSpace::default_board();
  for (std::size_t d = 0; d < 6; ++d) {
    double prev = -2.0;
    for (std::size_t i = 0; i < s.dims()[d].levels.size(); ++i) {
      TestInput t;
      t.level_indices[d] = i;
      const double v = s.normalize(t).values[d];
      EXPECT_GT(v, prev);
      prev = v;
    }
  }
}

TEST(Snap, RoundTripExhaustiveSmall) {
  const InputSpace s = space_with_counts({2, 2, 2, 2, 2, 2});
  for (const TestInput& t : s.enumerate()) EXPECT_EQ(s.snap(s.normalize(t)), t);
}

TEST(Snap, RoundTripDefaultBoard) {
  const InputSpace s = InputSpace::default_board();
  std::size_t checked = 0;
  for (const TestInput& t : s.enumerate()) {
    ASSERT_EQ(s.snap(s.normalize(t)), t);
    ++checked;
  }
  EXPECT_EQ(checked, 665000u);
}

TEST(Snap, EndpointsClampAndTies) {
  const InputSpace s = InputSpace::default_board();
  NormalizedInput v;
  v.values = {-1.0, 1.0, -1.0, 1.0, -5.0, 7.0};
  EXPECT_EQ(s.snap(v), input_of({0, 18, 0, 4, 0, 9}));

  const InputSpace two = space_with_counts({2, 2, 2, 2, 2, 2});
  NormalizedInput mid;
  EXPECT_EQ(two.snap(mid), input_of({0, 0, 0, 0, 0, 0}));
  mid.values[0] = 1e-9;
  EXPECT_EQ(two.snap(mid)[Dim::kBigCpus], 1u);
}

TEST(Snap, NearestLevel) {
  const InputSpace s = space_with_counts({5, 1, 1, 1, 1, 1});
  // Normalized grid of 5 levels: -1, -0.5, 0, 0.5, 1.
  const std::pair<double, std::size_t> cases[] = {
      {-0.76, 0}, {-0.74, 1}, {-0.25, 1}, {0.1, 2}, {0.26, 3}, {0.9, 4}};
  for (const auto& [x, want] : cases) {
    NormalizedInput v;
    v.values[0] = x;
    EXPECT_EQ(s.snap(v)[Dim::kBigCpus], want) << x;
  }
}

TEST(RankUnrank, BijectionAndLexicographic) {
  const InputSpace s = space_with_counts({2, 3, 1, 2, 1, 2});
  std::uint64_t r = 0;
  std::optional<TestInput> prev;
  for (const TestInput& t : s.enumerate()) {
    EXPECT_EQ(s.rank(t), r);
    EXPECT_EQ(s.unrank(r), t);
    if (prev) EXPECT_LT(*prev, t);
    prev = t;
    ++r;
  }
  EXPECT_EQ(r, s.cardinality());
  EXPECT_THROW(s.unrank(s.cardinality()), ContractViolation);
}

TEST(Enumerate, MinimalSpace) {
  const InputSpace s = space_with_counts({2, 1, 1, 1, 1, 1});
  const std::vector<TestInput> items = all_inputs(s);
  ASSERT_EQ(items.size(), 2u);
  EXPECT_EQ(items[0], input_of({0, 0, 0, 0, 0, 0}));
  EXPECT_EQ(items[1], input_of({1, 0, 0, 0, 0, 0}));
}

TEST(Enumerate, NoDuplicates) {
  const InputSpace s = space_with_counts({3, 2, 2, 3, 2, 2});
  InputSet seen;
  for (const TestInput& t : s.enumerate()) EXPECT_TRUE(seen.insert(t).second);
  EXPECT_EQ(seen.size(), s.cardinality());
}

TEST(SampleUniform, ForcedChoice) {
  const InputSpace s = space_with_counts({2, 2, 2, 2, 2, 2});
  InputSet exclude;
  for (const TestInput& t : s.enumerate()) exclude.insert(t);
  const TestInput keep = input_of({1, 0, 1, 0, 1, 0});
  exclude.erase(keep);
  Rng rng(1);
  const auto out = s.sample_uniform(exclude, 1, rng);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0], keep);
  EXPECT_THROW(s.sample_uniform(exclude, 2, rng), ExhaustionError);
}

TEST(SampleUniform, FullPermutation) {
  const InputSpace s = space_with_counts({2, 2, 2, 2, 2, 2});
  Rng rng(2);
  const auto out = s.sample_uniform({}, 64, rng);
  const InputSet set(out.begin(), out.end());
  EXPECT_EQ(set.size(), 64u);
  for (const TestInput& t : s.enumerate()) EXPECT_TRUE(set.contains(t));
}

TEST(SampleUniform, ExhaustionMatchesEnumerate) {
  const InputSpace s = space_with_counts({3, 1, 2, 1, 2, 2});
  Rng rng(3);
  InputSet drawn;
  while (drawn.size() < s.cardinality()) {
    const TestInput t = s.sample_uniform(drawn, 1, rng).front();
    EXPECT_FALSE(drawn.contains(t));
    drawn.insert(t);
  }
  const InputSet all = all_set(s);
  EXPECT_EQ(drawn, all);
  EXPECT_THROW(s.sample_uniform(drawn, 1, rng), ExhaustionError);
}

TEST(SampleUniform, NeverExcludedOrDuplicate) {
  const InputSpace s = InputSpace::default_board();
  Rng rng(4);
  InputSet exclude;
  for (const auto& t : s.sample_uniform({}, 300, rng)) exclude.insert(t);
  for (int rep = 0; rep < 20; ++rep) {
    const auto out = s.sample_uniform(exclude, 500, rng);
    InputSet seen;
    for (const auto& t : out) {
      EXPECT_FALSE(exclude.contains(t));
      EXPECT_TRUE(seen.insert(t).second);
      EXPECT_TRUE(s.contains(t));
    }
  }
}

TEST(SampleUniform, DenseBranchDistinct) {
  const InputSpace s = space_with_counts({2, 2, 2, 2, 2, 2});
  Rng rng(5);
  InputSet exclude;
  for (const auto& t : s.sample_uniform({}, 40, rng)) exclude.insert(t);
  const auto out = s.sample_uniform(exclude, 20, rng);
  InputSet seen;
  for (const auto& t : out) {
    EXPECT_FALSE(exclude.contains(t));
    EXPECT_TRUE(seen.insert(t).second);
  }
}

TEST(SampleUniform, BinomialFrequencies) {
  const InputSpace s = space_with_counts({2, 2, 2, 2, 2, 2});
  Rng rng(6);
  std::map<std::uint64_t, int> counts;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) ++counts[s.rank(s.sample_uniform({}, 1, rng).front())];
  const double p = 1.0 / 64.0;
  const double mean = draws * p;
  const double sigma = std::sqrt(draws * p * (1.0 - p));
  ASSERT_EQ(counts.size(), 64u);
  for (const auto& [r, c] : counts) EXPECT_LE(std::abs(c - mean), 5.0 * sigma) << "rank " << r;
}

TEST(SampleUniform, DeterministicPerSeed) {
  const InputSpace s = InputSpace::default_board();
  Rng a(7);
  Rng b(7);
  EXPECT_EQ(s.sample_uniform({}, 50, a), s.sample_uniform({}, 50, b));
}

TEST(NearestUnexcluded, MatchesBruteForce) {
  const InputSpace s = space_with_counts({3, 4, 2, 3, 5, 2});
  Rng rng(8);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  for (int trial = 0; trial < 200; ++trial) {
    InputSet exclude;
    for (const auto& t : s.sample_uniform({}, 1 + trial % 300, rng)) exclude.insert(t);
    NormalizedInput v;
    for (double& c : v.values) c = u(rng);
    const TestInput got = s.nearest_unexcluded(v, exclude);
    EXPECT_FALSE(exclude.contains(got));

    auto dist = [&](const TestInput& t) {
      const NormalizedInput n = s.normalize(t);
      double d2 = 0.0;
      for (std::size_t d = 0; d < 6; ++d) {
        const double diff = n.values[d] - std::clamp(v.values[d], -1.0, 1.0);
        d2 += diff * diff;
      }
      return d2;
    };
    double best = 1e300;
    for (const TestInput& t : s.enumerate()) {
      if (!exclude.contains(t)) best = std::min(best, dist(t));
    }
    EXPECT_NEAR(dist(got), best, 1e-12) << "trial " << trial;
  }
}

TEST(NearestUnexcluded, UnexcludedSnapIsReturnedAndFullExclusionThrows) {
  const InputSpace s = space_with_counts({2, 2, 2, 2, 2, 2});
  NormalizedInput v;
  v.values = {0.9, -0.9, 0.9, -0.9, 0.9, -0.9};
  EXPECT_EQ(s.nearest_unexcluded(v, {}), s.snap(v));
  const InputSet all = all_set(s);
  EXPECT_THROW(s.nearest_unexcluded(v, all), ExhaustionError);
}
