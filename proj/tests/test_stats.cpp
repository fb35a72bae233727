#include <gtest/gtest.h>

#include <cmath>

#include "testgen/errors.hpp"
#include "testgen/stats.hpp"

using namespace testgen;

TEST(Sma, IdentityWindow) {
  const std::vector<double> s{0.3, 0.1, 0.9, 0.4};
  EXPECT_EQ(sma(s, 1), s);
}

TEST(Sma, HandMean) {
  const std::vector<double> s{0.0, 1.0, 1.0};
  const auto out = sma(s, 3);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_NEAR(out[0], 2.0 / 3.0, 1e-15);
  const auto two = sma(s, 2);
  EXPECT_EQ(two, (std::vector<double>{0.5, 1.0}));
}

TEST(Sma, ConstantSeries) {
  const std::vector<double> s(20, 0.37);
  for (double v : sma(s, 7)) EXPECT_NEAR(v, 0.37, 1e-15);
  EXPECT_EQ(sma(s, 7).size(), 14u);
}

TEST(Sma, Contracts) {
  const std::vector<double> s{1.0, 2.0};
  EXPECT_THROW(sma(s, 3), ContractViolation);
  EXPECT_THROW(sma(s, 0), ContractViolation);
}

TEST(Sma, MonotoneSeriesStayMonotone) {
  // Every nondecreasing series over {0, 0.5, 1} of length 6, every window.
  for (int mask = 0; mask < 729; ++mask) {
    std::vector<double> s;
    int m = mask;
    for (int i = 0; i < 6; ++i) {
      s.push_back(0.5 * (m % 3));
      m /= 3;
    }
    if (!std::is_sorted(s.begin(), s.end())) continue;
    for (std::size_t w = 1; w <= s.size(); ++w) {
      const auto out = sma(s, w);
      for (std::size_t j = 1; j < out.size(); ++j) EXPECT_GE(out[j], out[j - 1] - 1e-15);
    }
  }
}

TEST(Histogram, PositiveColumn) {
  const std::vector<double> v{1.0, 1.0};
  const auto h = histogram(v, 10);
  ASSERT_EQ(h.size(), 10u);
  EXPECT_EQ(h.back(), 2u);
  for (std::size_t i = 0; i + 1 < h.size(); ++i) EXPECT_EQ(h[i], 0u);
}

TEST(Histogram, LowerEdgeAndEmpty) {
  const auto h = histogram(std::vector<double>{0.0}, 10);
  EXPECT_EQ(h.front(), 1u);
  for (std::size_t c : histogram(std::vector<double>{}, 10)) EXPECT_EQ(c, 0u);
}

TEST(Histogram, LastColumnCountsExactlyOnes) {
  const std::vector<double> v{0.0, 0.05, 0.11, 0.5, 0.95, 0.999999, 1.0, 1.0, 1.0};
  const auto h = histogram(v, 10);
  std::size_t total = 0;
  for (std::size_t c : h) total += c;
  EXPECT_EQ(total, v.size());
  EXPECT_EQ(h.back(), 3u);
  EXPECT_EQ(h[0], 3u);
  EXPECT_EQ(h[4], 1u);
  EXPECT_EQ(h[8], 2u);
}

TEST(Histogram, Contracts) {
  EXPECT_THROW(histogram(std::vector<double>{1.2}, 10), ContractViolation);
  EXPECT_THROW(histogram(std::vector<double>{-0.1}, 10), ContractViolation);
  EXPECT_THROW(histogram(std::vector<double>{0.5}, 1), ContractViolation);
}

TEST(Moments, MeanAndSampleStddev) {
  const std::vector<double> v{2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0};
  EXPECT_DOUBLE_EQ(mean(v), 5.0);
  EXPECT_NEAR(stddev(v), std::sqrt(32.0 / 7.0), 1e-12);
  EXPECT_EQ(stddev(std::vector<double>{3.0}), 0.0);
}
