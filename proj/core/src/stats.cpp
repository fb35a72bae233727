#include "testgen/stats.hpp"

#include <algorithm>
#include <cmath>

#include "testgen/errors.hpp"

namespace testgen {

using detail::require;

std::vector<double> sma(std::span<const double> series, std::size_t window) {
  require(window >= 1, "sma: window must be >= 1");
  require(window <= series.size(), "sma: window exceeds series length");
  std::vector<double> out;
  out.reserve(series.size() - window + 1);
  for (std::size_t j = 0; j + window <= series.size(); ++j) {
    double sum = 0.0;
    for (std::size_t i = j; i < j + window; ++i) sum += series[i];
    out.push_back(sum / static_cast<double>(window));
  }
  return out;
}

std::vector<std::size_t> histogram(std::span<const double> values, std::size_t bins) {
  require(bins >= 2, "histogram: at least 2 bins are required");
  std::vector<std::size_t> counts(bins, 0);
  const std::size_t fractional_bins = bins - 1;
  for (double v : values) {
    require(v >= 0.0 && v <= 1.0, "histogram: value outside [0, 1]");
    if (v == 1.0) {
      ++counts.back();
      continue;
    }
    const auto idx = static_cast<std::size_t>(std::floor(v * static_cast<double>(fractional_bins)));
    ++counts[std::min(idx, fractional_bins - 1)];
  }
  return counts;
}

double mean(std::span<const double> values) {
  require(!values.empty(), "mean: empty input");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double stddev(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

}  // namespace testgen
