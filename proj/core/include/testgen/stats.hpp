#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace testgen {

/// Simple moving average: element j is the mean of series[j .. j + window - 1].
std::vector<double> sma(std::span<const double> series, std::size_t window);

/// Fitness histogram with `bins` columns. The first bins - 1 columns split
/// [0, 1) into equal widths; the last column holds exactly the values equal
/// to 1.0, i.e. the positive tests. Requires bins >= 2 and values in [0, 1].
std::vector<std::size_t> histogram(std::span<const double> values, std::size_t bins);

double mean(std::span<const double> values);

/// Sample standard deviation (n - 1 denominator); 0 for fewer than 2 values.
double stddev(std::span<const double> values);

}  // namespace testgen
