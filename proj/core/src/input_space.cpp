#include "testgen/input_space.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>
#include <tuple>

#include "testgen/errors.hpp"

namespace testgen {

using detail::require;

std::size_t TestInputHash::operator()(const TestInput& t) const noexcept {
  std::uint64_t h = 0x84222325cbf29ce4ULL;
  for (std::size_t idx : t.level_indices) h = splitmix64(h ^ idx);
  return static_cast<std::size_t>(h);
}

InputSpace::InputSpace(std::vector<Dimension> dims) : dims_(std::move(dims)) {
  if (dims_.size() != kInputDims) {
    throw ContractViolation("input space: expected exactly 6 dimensions, got " +
                            std::to_string(dims_.size()));
  }
  for (const auto& d : dims_) {
    require(!d.levels.empty(), "input space: dimension '" + d.name + "' has no levels");
    for (std::size_t i = 0; i < d.levels.size(); ++i) {
      require(std::isfinite(d.levels[i]),
              "input space: dimension '" + d.name + "' has a non-finite level");
      if (i > 0) {
        require(d.levels[i] > d.levels[i - 1],
                "input space: levels of '" + d.name + "' must be strictly increasing");
      }
    }
    cardinality_ *= d.levels.size();
  }
}

InputSpace InputSpace::default_board() {
  auto range = [](int first, int last, int step, double scale) {
    std::vector<double> v;
    for (int x = first; x <= last; x += step) v.push_back(x / scale);
    return v;
  };
  return InputSpace({
      {"big_cpus", range(0, 4, 1, 1.0)},
      {"big_freq", range(200, 2000, 100, 1.0)},
      {"big_util", range(1, 10, 1, 10.0)},
      {"little_cpus", range(0, 4, 1, 1.0)},
      {"little_freq", range(200, 1500, 100, 1.0)},
      {"little_util", range(1, 10, 1, 10.0)},
  });
}

bool InputSpace::contains(const TestInput& input) const noexcept {
  for (std::size_t d = 0; d < kInputDims; ++d) {
    if (input.level_indices[d] >= dims_[d].levels.size()) return false;
  }
  return true;
}

double InputSpace::value(const TestInput& input, Dim d) const {
  require(contains(input), "input space: level index out of range");
  return dim(d).levels[input[d]];
}

NormalizedInput InputSpace::normalize(const TestInput& input) const {
  require(contains(input), "normalize: level index out of range");
  NormalizedInput out;
  for (std::size_t d = 0; d < kInputDims; ++d) {
    const std::size_t levels = dims_[d].levels.size();
    out.values[d] = levels == 1 ? 0.0
                                : -1.0 + 2.0 * static_cast<double>(input.level_indices[d]) /
                                             static_cast<double>(levels - 1);
  }
  return out;
}

TestInput InputSpace::snap(const NormalizedInput& vector) const {
  TestInput out;
  for (std::size_t d = 0; d < kInputDims; ++d) {
    const std::size_t levels = dims_[d].levels.size();
    if (levels == 1) {
      out.level_indices[d] = 0;
      continue;
    }
    const double span = static_cast<double>(levels - 1);
    const double c = std::clamp(vector.values[d], -1.0, 1.0);
    auto norm = [span](std::size_t j) { return -1.0 + 2.0 * static_cast<double>(j) / span; };
    const double pos = (c + 1.0) * 0.5 * span;
    std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    lo = std::min(lo, levels - 1);
    // Floating error in `pos` can land one cell off; examine neighbours.
    std::size_t best = lo;
    double best_dist = std::abs(c - norm(lo));
    const std::size_t first = lo == 0 ? 0 : lo - 1;
    const std::size_t last = std::min(lo + 1, levels - 1);
    for (std::size_t j = first; j <= last; ++j) {
      const double dist = std::abs(c - norm(j));
      if (dist < best_dist || (dist == best_dist && j < best)) {
        best = j;
        best_dist = dist;
      }
    }
    out.level_indices[d] = best;
  }
  return out;
}

TestInput InputSpace::nearest_unexcluded(const NormalizedInput& vector,
                                         const InputSet& exclude) const {
  std::uint64_t excluded = 0;
  for (const auto& t : exclude) {
    if (contains(t)) ++excluded;
  }
  if (excluded >= cardinality_) throw ExhaustionError("nearest_unexcluded: every input is excluded");

  NormalizedInput target = vector;
  for (double& c : target.values) c = std::clamp(c, -1.0, 1.0);
  auto distance = [&](const TestInput& t) {
    const NormalizedInput n = normalize(t);
    double d2 = 0.0;
    for (std::size_t d = 0; d < kInputDims; ++d) {
      const double diff = n.values[d] - target.values[d];
      d2 += diff * diff;
    }
    return d2;
  };

  // Each coordinate term is unimodal around the snapped index, so every grid
  // point has a non-increasing neighbour path back to the start and nodes pop
  // in order of distance.
  using Entry = std::tuple<double, std::uint64_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
  std::unordered_set<std::uint64_t> seen;
  const TestInput start = snap(target);
  frontier.emplace(distance(start), rank(start));
  seen.insert(rank(start));
  while (!frontier.empty()) {
    const auto [d2, r] = frontier.top();
    frontier.pop();
    const TestInput t = unrank(r);
    if (!exclude.contains(t)) return t;
    for (std::size_t d = 0; d < kInputDims; ++d) {
      for (int step : {-1, 1}) {
        TestInput n = t;
        if (step < 0 && n.level_indices[d] == 0) continue;
        n.level_indices[d] += static_cast<std::size_t>(step);
        if (n.level_indices[d] >= dims_[d].levels.size()) continue;
        const std::uint64_t nr = rank(n);
        if (seen.insert(nr).second) frontier.emplace(distance(n), nr);
      }
    }
  }
  throw ExhaustionError("nearest_unexcluded: search exhausted");
}

std::uint64_t InputSpace::rank(const TestInput& input) const {
  require(contains(input), "rank: level index out of range");
  std::uint64_t r = 0;
  for (std::size_t d = 0; d < kInputDims; ++d) {
    r = r * dims_[d].levels.size() + input.level_indices[d];
  }
  return r;
}

TestInput InputSpace::unrank(std::uint64_t rank) const {
  require(rank < cardinality_, "unrank: rank out of range");
  TestInput out;
  for (std::size_t d = kInputDims; d-- > 0;) {
    const std::uint64_t levels = dims_[d].levels.size();
    out.level_indices[d] = static_cast<std::size_t>(rank % levels);
    rank /= levels;
  }
  return out;
}

std::vector<TestInput> InputSpace::sample_uniform(const InputSet& exclude, std::size_t k,
                                                  Rng& rng) const {
  std::uint64_t excluded = 0;
  for (const auto& t : exclude) {
    if (contains(t)) ++excluded;
  }
  const std::uint64_t remaining = cardinality_ - excluded;
  if (k > remaining) {
    throw ExhaustionError("sample_uniform: requested " + std::to_string(k) + " inputs but only " +
                          std::to_string(remaining) + " remain");
  }

  std::vector<TestInput> out;
  out.reserve(k);

  if (2 * (excluded + k) <= cardinality_) {
    // Sparse case: rejection sampling over ranks.
    std::uniform_int_distribution<std::uint64_t> pick(0, cardinality_ - 1);
    InputSet chosen;
    while (out.size() < k) {
      const TestInput t = unrank(pick(rng));
      if (exclude.contains(t) || chosen.contains(t)) continue;
      chosen.insert(t);
      out.push_back(t);
    }
    return out;
  }

  // Dense case: materialize the remaining pool and partially shuffle it.
  std::vector<std::uint64_t> pool;
  pool.reserve(remaining);
  for (std::uint64_t r = 0; r < cardinality_; ++r) {
    if (!exclude.contains(unrank(r))) pool.push_back(r);
  }
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
    out.push_back(unrank(pool[i]));
  }
  return out;
}

}  // namespace testgen
