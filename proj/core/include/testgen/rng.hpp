#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace testgen {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Derives an independent child seed from a parent seed and a stream label.
std::uint64_t derive_seed(std::uint64_t parent, std::string_view label) noexcept;

/// Derives the i-th child seed of a parent seed.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept;

/// Named random streams for one generation run, all split from a single run
/// seed. Warmup sampling has its own stream so that every algorithm sees the
/// same warmup prefix for a given seed.
struct RunStreams {
  explicit RunStreams(std::uint64_t run_seed);

  Rng warmup;
  Rng dn_sampling;
  Rng gan_latent;
  Rng net_init;
  Rng shuffling;
};

}  // namespace testgen
