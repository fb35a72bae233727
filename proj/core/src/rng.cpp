#include "testgen/rng.hpp"

namespace testgen {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t parent, std::string_view label) noexcept {
  // FNV-1a over the label, then mixed with the parent.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(parent ^ splitmix64(h));
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(parent) + index);
}

RunStreams::RunStreams(std::uint64_t run_seed)
    : warmup(derive_seed(run_seed, "warmup-sampling")),
      dn_sampling(derive_seed(run_seed, "dn-sampling")),
      gan_latent(derive_seed(run_seed, "gan-latent")),
      net_init(derive_seed(run_seed, "net-init")),
      shuffling(derive_seed(run_seed, "shuffling")) {}

}  // namespace testgen
