#pragma once

#include <cstdint>
#include <random>

namespace sparsereg {

// Deterministic random source. mt19937_64 is fully specified by the
// standard, and the draws below avoid the implementation-defined
// std::*_distribution classes, so a given seed produces the same stream
// on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; values are produced in pairs.
  double normal();

  // Uniform integer on [0, n), n > 0, by rejection.
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// SplitMix64-style mixing used to derive per-replication seeds from a
// master seed; identical inputs always map to the same child seed.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c);

}  // namespace sparsereg
