#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace lorakey {

std::uint64_t splitmix64(std::uint64_t x);

// Deterministic random source. The mt19937_64 engine output is fixed by the
// standard, and all distribution transforms are implemented here, so a given
// (seed, stream) pair produces the same values on every platform. Named
// streams give independent substreams for different purposes, which keeps
// paired-seed comparisons stable when one consumer is reconfigured.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(splitmix64(seed)) {}
  Rng(std::uint64_t seed, std::string_view stream);

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; one spare value is cached.
  double normal();

  // Uniform on [0, bound) without modulo bias. bound must be > 0.
  std::uint64_t uniform_int(std::uint64_t bound);

  bool bernoulli(double p) { return uniform() < p; }
  int bit() { return static_cast<int>(next_u64() >> 63); }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace lorakey
