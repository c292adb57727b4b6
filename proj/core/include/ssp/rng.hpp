#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ssp/errors.hpp"

namespace ssp {

// Deterministic randomness helpers.  mt19937_64 has a standard-specified
// output sequence, but the std:: distributions do not, so every draw that
// must reproduce bit-for-bit across toolchains goes through the hand-rolled
// transforms below instead of <random> distribution objects.

// splitmix64 step (Vigna).  Used both for seed whitening and for deriving
// independent per-trial streams from one master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Fixed seed-splitting rule: stream `index` of `master`.  Two calls with the
// same arguments always agree, and distinct indices give uncorrelated seeds.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t s = master ^ (0x9e3779b97f4a7c15ULL * (index + 1));
  return splitmix64(s);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1) with 53 random mantissa bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound) by rejection, so the result depends only
  // on the engine's output sequence.
  std::uint64_t uniform_below(std::uint64_t bound) {
    if (bound == 0) fail(errc::invalid_argument, "uniform_below: bound is 0");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % bound;
  }

  // Standard normal via Box-Muller; caches the second value of each pair.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1;
    do {
      u1 = uniform01();
    } while (u1 <= 0.0);
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// First p entries of a seeded Fisher-Yates shuffle of {0, ..., n-1}.
// Returned indices are 0-based and unsorted (selection order preserved).
inline std::vector<std::int64_t> sample_without_replacement(std::int64_t n,
                                                            std::int64_t p,
                                                            Rng& rng) {
  if (n <= 0 || p <= 0 || p > n)
    fail(errc::invalid_argument, "sample_without_replacement: need 0 < p <= n");
  std::vector<std::int64_t> pool(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
  for (std::int64_t i = 0; i < p; ++i) {
    const std::uint64_t j =
        static_cast<std::uint64_t>(i) +
        rng.uniform_below(static_cast<std::uint64_t>(n - i));
    std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
  }
  pool.resize(static_cast<std::size_t>(p));
  return pool;
}

}  // namespace ssp
