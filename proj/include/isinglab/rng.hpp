#pragma once

// Seedable, splittable random streams. Substream seeds are derived by
// splitmix64 mixing so that streams indexed by (seed, tag...) are
// order-independent and reproducible across platforms. Gaussians use an
// explicit Box-Muller so outputs do not depend on the standard library's
// normal_distribution implementation.

#include <cmath>
#include <cstdint>
#include <random>

namespace isinglab {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives a substream seed from a base seed and a list of indices/tags.
template <typename... Tags>
std::uint64_t substream_seed(std::uint64_t seed, Tags... tags) {
  std::uint64_t s = splitmix64(seed);
  ((s = splitmix64(s ^ static_cast<std::uint64_t>(tags))), ...);
  return s;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform in [0, 1), 53 random bits.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  // Uniform in {0, ..., m-1} by rejection (unbiased).
  std::uint64_t uniform_index(std::uint64_t m) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % m;
    std::uint64_t v;
    do {
      v = gen_();
    } while (v >= limit);
    return v % m;
  }

  // Standard normal via Box-Muller; second value of each pair is cached.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1, u2;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Uniform spin in {-1, +1}.
  double spin() { return (gen_() >> 63) ? 1.0 : -1.0; }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace isinglab
