#pragma once

#include <cstdint>
#include <cmath>
#include <random>
#include <vector>

namespace dnazen {

// mt19937_64 with hand-rolled draws. std::uniform_int_distribution and
// friends are implementation-defined, so training runs would not be
// reproducible across standard libraries if we used them.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  // [0, 1) with 53 bits of precision.
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

  // [0, n); n must be > 0. Modulo bias is negligible for n << 2^64.
  uint64_t uniform_below(uint64_t n) { return next_u64() % n; }

  // Box-Muller, one value per call (the pair's second half is cached).
  double normal(double mean, double stddev) {
    if (have_spare_) {
      have_spare_ = false;
      return mean + stddev * spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return mean + stddev * r * std::cos(theta);
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(uniform_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // splitmix64-style stream derivation: mix(seed, tag) gives an independent
  // deterministic stream per (epoch, example) pair.
  static uint64_t mix(uint64_t a, uint64_t b) {
    uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace dnazen
