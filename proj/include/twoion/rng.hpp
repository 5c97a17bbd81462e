#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace twoion {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derive an independent stream seed from (master, index, channel).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index,
                                 std::uint64_t channel) {
  return splitmix64(splitmix64(master ^ splitmix64(index)) ^ splitmix64(channel + 0x51ed2701));
}

// mt19937_64 with hand-rolled variate transforms so that output sequences
// depend only on the seed, not on the standard library's distribution
// implementations (bit-exact reproducibility is part of the contract).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform in [0, 1).
  double uniform() {
    return (gen_() >> 11) * 0x1.0p-53;
  }

  // Uniform in (0, 1]; safe as argument of log().
  double uniform_pos() {
    return ((gen_() >> 11) + 1) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint32_t uniform_u32(std::uint32_t n) {
    // Lemire-style rejection-free enough for small n; exact via modulo of a
    // 64-bit draw is fine here (bias < 2^-32 for n < 2^32).
    return static_cast<std::uint32_t>(gen_() % n);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Box-Muller; one value per call, cache the spare.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform_pos();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace twoion
