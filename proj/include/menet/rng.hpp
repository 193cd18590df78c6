#pragma once

#include <cstdint>

namespace menet {

// SplitMix64 generator. All stochastic components draw from this so results
// are identical across platforms and standard libraries; std:: distributions
// are implementation-defined and would break the byte-reproducibility
// guarantees of deterministic mode.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased uniform integer in [0, n). n must be > 0.
  uint64_t below(uint64_t n) {
    const uint64_t threshold = (0ULL - n) % n;
    for (;;) {
      const uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

 private:
  uint64_t state_;
};

inline uint64_t hash_mix(uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

// Derives an independent stream seed from a base seed and up to two stream
// indices (e.g. node index and walk number). Used to keep parallel walk
// simulation deterministic.
inline uint64_t derive_seed(uint64_t seed, uint64_t a, uint64_t b = 0) {
  uint64_t h = hash_mix(seed + 0x9e3779b97f4a7c15ULL);
  h = hash_mix(h ^ (a + 0xbf58476d1ce4e5b9ULL));
  h = hash_mix(h ^ (b + 0x94d049bb133111ebULL));
  return h;
}

}  // namespace menet
