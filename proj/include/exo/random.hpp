#pragma once

// Deterministic random source. mt19937_64 output is pinned by the standard,
// but the std distributions are not, so the draws are hand-rolled here to keep
// runs bit-identical across compilers.

#include <cmath>
#include <cstdint>
#include <random>

namespace exo {

struct RandomSource {
  std::mt19937_64 engine;
  bool have_spare_normal = false;
  double spare_normal = 0.0;

  explicit RandomSource(uint64_t seed = 0) : engine(seed) {}

  uint64_t next_u64() { return engine(); }

  // uniform in [0, n) by rejection
  uint64_t uniform_int(uint64_t n) {
    if (n == 0) return 0;
    uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
      x = engine();
    } while (x >= limit);
    return x % n;
  }

  // uniform in [0, 1)
  double uniform() {
    return (engine() >> 11) * (1.0 / 9007199254740992.0);
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    if (have_spare_normal) {
      have_spare_normal = false;
      return spare_normal;
    }
    double u1, u2;
    do {
      u1 = uniform();
    } while (u1 <= 1e-300);
    u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_normal = r * std::sin(theta);
    have_spare_normal = true;
    return r * std::cos(theta);
  }

  double normal(double mean, double std) { return mean + std * normal(); }

  RandomSource fork(uint64_t stream) {
    // derive an independent child stream; splitmix64 over (state draw, tag)
    uint64_t z = engine() + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return RandomSource(z ^ (z >> 31));
  }
};

}  // namespace exo
