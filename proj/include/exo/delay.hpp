#pragma once

// Delay distributions over discrete delays d >= 1.
//
// ConstantDelay(c): all mass on max(1, round(c)).
// DiscreteGaussianDelay(mean, std): p(d) proportional to a Gaussian density at
// integer d, renormalized over the support [1, horizon].

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "exo/random.hpp"

namespace exo {

struct DelayDistribution {
  enum Kind { kConstant, kDiscreteGaussian };
  Kind kind = kConstant;
  double mean = 1.0;
  double std = 0.0;  // unused for kConstant

  static DelayDistribution constant(double c) { return {kConstant, c, 0.0}; }
  static DelayDistribution gaussian(double mean, double std) {
    return {kDiscreteGaussian, mean, std};
  }
  bool operator==(const DelayDistribution& o) const {
    return kind == o.kind && mean == o.mean && std == o.std;
  }
};

inline int constant_delay_value(const DelayDistribution& d) {
  long v = std::lround(d.mean);
  return v < 1 ? 1 : (int)v;
}

// pmf[i] = P(delay = i + 1), i in [0, horizon).
inline std::vector<double> delay_pmf(const DelayDistribution& d, int horizon) {
  if (horizon < 1) throw std::runtime_error("delay_pmf: horizon < 1");
  std::vector<double> pmf(horizon, 0.0);
  if (d.kind == DelayDistribution::kConstant) {
    int v = constant_delay_value(d);
    pmf[std::min(v, horizon) - 1] = 1.0;
    return pmf;
  }
  double sigma = d.std;
  if (!(sigma > 0)) sigma = 1e-6;
  // log weights, normalized with max subtraction so tiny sigmas don't underflow
  std::vector<double> lw(horizon);
  double mx = -1e300;
  for (int k = 1; k <= horizon; ++k) {
    double z = (k - d.mean) / sigma;
    lw[k - 1] = -0.5 * z * z;
    if (lw[k - 1] > mx) mx = lw[k - 1];
  }
  double Z = 0.0;
  for (int i = 0; i < horizon; ++i) {
    pmf[i] = std::exp(lw[i] - mx);
    Z += pmf[i];
  }
  for (int i = 0; i < horizon; ++i) pmf[i] /= Z;
  return pmf;
}

// Inverse-CDF sample of a delay in [1, horizon]. Constant delays do not
// consume randomness.
inline int sample_delay(const DelayDistribution& d, int horizon,
                        RandomSource& rng) {
  if (d.kind == DelayDistribution::kConstant)
    return std::min(constant_delay_value(d), horizon);
  std::vector<double> pmf = delay_pmf(d, horizon);
  double u = rng.uniform();
  double c = 0.0;
  for (int i = 0; i < horizon; ++i) {
    c += pmf[i];
    if (u < c) return i + 1;
  }
  return horizon;
}

// Deterministic delay used when planning: the rounded mean, at least 1.
inline int expected_delay(const DelayDistribution& d) {
  long v = std::lround(d.mean);
  return v < 1 ? 1 : (int)v;
}

inline std::string delay_str(const DelayDistribution& d) {
  char buf[64];
  if (d.kind == DelayDistribution::kConstant) {
    std::snprintf(buf, sizeof buf, "ConstantDelay(%.4f)", d.mean);
  } else {
    std::snprintf(buf, sizeof buf, "DiscreteGaussianDelay(%.4f, %.4f)", d.mean,
                  d.std);
  }
  return buf;
}

}  // namespace exo
