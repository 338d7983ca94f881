#include <doctest.h>

#include <numeric>

#include "exo/delay.hpp"

using namespace exo;

// Reference pmf values enumerated offline from the definition
// p(d) proportional to exp(-((d-mean)/std)^2 / 2) over d in [1, horizon].

TEST_CASE("discrete gaussian pmf values") {
  auto p = delay_pmf(DelayDistribution::gaussian(5.0, 1.0), 30);
  CHECK(p[3] == doctest::Approx(0.241971084440).epsilon(1e-10));
  CHECK(p[4] == doctest::Approx(0.398942873811).epsilon(1e-10));
  CHECK(p[7] == doctest::Approx(0.004431855004).epsilon(1e-10));
  CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0));

  auto q = delay_pmf(DelayDistribution::gaussian(2.0, 0.1), 20);
  CHECK(q[1] == doctest::Approx(1.0).epsilon(1e-12));

  auto r = delay_pmf(DelayDistribution::gaussian(17.3098, 6.4991), 50);
  CHECK(r[0] == doctest::Approx(0.002646036397).epsilon(1e-9));
  CHECK(r[16] == doctest::Approx(0.061611033027).epsilon(1e-9));
  CHECK(r[39] == doctest::Approx(0.000139101300).epsilon(1e-9));

  // mean far beyond the horizon: mass piles up at the right edge
  auto s = delay_pmf(DelayDistribution::gaussian(30.0, 5.0), 10);
  CHECK(s[9] == doctest::Approx(0.571660016391).epsilon(1e-9));
  CHECK(s[0] == doctest::Approx(8.4461830032e-05).epsilon(1e-7));
}

TEST_CASE("constant delay rounds and clamps") {
  CHECK(constant_delay_value(DelayDistribution::constant(1.0)) == 1);
  CHECK(constant_delay_value(DelayDistribution::constant(-0.0115)) == 1);
  CHECK(constant_delay_value(DelayDistribution::constant(3.4)) == 3);
  CHECK(constant_delay_value(DelayDistribution::constant(3.5)) == 4);
  auto p = delay_pmf(DelayDistribution::constant(3.0), 10);
  CHECK(p[2] == 1.0);
  auto q = delay_pmf(DelayDistribution::constant(12.0), 5);  // clamped to edge
  CHECK(q[4] == 1.0);
}

TEST_CASE("expected delay for planning") {
  CHECK(expected_delay(DelayDistribution::gaussian(17.3098, 6.4991)) == 17);
  CHECK(expected_delay(DelayDistribution::gaussian(4.5577, 1.8173)) == 5);
  CHECK(expected_delay(DelayDistribution::gaussian(0.3, 1.0)) == 1);
  CHECK(expected_delay(DelayDistribution::constant(-0.0115)) == 1);
}

TEST_CASE("delay sampling is deterministic per seed and respects support") {
  RandomSource rng(7);
  DelayDistribution d = DelayDistribution::gaussian(5.0, 1.5);
  std::vector<int> a, b;
  for (int i = 0; i < 200; ++i) a.push_back(sample_delay(d, 30, rng));
  RandomSource rng2(7);
  for (int i = 0; i < 200; ++i) b.push_back(sample_delay(d, 30, rng2));
  CHECK(a == b);
  double mean = std::accumulate(a.begin(), a.end(), 0.0) / a.size();
  CHECK(mean > 4.0);
  CHECK(mean < 6.0);
  for (int v : a) {
    CHECK(v >= 1);
    CHECK(v <= 30);
  }
  // constant draws don't consume randomness
  RandomSource r3(1), r4(1);
  sample_delay(DelayDistribution::constant(2), 10, r3);
  CHECK(r3.next_u64() == r4.next_u64());
}

TEST_CASE("portable rng basics") {
  // mt19937_64 reference value from the standard: 10000th output
  std::mt19937_64 eng(5489u);
  for (int i = 0; i < 9999; ++i) eng();
  CHECK(eng() == 9981545732273789042ull);
  RandomSource rng(3);
  for (int i = 0; i < 1000; ++i) {
    double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(rng.uniform_int(7) < 7);
  }
  // normals have roughly the right first two moments
  RandomSource rn(11);
  double s = 0, s2 = 0;
  int n = 20000;
  for (int i = 0; i < n; ++i) {
    double x = rn.normal();
    s += x;
    s2 += x * x;
  }
  CHECK(std::abs(s / n) < 0.03);
  CHECK(std::abs(s2 / n - 1.0) < 0.05);
}
