#include <doctest.h>

#include <cmath>
#include <set>

#include "caralab/rng.hpp"

using namespace caralab;

TEST_CASE("counter stream reproduces the SplitMix64 sequence") {
  const Stream s{0};
  CHECK(s.at(0) == 0xE220A8397B1DCDAFull);
  CHECK(s.at(1) == 0x6E789E6AA1B965F4ull);
  CHECK(s.at(2) == 0x06C45D188009454Full);
  CHECK(Stream{42}.at(0) == 0xBDD732262FEB6E95ull);
}

TEST_CASE("outputs are order independent pure functions of the counter") {
  const Stream s{123456789};
  const auto backwards = s.at(999);
  for (std::uint64_t c = 0; c < 999; ++c) (void)s.at(c);
  CHECK(s.at(999) == backwards);
}

TEST_CASE("uniform lands in the half open unit interval") {
  const Stream s{7};
  double lo = 1.0, hi = 0.0, sum = 0.0;
  const int n = 20000;
  for (int c = 0; c < n; ++c) {
    const double u = s.uniform(c);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  CHECK(lo >= 0.0);
  CHECK(hi < 1.0);
  // Mean of n uniforms has sd 1/sqrt(12 n) ~ 0.002; allow 5 sigma.
  CHECK(std::abs(sum / n - 0.5) < 0.011);
}

TEST_CASE("derived streams do not collide") {
  const Stream base{2026};
  std::set<std::uint64_t> keys;
  for (std::uint64_t label = 0; label < 100; ++label)
    keys.insert(base.derive(label).key);
  keys.insert(base.derive("volume").key);
  keys.insert(base.derive("metric").key);
  keys.insert(base.key);
  CHECK(keys.size() == 103);
  CHECK(base.derive("volume").key == base.derive("volume").key);
  CHECK(base.derive("volume").key != base.derive("volumf").key);
}

TEST_CASE("sequential normals have the right first two moments") {
  SeqStream g(Stream{31415});
  const int n = 40000;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = g.next_normal();
    s1 += x;
    s2 += x * x;
  }
  const double mean = s1 / n;
  const double var = s2 / n - mean * mean;
  CHECK(std::abs(mean) < 0.03);
  CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("complex directions are unit length and isotropic on average") {
  SeqStream g(Stream{99});
  const int n = 4000;
  CVec acc = CVec::Zero(3);
  double planes = 0.0;
  for (int i = 0; i < n; ++i) {
    const CVec v = g.next_direction(3);
    CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));
    acc += v;
    planes += std::norm(v[0]);
  }
  CHECK((acc / n).norm() < 0.05);
  // |v_0|^2 averages 1/3 for an isotropic direction in C^3.
  CHECK(planes / n == doctest::Approx(1.0 / 3.0).epsilon(0.1));
}
