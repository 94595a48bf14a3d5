#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdlib>
#include <numbers>
#include <vector>

#include "caralab/domain.hpp"
#include "caralab/extremal.hpp"
#include "caralab/volume.hpp"

using namespace caralab;

namespace {

constexpr double kPi = std::numbers::pi;

CVec cv(std::initializer_list<Complex> xs) {
  CVec v(static_cast<int>(xs.size()));
  int i = 0;
  for (const Complex& x : xs) v[i++] = x;
  return v;
}

const Stream kRoot = Stream{20260814};

void check_mc_close(const VolumeEstimate& est, double truth) {
  CHECK(std::abs(est.value - truth) <= 3.0 * est.std_error + 1e-9 * truth);
  CHECK(est.std_error <= 0.01 * truth);
}

}  // namespace

TEST_CASE("closed volumes of the model domains") {
  CHECK(zoo_volume_closed(DomainSpec::polydisc({1.0, 1.0})) ==
        doctest::Approx(kPi * kPi).epsilon(1e-12));
  CHECK(zoo_volume_closed(DomainSpec::polydisc({1.0, 2.0})) ==
        doctest::Approx(4.0 * kPi * kPi).epsilon(1e-12));
  CHECK(zoo_volume_closed(DomainSpec::ball(2, 1.0)) ==
        doctest::Approx(kPi * kPi / 2.0).epsilon(1e-12));
  CHECK(zoo_volume_closed(DomainSpec::ball(3, 1.0)) ==
        doctest::Approx(kPi * kPi * kPi / 6.0).epsilon(1e-12));
  CHECK(zoo_volume_closed(DomainSpec::diamond({1.0, 1.0})) ==
        doctest::Approx(kPi * kPi / 6.0).epsilon(1e-12));
  CHECK(zoo_volume_closed(DomainSpec::pball(1.0, {1.0, 1.0})) ==
        doctest::Approx(kPi * kPi / 6.0).epsilon(1e-12));
  // Exponent 1/2 on every coordinate is exactly the diamond.
  CHECK(zoo_volume_closed(
            DomainSpec::complex_ellipsoid({0.5, 0.5}, {1.0, 1.0})) ==
        doctest::Approx(kPi * kPi / 6.0).epsilon(1e-10));
  // Exponent 1 on every coordinate is the ball with semi-axes.
  CHECK(zoo_volume_closed(
            DomainSpec::complex_ellipsoid({1.0, 1.0}, {2.0, 3.0})) ==
        doctest::Approx(18.0 * kPi * kPi).epsilon(1e-10));
  CHECK(zoo_volume_closed(DomainSpec::pball(2.0, {1.5, 1.5})) ==
        doctest::Approx(kPi * kPi * std::pow(1.5, 4) / 2.0).epsilon(1e-10));

  const DomainSpec prod = DomainSpec::product(
      {DomainSpec::polydisc({2.0}), DomainSpec::diamond({1.0, 1.0})});
  CHECK(zoo_volume_closed(prod) ==
        doctest::Approx(4.0 * kPi * kPi * kPi / 6.0).epsilon(1e-12));

  const DomainSpec moved =
      transformed(DomainSpec::ball(2, 1.0), CMat::Identity(2, 2),
                  Complex(0.0, 2.0), cv({1.0, -1.0}));
  CHECK(zoo_volume_closed(moved) ==
        doctest::Approx(16.0 * kPi * kPi / 2.0).epsilon(1e-12));

  const DomainSpec inter = DomainSpec::intersection(
      {DomainSpec::ball(2, 1.0), DomainSpec::polydisc({0.9, 0.9})});
  CHECK_THROWS_AS(zoo_volume_closed(inter), std::invalid_argument);
}

TEST_CASE("diamond volume closed form") {
  CHECK(diamond_volume_closed({1.0}) == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(diamond_volume_closed({1.0, 1.0}) ==
        doctest::Approx(kPi * kPi / 6.0).epsilon(1e-12));
  CHECK(diamond_volume_closed({1.0, 1.0, 1.0}) ==
        doctest::Approx(kPi * kPi * kPi / 90.0).epsilon(1e-12));
  CHECK(diamond_volume_closed({2.0, 0.5}) ==
        doctest::Approx(kPi * kPi / 6.0).epsilon(1e-12));
  CHECK_THROWS_AS(diamond_volume_closed({}), std::invalid_argument);
  CHECK_THROWS_AS(diamond_volume_closed({1.0, -1.0}), std::invalid_argument);
}

TEST_CASE("monte carlo volume agrees with the closed forms") {
  struct Case {
    DomainSpec spec;
    const char* tag;
  };
  const std::vector<Case> cases = {
      {DomainSpec::polydisc({1.5}), "disc"},
      {DomainSpec::diamond({1.0, 1.0}), "diamond"},
      {DomainSpec::pball(1.5, {1.0, 2.0}), "pball"},
      {DomainSpec::ball(3, 1.0), "ball3"},
  };
  for (const Case& c : cases) {
    const double truth = zoo_volume_closed(c.spec);
    const VolumeEstimate est =
        domain_volume_mc(c.spec, 1000000, kRoot.derive("mc").derive(c.tag));
    CAPTURE(c.tag);
    check_mc_close(est, truth);
    CHECK(est.method == VolumeMethod::monte_carlo);
    CHECK(est.samples == 1000000);
  }
}

TEST_CASE("monte carlo volume is reproducible and seed sensitive") {
  const DomainSpec spec = DomainSpec::diamond({1.0, 1.0});
  const VolumeEstimate a = domain_volume_mc(spec, 200000, kRoot.derive("rep"));
  const VolumeEstimate b = domain_volume_mc(spec, 200000, kRoot.derive("rep"));
  CHECK(a.value == b.value);
  CHECK(a.std_error == b.std_error);
  const VolumeEstimate c =
      domain_volume_mc(spec, 200000, kRoot.derive("other"));
  CHECK(a.value != c.value);
}

TEST_CASE("monte carlo volume does not depend on the thread count") {
  const DomainSpec spec = DomainSpec::ball(2, 1.0);
  setenv("CARALAB_THREADS", "1", 1);
  const VolumeEstimate one =
      domain_volume_mc(spec, 300000, kRoot.derive("threads"));
  setenv("CARALAB_THREADS", "4", 1);
  const VolumeEstimate four =
      domain_volume_mc(spec, 300000, kRoot.derive("threads"));
  unsetenv("CARALAB_THREADS");
  CHECK(one.value == four.value);
  CHECK(one.std_error == four.std_error);
}

TEST_CASE("bounding box violations are detected") {
  const std::vector<double> box = {1.0};
  CHECK_THROWS_AS(
      mc_volume([](const CVec&) { return true; }, box, 10000, kRoot),
      std::runtime_error);
  CHECK_THROWS_AS(mc_volume([](const CVec& z) { return std::abs(z[0]) < 1.5; },
                            box, 10000, kRoot),
                  std::runtime_error);
}

TEST_CASE("sample floor and argument validation") {
  const std::vector<double> box = {1.0};
  auto in = [](const CVec& z) { return std::abs(z[0]) < 0.5; };
  CHECK_THROWS_AS(mc_volume(in, box, 999, kRoot), std::invalid_argument);
  CHECK_THROWS_AS(mc_volume(in, {}, 10000, kRoot), std::invalid_argument);
  CHECK_THROWS_AS(mc_volume(in, {1.0, -1.0}, 10000, kRoot),
                  std::invalid_argument);
  CHECK_THROWS_AS(mc_volume(Membership{}, box, 10000, kRoot),
                  std::invalid_argument);
}

TEST_CASE("a membership equal to the box gives the box volume exactly") {
  const std::vector<double> box = {1.0, 2.0};
  auto in = [&](const CVec& z) {
    return std::abs(z[0]) < 1.00005 && std::abs(z[1]) < 2.0001;
  };
  const VolumeEstimate est = mc_volume(in, box, 50000, kRoot.derive("exact"));
  CHECK(est.value == doctest::Approx(kPi * kPi * 4.0).epsilon(1e-12));
  CHECK(est.std_error == 0.0);
}

TEST_CASE("indicatrix volumes about a point of the disc") {
  const DomainSpec spec = DomainSpec::polydisc({1.0});
  const CVec a = cv({0.5});
  const Frame f = greedy_basis(spec, a);
  const Stream s = kRoot.derive("disc-ind");

  // The sampling box is inflated by 1e-6 by design, so allow the same
  // relative slack on top of the statistical band.
  const double slack = 5e-6 * kPi * 9.0 / 16.0;
  const VolumeEstimate vc = indicatrix_volume(
      spec, a, MetricKind::caratheodory, 300000, s.derive("vc"), f);
  CHECK(std::abs(vc.value - kPi * 9.0 / 16.0) <= 3.0 * vc.std_error + slack);
  CHECK(vc.which == VolumeWhich::VC);

  const VolumeEstimate va = indicatrix_volume(
      spec, a, MetricKind::azukawa, 300000, s.derive("va"), f);
  CHECK(std::abs(va.value - kPi * 9.0 / 16.0) <= 3.0 * va.std_error + slack);
  CHECK(va.which == VolumeWhich::VA);

  const VolumeEstimate v = indicatrix_volume(
      spec, a, MetricKind::reciprocal_distance, 300000, s.derive("v"), f);
  check_mc_close(v, kPi / 4.0);
  CHECK(v.which == VolumeWhich::V);
}

TEST_CASE("indicatrix volumes at a balanced centre") {
  const DomainSpec spec = DomainSpec::complex_ellipsoid({0.4, 0.4}, {1.0, 1.0});
  const CVec a = cv({0.0, 0.0});
  const Frame f = greedy_basis(spec, a);
  const Stream s = kRoot.derive("thin-ind");
  const double domain_vol = zoo_volume_closed(spec);

  const VolumeEstimate v = indicatrix_volume(
      spec, a, MetricKind::reciprocal_distance, 600000, s.derive("v"), f);
  check_mc_close(v, domain_vol);
  const VolumeEstimate va = indicatrix_volume(
      spec, a, MetricKind::azukawa, 600000, s.derive("va"), f);
  check_mc_close(va, domain_vol);
  // The caratheodory indicatrix is the convex hull, here the diamond.
  const VolumeEstimate vc = indicatrix_volume(
      spec, a, MetricKind::caratheodory, 300000, s.derive("vc"), f);
  check_mc_close(vc, kPi * kPi / 6.0);

  CHECK(v.value <= va.value + 3.0 * (v.std_error + va.std_error));
  CHECK(va.value <= vc.value + 3.0 * (va.std_error + vc.std_error));
}

TEST_CASE("bidisc indicatrices reproduce the bidisc") {
  const DomainSpec spec = DomainSpec::polydisc({1.0, 1.0});
  const CVec a = cv({0.0, 0.0});
  const Stream s = kRoot.derive("bidisc-ind");
  for (MetricKind kind : {MetricKind::caratheodory, MetricKind::azukawa,
                          MetricKind::reciprocal_distance}) {
    const VolumeEstimate est = indicatrix_volume(
        spec, a, kind, 300000, s.derive(static_cast<uint64_t>(kind)));
    check_mc_close(est, kPi * kPi);
  }
}

TEST_CASE("indicatrix volumes scale with the affine modulus") {
  const DomainSpec base = DomainSpec::diamond({1.0, 1.0});
  const CVec t = cv({Complex(0.5, 0.5), -1.0});
  const DomainSpec image =
      transformed(base, CMat::Identity(2, 2), Complex(0.0, 2.0), t);
  const VolumeEstimate v0 = indicatrix_volume(
      base, cv({0.0, 0.0}), MetricKind::caratheodory, 300000,
      kRoot.derive("scale-base"));
  const VolumeEstimate v1 = indicatrix_volume(
      image, t, MetricKind::caratheodory, 300000, kRoot.derive("scale-img"));
  CHECK(std::abs(v1.value - 16.0 * v0.value) <=
        3.0 * (v1.std_error + 16.0 * v0.std_error) + 1e-6);
}

TEST_CASE("indicatrix volume input validation") {
  const DomainSpec spec = DomainSpec::complex_ellipsoid({0.4, 0.4}, {1.0, 1.0});
  CHECK_THROWS_AS(indicatrix_volume(spec, cv({0.0, 0.0}),
                                    MetricKind::kobayashi, 10000, kRoot),
                  std::invalid_argument);
  // Off the centre the thin ellipsoid has no azukawa backend.
  const Frame f = greedy_basis(spec, cv({0.0, 0.0}));
  CHECK_THROWS_AS(indicatrix_volume(spec, cv({0.2, 0.0}),
                                    MetricKind::azukawa, 10000, kRoot, f),
                  NoBackendError);
}
