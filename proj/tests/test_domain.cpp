#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "caralab/domain.hpp"
#include "caralab/rng.hpp"

using namespace caralab;

namespace {

CVec cv(std::initializer_list<Complex> xs) {
  CVec v(static_cast<int>(xs.size()));
  int i = 0;
  for (auto x : xs) v[i++] = x;
  return v;
}

// Brute-force boundary distance: dense phase grid, dense radial march,
// then bisection.  Slow but independent of the library's search.
double scan_delta(const DomainSpec& spec, const CVec& a, const CVec& X,
                  int phases = 4096, int march = 2048) {
  const auto R = spec.bounding_radii();
  double r_out = std::numeric_limits<double>::infinity();
  for (int j = 0; j < spec.dim(); ++j)
    if (std::abs(X[j]) > 0)
      r_out = std::min(r_out, (R[j] + std::abs(a[j])) / std::abs(X[j]));
  double best = r_out;
  for (int i = 0; i < phases; ++i) {
    const Complex ph = std::polar(1.0, 2.0 * std::numbers::pi * i / phases);
    const CVec Y = ph * X;
    double lo = 0.0, hi = r_out;
    for (int k = 1; k <= march; ++k) {
      const double r = r_out * k / march;
      if (!contains(spec, a + r * Y)) {
        lo = r_out * (k - 1) / march;
        hi = r;
        break;
      }
    }
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (contains(spec, a + mid * Y) ? lo : hi) = mid;
    }
    best = std::min(best, 0.5 * (lo + hi));
  }
  return best;
}

}  // namespace

TEST_CASE("factories validate their parameters") {
  CHECK_THROWS_AS(DomainSpec::polydisc({1.0, 1.0, 1.0, 1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(DomainSpec::polydisc({1.0, -1.0}), std::invalid_argument);
  CHECK_THROWS_AS(DomainSpec::ball(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(DomainSpec::diamond({}), std::invalid_argument);
  CHECK_THROWS_AS(DomainSpec::complex_ellipsoid({0.5}, {1.0, 1.0}),
                  std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      DomainSpec::pball(0.9, {1.0, 1.0}),
      "p must be >= 1; use complex_ellipsoid for non-convex powers",
      std::invalid_argument);
  CHECK_THROWS_AS(
      DomainSpec::product({DomainSpec::ball(2, 1.0), DomainSpec::ball(2, 1.0)}),
      std::invalid_argument);
}

TEST_CASE("flags reflect convexity and symmetry of each family") {
  const auto pd = DomainSpec::polydisc({1.0, 2.0});
  CHECK(pd.flags().balanced);
  CHECK(pd.flags().convex);
  CHECK(pd.flags().reinhardt);

  const auto thin = DomainSpec::complex_ellipsoid({0.3, 0.3}, {1.0, 1.0});
  CHECK(thin.flags().balanced);
  CHECK(!thin.flags().convex);
  CHECK(!thin.flags().c_convex);
  CHECK(thin.flags().pseudoconvex);

  const auto fat = DomainSpec::complex_ellipsoid({0.5, 2.0}, {1.0, 1.0});
  CHECK(fat.flags().convex);

  CMat rot(2, 2);
  const double c = std::cos(0.7), s = std::sin(0.7);
  rot << c, -s, s, c;
  const auto moved = transformed(pd, rot, {2.0, 0.0}, cv({{0.1, 0.0}, 0.0}));
  CHECK(!moved.flags().balanced);
  CHECK(!moved.flags().reinhardt);
  CHECK(moved.flags().convex);

  const auto spun = transformed(pd, rot, {1.0, 0.0}, CVec::Zero(2));
  CHECK(spun.flags().balanced);
  CHECK(!spun.flags().reinhardt);

  CMat swap(2, 2);
  swap << 0.0, Complex(0.0, 1.0), 1.0, 0.0;
  const auto swapped = transformed(pd, swap, {1.0, 0.0}, CVec::Zero(2));
  CHECK(swapped.flags().reinhardt);
}

TEST_CASE("transform rejects non-unitary matrices") {
  CMat m = CMat::Identity(2, 2);
  m(0, 0) = 1.1;
  CHECK_THROWS_AS(transformed(DomainSpec::ball(2, 1.0), m, {1.0, 0.0},
                              CVec::Zero(2)),
                  std::invalid_argument);
}

TEST_CASE("membership matches the defining inequality on samples") {
  const auto dom = DomainSpec::complex_ellipsoid({0.4, 1.5}, {1.0, 0.5});
  SeqStream g(Stream{1}.derive("membership"));
  for (int i = 0; i < 500; ++i) {
    const CVec z = cv({Complex(g.next_uniform(-1, 1), g.next_uniform(-1, 1)),
                       Complex(g.next_uniform(-1, 1), g.next_uniform(-1, 1))});
    const double s = std::pow(std::abs(z[0]), 0.8) +
                     std::pow(std::abs(z[1]) / 0.5, 3.0);
    CHECK(contains(dom, z) == (s < 1.0));
  }
}

TEST_CASE("membership is invariant under the recorded transform") {
  const auto base = DomainSpec::pball(3.0, {1.0, 1.5});
  CMat rot(2, 2);
  const Complex u = std::polar(1.0, 0.3), v = std::polar(1.0, -1.1);
  const double c = std::cos(0.5), s = std::sin(0.5);
  rot << u * c, -u * s, v * s, v * c;
  const Complex lam = std::polar(0.7, 2.0);
  const CVec t = cv({{0.2, -0.1}, {0.0, 0.3}});
  const auto dom = transformed(base, rot, lam, t);
  SeqStream g(Stream{1}.derive("transform"));
  for (int i = 0; i < 500; ++i) {
    CVec z(2);
    for (int j = 0; j < 2; ++j)
      z[j] = Complex(g.next_uniform(-1.6, 1.6), g.next_uniform(-1.6, 1.6));
    CHECK(contains(dom, t + lam * (rot * z)) == contains(base, z));
  }
}

TEST_CASE("bounding radii really bound the domain") {
  const auto members = std::vector<DomainSpec>{
      DomainSpec::diamond({1.0, 2.0}), DomainSpec::ball(1, 0.8)};
  CMat rot(2, 2);
  const double c = std::cos(1.2), s = std::sin(1.2);
  rot << c, -s, s, c;
  const std::vector<DomainSpec> doms = {
      DomainSpec::diamond({1.0, 2.0}),
      DomainSpec::intersection(
          {DomainSpec::polydisc({1.0, 0.7}), DomainSpec::ball(2, 1.1)}),
      DomainSpec::product({DomainSpec::diamond({0.5}), DomainSpec::ball(1, 2.0)}),
      transformed(DomainSpec::polydisc({1.0, 0.5}), rot, {1.5, 0.5},
                  cv({{0.3, 0.0}, {0.0, -0.2}}))};
  SeqStream g(Stream{1}.derive("bounds"));
  for (const auto& dom : doms) {
    const auto R = dom.bounding_radii();
    for (int i = 0; i < 2000; ++i) {
      CVec z(dom.dim());
      for (int j = 0; j < dom.dim(); ++j)
        z[j] = Complex(g.next_uniform(-R[j], R[j]) * 1.5,
                       g.next_uniform(-R[j], R[j]) * 1.5);
      if (!contains(dom, z)) continue;
      for (int j = 0; j < dom.dim(); ++j) CHECK(std::abs(z[j]) <= R[j] + 1e-12);
    }
  }
}

TEST_CASE("gauge satisfies its defining equation and scales linearly") {
  const auto dom = DomainSpec::complex_ellipsoid({0.5, 1.7, 0.9},
                                                 {1.0, 0.6, 2.0});
  SeqStream g(Stream{1}.derive("gauge"));
  for (int i = 0; i < 200; ++i) {
    const CVec X = g.next_direction(3);
    const double h = minkowski(dom, X);
    double sum = 0.0;
    const double q[3] = {1.0, 3.4, 1.8};
    const double rho[3] = {1.0, 0.6, 2.0};
    for (int j = 0; j < 3; ++j)
      sum += std::pow(std::abs(X[j]) / (rho[j] * h), q[j]);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(minkowski(dom, 3.5 * X) == doctest::Approx(3.5 * h).epsilon(1e-12));
  }
}

TEST_CASE("gauge closed forms for the standard families") {
  const CVec X = cv({{0.3, 0.4}, {-1.0, 0.0}});
  CHECK(minkowski(DomainSpec::polydisc({1.0, 2.0}), X) ==
        doctest::Approx(0.5));
  CHECK(minkowski(DomainSpec::ball(2, 2.0), X) ==
        doctest::Approx(std::sqrt(0.25 + 1.0) / 2.0));
  CHECK(minkowski(DomainSpec::diamond({1.0, 2.0}), X) ==
        doctest::Approx(0.5 + 2.0));
  CHECK(minkowski(DomainSpec::pball(3.0, {1.0, 1.0}), X) ==
        doctest::Approx(std::pow(0.125 + 1.0, 1.0 / 3.0)));
  // Equal-exponent ellipsoid closed form against the general solver,
  // reached by perturbing one exponent below the equality test.
  const auto eq = DomainSpec::complex_ellipsoid({0.8, 0.8}, {1.0, 1.0});
  const auto pert =
      DomainSpec::complex_ellipsoid({0.8, 0.8 + 1e-13}, {1.0, 1.0});
  CHECK(minkowski(eq, X) == doctest::Approx(minkowski(pert, X)).epsilon(1e-9));
  // Composite gauges: max over intersection members and product factors.
  const auto inter = DomainSpec::intersection(
      {DomainSpec::polydisc({1.0, 2.0}), DomainSpec::ball(2, 1.0)});
  CHECK(minkowski(inter, X) == doctest::Approx(std::sqrt(1.25)));
  const auto prod =
      DomainSpec::product({DomainSpec::ball(1, 1.0), DomainSpec::ball(1, 0.5)});
  CHECK(minkowski(prod, X) == doctest::Approx(2.0));
}

TEST_CASE("boundary distance closed forms match a brute force scan") {
  const auto pd = DomainSpec::polydisc({1.0, 2.0});
  const CVec a = cv({{0.3, 0.2}, {-0.5, 0.5}});
  const CVec X = cv({{1.0, 0.5}, {0.2, -0.3}});
  const double dpd = boundary_distance(pd, a, X);
  double expect = std::numeric_limits<double>::infinity();
  const double rho[2] = {1.0, 2.0};
  for (int j = 0; j < 2; ++j)
    expect = std::min(expect, (rho[j] - std::abs(a[j])) / std::abs(X[j]));
  CHECK(dpd == doctest::Approx(expect).epsilon(1e-12));
  CHECK(dpd == doctest::Approx(scan_delta(pd, a, X)).epsilon(1e-5));

  const auto ball = DomainSpec::ball(2, 1.0);
  const CVec b = cv({{0.3, 0.0}, {0.0, 0.4}});
  const double dball = boundary_distance(ball, b, X);
  CHECK(dball == doctest::Approx(scan_delta(ball, b, X)).epsilon(1e-5));

  // One dimensional disc: distance to the rim along any direction.
  const auto disc = DomainSpec::polydisc({1.0});
  CHECK(boundary_distance(disc, cv({{0.5, 0.0}}), cv({{0.0, 2.0}})) ==
        doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("boundary distance takes the worst ray phase, not the real ray") {
  // Slice of the diamond through (0.5i, 0) along e_1 is a unit disc
  // centred at -0.5i, so the boundary sits 0.5 away (at phase 3pi/2),
  // while the positive real ray exits much later.
  const auto dom = DomainSpec::diamond({1.0, 1.0});
  const CVec a = cv({{0.0, 0.5}, 0.0});
  const CVec X = cv({1.0, 0.0});
  CHECK(boundary_distance(dom, a, X) == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("generic search agrees with a dense scan off centre") {
  const auto diamond = DomainSpec::diamond({1.0, 2.0});
  const CVec a = cv({{0.25, -0.1}, {0.05, 0.1}});
  const CVec X = cv({{0.7, 0.2}, {-0.4, 0.6}});
  CHECK(boundary_distance(diamond, a, X) ==
        doctest::Approx(scan_delta(diamond, a, X)).epsilon(2e-5));

  const auto thin = DomainSpec::complex_ellipsoid({0.3, 0.4}, {1.0, 1.0});
  const CVec at = cv({{0.2, 0.1}, {-0.1, 0.05}});
  const CVec Xt = cv({{0.5, -0.3}, {0.8, 0.1}});
  CHECK(boundary_distance(thin, at, Xt) ==
        doctest::Approx(scan_delta(thin, at, Xt)).epsilon(2e-5));

  const auto pb = DomainSpec::pball(1.5, {1.0, 0.8});
  const CVec ap = cv({{-0.15, 0.2}, {0.1, 0.0}});
  CHECK(boundary_distance(pb, ap, Xt) ==
        doctest::Approx(scan_delta(pb, ap, Xt)).epsilon(2e-5));
}

TEST_CASE("boundary distance from the centre is the reciprocal gauge") {
  const auto doms = std::vector<DomainSpec>{
      DomainSpec::diamond({1.0, 2.0}),
      DomainSpec::complex_ellipsoid({0.3, 0.3}, {1.0, 1.0}),
      DomainSpec::pball(1.5, {1.0, 0.8})};
  SeqStream g(Stream{1}.derive("center"));
  for (const auto& dom : doms) {
    for (int i = 0; i < 50; ++i) {
      const CVec X = g.next_direction(2);
      CHECK(boundary_distance(dom, CVec::Zero(2), X) ==
            doctest::Approx(1.0 / minkowski(dom, X)).epsilon(1e-12));
    }
  }
}

TEST_CASE("boundary distance splits over products and intersections") {
  const auto prod = DomainSpec::product(
      {DomainSpec::polydisc({1.0}), DomainSpec::ball(2, 1.0)});
  const CVec a = cv({{0.5, 0.0}, {0.3, 0.0}, {0.0, 0.4}});
  const CVec X = cv({1.0, {0.0, 1.0}, {0.5, 0.0}});
  const double d1 = boundary_distance(DomainSpec::polydisc({1.0}),
                                      a.head(1), X.head(1));
  const double d2 = boundary_distance(DomainSpec::ball(2, 1.0), a.tail(2),
                                      X.tail(2));
  CHECK(boundary_distance(prod, a, X) ==
        doctest::Approx(std::min(d1, d2)).epsilon(1e-12));

  const auto inter = DomainSpec::intersection(
      {DomainSpec::polydisc({1.0, 1.0}), DomainSpec::ball(2, 1.2)});
  const CVec b = cv({{0.4, 0.0}, {0.0, -0.3}});
  const CVec Y = cv({{0.6, 0.3}, {0.2, 0.9}});
  const double want = std::min(
      boundary_distance(DomainSpec::polydisc({1.0, 1.0}), b, Y),
      boundary_distance(DomainSpec::ball(2, 1.2), b, Y));
  CHECK(boundary_distance(inter, b, Y) ==
        doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("boundary distance transforms with the scale modulus") {
  const auto base = DomainSpec::diamond({1.0, 2.0});
  CMat rot(2, 2);
  const double c = std::cos(0.9), s = std::sin(0.9);
  rot << c, -s, s, c;
  const Complex lam = std::polar(1.3, -0.4);
  const CVec t = cv({{0.05, 0.1}, {0.0, -0.05}});
  const auto dom = transformed(base, rot, lam, t);
  const CVec z0 = cv({{0.1, 0.05}, {0.02, 0.0}});
  const CVec X0 = cv({{0.4, -0.2}, {0.3, 0.6}});
  const CVec z = t + lam * (rot * z0);
  const CVec X = lam * (rot * X0);
  CHECK(boundary_distance(dom, z, X) ==
        doctest::Approx(boundary_distance(base, z0, X0)).epsilon(1e-9));
}

TEST_CASE("boundary distance validates its inputs") {
  const auto dom = DomainSpec::ball(2, 1.0);
  CHECK_THROWS_AS(boundary_distance(dom, cv({{2.0, 0.0}, 0.0}),
                                    cv({1.0, 0.0})),
                  std::invalid_argument);
  CHECK_THROWS_AS(boundary_distance(dom, CVec::Zero(2), CVec::Zero(2)),
                  std::invalid_argument);
}

TEST_CASE("config parsing covers every kind and records points") {
  const std::string cfg = R"([
    {"name": "pd", "kind": "polydisc", "radii": [1.0, 2.0],
     "points": [[[0.5, 0.0], [0.0, 0.5]]]},
    {"name": "b3", "kind": "ball", "dimension": 3, "radius": 1.5},
    {"name": "egg", "kind": "complex_ellipsoid",
     "exponents": [0.3, 0.3], "radii": [1.0, 1.0]},
    {"name": "pb", "kind": "pball", "p": 1.5, "radii": [1.0, 1.0]},
    {"name": "dia", "kind": "diamond", "weights": [1.0, 2.0],
     "points": [[0.9, 0.0]]},
    {"name": "cap", "kind": "intersection", "members": [
       {"kind": "polydisc", "radii": [1.0, 1.0]},
       {"kind": "ball", "dimension": 2, "radius": 1.2}]},
    {"name": "mix", "kind": "product", "members": [
       {"kind": "polydisc", "radii": [1.0]},
       {"kind": "ball", "dimension": 2, "radius": 1.0}]},
    {"name": "spun", "kind": "polydisc", "radii": [1.0, 2.0],
     "transform": {
       "unitary": [[[0.7071067811865476, 0.0], [-0.7071067811865476, 0.0]],
                    [[0.7071067811865476, 0.0], [0.7071067811865476, 0.0]]],
       "scale": [1.0, 0.0]}}
  ])";
  const auto zoo = parse_domain_spec(cfg);
  REQUIRE(zoo.size() == 8);
  CHECK(zoo[0].name == "pd");
  CHECK(zoo[0].spec.kind() == DomainKind::polydisc);
  REQUIRE(zoo[0].points.size() == 1);
  CHECK(zoo[0].points[0][1] == Complex(0.0, 0.5));
  CHECK(zoo[1].spec.dim() == 3);
  CHECK(zoo[1].points.size() == 1);  // default centre
  CHECK(zoo[1].points[0].isZero(0.0));
  CHECK(zoo[4].points[0][0] == Complex(0.9, 0.0));
  CHECK(zoo[5].spec.kind() == DomainKind::intersection);
  CHECK(zoo[6].spec.dim() == 3);
  CHECK(zoo[7].spec.kind() == DomainKind::transformed);
  CHECK(zoo[7].spec.flags().balanced);
}

TEST_CASE("config errors carry the offending path") {
  auto msg = [](const std::string& cfg) {
    try {
      parse_domain_spec(cfg);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(msg(R"([{"name": "x", "kind": "pball", "p": 0.7,
                 "radii": [1.0, 1.0]}])") ==
        "domains[0]: p must be >= 1; use complex_ellipsoid for non-convex "
        "powers");
  CHECK(msg(R"([{"name": "x", "kind": "banana"}])") ==
        "domains[0].kind: unknown kind 'banana'");
  CHECK(msg(R"([{"name": "x", "kind": "diamond", "weights": [1.0, 2.0],
                 "points": [[1.1, 0.0]]}])") ==
        "domains[0].points[0]: point lies outside the domain");
  CHECK(msg(R"([{"name": "x", "kind": "ball", "dimension": 4,
                 "radius": 1.0}])") ==
        "domains[0]: ball: dimension must be between 1 and 3");
  CHECK(msg(R"([{"name": "a", "kind": "ball", "dimension": 1, "radius": 1.0},
                {"name": "a", "kind": "ball", "dimension": 1, "radius": 2.0}])")
            .find("duplicate name") != std::string::npos);
  CHECK(msg("{}") == "config: expected a top-level array");
  CHECK(msg("[{]").find("invalid JSON") != std::string::npos);
}
