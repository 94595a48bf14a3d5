#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "caralab/bergman.hpp"
#include "caralab/domain.hpp"
#include "caralab/optimize.hpp"
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

// Oracle: the disc kernel summed term by term from the monomial
// moments pi rho^{2k+2} / (k+1), independent of the closed form.
double disc_kernel_series(double rho, Complex z, int terms) {
  const double t = std::norm(z) / (rho * rho);
  double sum = 0.0;
  double tk = 1.0;
  for (int k = 0; k < terms; ++k) {
    sum += (k + 1) * tk / (kPi * rho * rho);
    tk *= t;
  }
  return sum;
}

VolumeEstimate closed_vol_estimate(double value) {
  VolumeEstimate v;
  v.value = value;
  v.std_error = 0.0;
  v.samples = 0;
  v.method = VolumeMethod::closed_form;
  v.which = VolumeWhich::domain_volume;
  return v;
}

const Stream kRoot = Stream{20260814};

}  // namespace

TEST_CASE("closed disc kernel matches the series oracle") {
  CHECK(kernel_closed(DomainSpec::polydisc({1.0}), cv({0.5})).lower ==
        doctest::Approx(disc_kernel_series(1.0, 0.5, 400)).epsilon(1e-10));
  CHECK(kernel_closed(DomainSpec::polydisc({1.5}), cv({Complex(0.2, 0.6)}))
            .lower ==
        doctest::Approx(disc_kernel_series(1.5, Complex(0.2, 0.6), 400))
            .epsilon(1e-10));
}

TEST_CASE("closed kernel values") {
  CHECK(kernel_closed(DomainSpec::polydisc({1.0}), cv({0.0})).lower ==
        doctest::Approx(1.0 / kPi).epsilon(1e-12));
  CHECK(kernel_closed(DomainSpec::polydisc({1.0}), cv({0.5})).lower ==
        doctest::Approx(16.0 / (9.0 * kPi)).epsilon(1e-12));
  CHECK(kernel_closed(DomainSpec::polydisc({1.0, 2.0}), cv({0.0, 0.0})).lower ==
        doctest::Approx(1.0 / (4.0 * kPi * kPi)).epsilon(1e-12));
  CHECK(kernel_closed(DomainSpec::ball(2, 1.0), cv({0.0, 0.0})).lower ==
        doctest::Approx(2.0 / (kPi * kPi)).epsilon(1e-12));
  CHECK(kernel_closed(DomainSpec::ball(2, 1.0), cv({0.5, 0.0})).lower ==
        doctest::Approx(128.0 / (27.0 * kPi * kPi)).epsilon(1e-12));

  const DomainSpec prod = DomainSpec::product(
      {DomainSpec::polydisc({1.0}), DomainSpec::ball(2, 1.0)});
  const double expect =
      kernel_closed(DomainSpec::polydisc({1.0}), cv({0.5})).lower *
      kernel_closed(DomainSpec::ball(2, 1.0), cv({0.0, Complex(0.0, 0.3)}))
          .lower;
  CHECK(kernel_closed(prod, cv({0.5, 0.0, Complex(0.0, 0.3)})).lower ==
        doctest::Approx(expect).epsilon(1e-12));

  const DomainSpec moved =
      transformed(DomainSpec::ball(2, 1.0), CMat::Identity(2, 2),
                  Complex(2.0, 0.0), cv({1.0, 0.0}));
  CHECK(kernel_closed(moved, cv({1.0, 0.0})).lower ==
        doctest::Approx(2.0 / (kPi * kPi) / 16.0).epsilon(1e-12));

  CHECK(kernel_closed(DomainSpec::ball(2, 1.0), cv({0.0, 0.0})).method ==
        KernelMethod::closed_form);
  CHECK_THROWS_AS(kernel_closed(DomainSpec::polydisc({1.0}), cv({1.5})),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      kernel_closed(DomainSpec::diamond({1.0, 1.0}), cv({0.0, 0.0})),
      NoBackendError);
}

TEST_CASE("balanced centre identity") {
  const KernelEstimate dia = kernel_balanced_center(
      DomainSpec::diamond({1.0, 1.0}), closed_vol_estimate(kPi * kPi / 6.0));
  CHECK(*dia.exact == doctest::Approx(6.0 / (kPi * kPi)).epsilon(1e-12));
  CHECK(dia.lower == *dia.exact);
  CHECK(dia.method == KernelMethod::balanced_identity);

  const KernelEstimate bidisc = kernel_balanced_center(
      DomainSpec::polydisc({1.0, 1.0}), closed_vol_estimate(kPi * kPi));
  CHECK(*bidisc.exact == doctest::Approx(1.0 / (kPi * kPi)).epsilon(1e-12));

  VolumeEstimate noisy = closed_vol_estimate(kPi * kPi / 2.0);
  noisy.std_error = 0.01 * noisy.value;
  noisy.method = VolumeMethod::monte_carlo;
  const KernelEstimate ball = kernel_balanced_center(
      DomainSpec::ball(2, 1.0), noisy);
  CHECK(ball.std_error == doctest::Approx(0.01 * *ball.exact).epsilon(1e-12));

  const DomainSpec shifted =
      transformed(DomainSpec::ball(2, 1.0), CMat::Identity(2, 2),
                  Complex(1.0, 0.0), cv({0.5, 0.0}));
  CHECK_THROWS_AS(
      kernel_balanced_center(shifted, closed_vol_estimate(kPi * kPi / 2.0)),
      std::invalid_argument);
  VolumeEstimate wrong_kind = closed_vol_estimate(1.0);
  wrong_kind.which = VolumeWhich::VC;
  CHECK_THROWS_AS(
      kernel_balanced_center(DomainSpec::ball(2, 1.0), wrong_kind),
      std::invalid_argument);
}

TEST_CASE("gram lower bound reproduces the hand example on the disc") {
  const DomainSpec disc = DomainSpec::polydisc({1.0});
  const KernelEstimate d1 =
      kernel_gram_lower(disc, cv({0.5}), 1, 10000, kRoot.derive("hand"));
  CHECK(d1.lower == doctest::Approx(1.5 / kPi).epsilon(1e-12));
  CHECK(d1.basis_size == 2);
  CHECK(d1.degree_used == 1);
  CHECK(d1.std_error == 0.0);  // closed moments, no sampling

  const KernelEstimate d0 =
      kernel_gram_lower(disc, cv({0.5}), 0, 10000, kRoot.derive("hand"));
  CHECK(d0.lower == doctest::Approx(1.0 / kPi).epsilon(1e-12));
}

TEST_CASE("gram lower bound is monotone and converges on the disc") {
  const DomainSpec disc = DomainSpec::polydisc({1.0});
  const double exact = 16.0 / (9.0 * kPi);
  double prev = 0.0;
  for (int d = 0; d <= 8; ++d) {
    const KernelEstimate k =
        kernel_gram_lower(disc, cv({0.5}), d, 10000, kRoot.derive("mono"));
    CHECK(k.lower >= prev - 1e-12);
    CHECK(k.lower <= exact * (1.0 + 1e-12));
    prev = k.lower;
  }
  CHECK(prev >= 0.99 * exact);
}

TEST_CASE("gram lower bound is exact at product centres") {
  const DomainSpec bidisc = DomainSpec::polydisc({1.0, 1.0});
  for (int d : {0, 3, 8}) {
    const KernelEstimate k = kernel_gram_lower(bidisc, cv({0.0, 0.0}), d,
                                               10000, kRoot.derive("ctr"));
    CHECK(k.lower == doctest::Approx(1.0 / (kPi * kPi)).epsilon(1e-12));
  }
}

TEST_CASE("gram lower bound on the ball uses closed moments") {
  const DomainSpec ball = DomainSpec::ball(3, 1.0);
  const KernelEstimate at0 = kernel_gram_lower(ball, cv({0.0, 0.0, 0.0}), 8,
                                               10000, kRoot.derive("b3"));
  CHECK(at0.lower == doctest::Approx(6.0 / std::pow(kPi, 3)).epsilon(1e-12));

  const CVec z = cv({0.2, 0.0, Complex(0.0, 0.1)});
  const double exact = kernel_closed(ball, z).lower;
  const KernelEstimate kz =
      kernel_gram_lower(ball, z, 8, 10000, kRoot.derive("b3z"));
  CHECK(kz.lower <= exact * (1.0 + 1e-12));
  CHECK(kz.lower >= 0.9 * exact);
  CHECK(kz.degree_used == 8);
}

TEST_CASE("monte carlo diagonal gram within its error band") {
  // A permuted bidisc is Reinhardt but has no closed moments, so the
  // diagonal is estimated by sampling.
  CMat swap = CMat::Zero(2, 2);
  swap(0, 1) = Complex(1.0, 0.0);
  swap(1, 0) = Complex(1.0, 0.0);
  const DomainSpec spec = transformed(DomainSpec::polydisc({1.0, 1.0}), swap,
                                      Complex(1.0, 0.0), cv({0.0, 0.0}));
  CHECK(spec.flags().reinhardt);
  const KernelEstimate k = kernel_gram_lower(spec, cv({0.0, 0.0}), 2, 200000,
                                             kRoot.derive("mc-diag"));
  const double truth = 1.0 / (kPi * kPi);
  CHECK(std::abs(k.lower - truth) <= 3.0 * k.std_error + 0.02 * truth);
}

TEST_CASE("full monte carlo gram on a rotated bidisc") {
  std::vector<double> ang = {kPi / 4.0, 0.3};
  const CMat U = unitary_from_angles(ang, 2);
  const DomainSpec spec = transformed(DomainSpec::polydisc({1.0, 1.0}), U,
                                      Complex(1.0, 0.0), cv({0.0, 0.0}));
  CHECK_FALSE(spec.flags().reinhardt);
  const KernelEstimate k = kernel_gram_lower(spec, cv({0.0, 0.0}), 2, 200000,
                                             kRoot.derive("mc-full"));
  const double truth = 1.0 / (kPi * kPi);
  CHECK(k.lower <= truth * 1.03);
  CHECK(k.lower >= truth * 0.9);
}

TEST_CASE("ill conditioning reduces the degree") {
  const DomainSpec sliver = DomainSpec::polydisc({1.0, 1e-4});
  const KernelEstimate k = kernel_gram_lower(sliver, cv({0.5, 0.0}), 8, 10000,
                                             kRoot.derive("sliver"));
  CHECK(k.degree_used < 8);
  CHECK(k.degree_used >= 1);
  const double exact = kernel_closed(sliver, cv({0.5, 0.0})).lower;
  CHECK(k.lower <= exact * (1.0 + 1e-9));
  CHECK(k.lower > 0.0);
}

TEST_CASE("gram argument validation") {
  const DomainSpec disc = DomainSpec::polydisc({1.0});
  CHECK_THROWS_AS(kernel_gram_lower(disc, cv({0.5}), 9, 10000, kRoot),
                  std::invalid_argument);
  CHECK_THROWS_AS(kernel_gram_lower(disc, cv({1.5}), 4, 10000, kRoot),
                  std::invalid_argument);
}

TEST_CASE("disc kernel equals the reciprocal azukawa indicatrix volume") {
  // On the disc the azukawa indicatrix at z is the disc of radius
  // (1 - |z|^2), so 1/VA equals the closed kernel exactly.
  const double z = 0.5;
  const double va = kPi * std::pow(1.0 - z * z, 2);
  CHECK(kernel_closed(DomainSpec::polydisc({1.0}), cv({z})).lower ==
        doctest::Approx(1.0 / va).epsilon(1e-12));
}
