#pragma once

#include <optional>
#include <vector>

#include "caralab/domain.hpp"
#include "caralab/rng.hpp"
#include "caralab/types.hpp"
#include "caralab/volume.hpp"

namespace caralab {

enum class KernelMethod { balanced_identity, closed_form, gram_lower };

// Diagonal Bergman kernel estimate.  lower is always a valid lower
// bound (up to the quoted Monte Carlo error); exact is set when the
// value is known in closed form, and then lower equals it.
struct KernelEstimate {
  double lower = 0.0;
  std::optional<double> exact;
  double std_error = 0.0;
  long long basis_size = 0;
  int degree_used = 0;
  KernelMethod method = KernelMethod::gram_lower;
};

// K(0) = 1 / Vol for balanced domains; the volume estimate's relative
// error propagates unchanged.  Throws std::invalid_argument when the
// spec is not balanced or the estimate is not a domain volume.
KernelEstimate kernel_balanced_center(const DomainSpec& spec,
                                      const VolumeEstimate& vol);

// Closed kernels: discs and polydiscs (product of disc kernels), balls,
// products of supported factors, and affine images of these (the kernel
// divides by |lambda|^{2n}).  Throws NoBackendError for other kinds and
// std::invalid_argument when z lies outside.
KernelEstimate kernel_closed(const DomainSpec& spec, const CVec& z);

// Lower bound by maximizing |f(z)|^2 / ||f||^2 over the span of the
// monomials of total degree <= degree (degree <= 8): the value is
// v* G^{-1} v with G the monomial Gram matrix.  For Reinhardt domains
// the Gram is diagonal and the moments use closed Dirichlet forms when
// available, Monte Carlo otherwise; non-Reinhardt domains estimate the
// full Gram by Monte Carlo.  The Monte Carlo error is quoted from 8
// batch means.  If the Gram condition number exceeds 1e12 the degree
// is reduced until it does not; degree_used reports the outcome.
KernelEstimate kernel_gram_lower(const DomainSpec& spec, const CVec& z,
                                 int degree, long long N,
                                 const Stream& stream);

// Closed moment int_D prod_j |z_j|^{2 alpha_j} dV for the model
// Reinhardt families (polydisc, ball, pball, diamond, complex
// ellipsoid, products).  Throws NoBackendError otherwise.
double monomial_moment_closed(const DomainSpec& spec,
                              const std::vector<int>& alpha);

}  // namespace caralab
