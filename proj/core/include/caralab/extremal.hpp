#pragma once

#include <vector>

#include "caralab/domain.hpp"
#include "caralab/metrics.hpp"
#include "caralab/types.hpp"

namespace caralab {

// Greedy orthonormal frame adapted to the caratheodory indicatrix at a:
// e_1 maximizes C(a; .) on the unit sphere, e_2 maximizes it on the
// orthogonal complement of e_1, and so on.  radii[j] = C(a; e_j), pi is
// their product, k_hat the empirical comparability constant: the
// smallest observed value of C(a;X) / sum_j |<X,e_j>| radii[j], which
// lies in (0, 1] (the upper side of the comparison is an exact norm
// inequality).
struct Frame {
  CMat basis;  // columns e_1..e_n
  std::vector<double> radii;
  double pi = 0.0;
  double k_hat = 1.0;
  CVec k_hat_witness;  // direction achieving k_hat
};

// Builds the frame by multi-start sphere maximization (per-stage budget
// as given) and fills k_hat via empirical_k.  Ties snap to coordinate
// axes (smallest index) and the leading nonzero coordinate of each
// basis vector is normalized real positive, so frames are reproducible.
// Requires a caratheodory backend at (spec, a).
Frame greedy_basis(const DomainSpec& spec, const CVec& a, long budget = 20000);

struct KHat {
  double value = 1.0;
  CVec witness;
};

// Minimizes C(a;X) / sum_j |<X,e_j>| r_j over directions: multi-start
// descent plus 1e4 deterministic random probes, anchored at the frame
// vectors themselves (so the result never exceeds 1).  Best-found
// semantics: the true infimum may be lower, never higher.
KHat empirical_k(const DomainSpec& spec, const CVec& a, const Frame& frame,
                 long budget = 20000);

// Jacobian rows of the extremal map, expressed in frame coordinates
// (entry (i,k) is the i-th covector applied to e_k).  Row 1 is extremal
// for e_1; row m+1 is extremal for the cofactor direction of the top
// m x (m+1) block, which makes every leading principal determinant
// real, positive, and equal to C(a; cofactor direction).
struct ExtremalMapJacobian {
  CMat rows;
  Complex det{0.0, 0.0};
  std::vector<CVec> cofactors;  // the V used at each stage, frame coords
};

// Throws std::runtime_error if a cofactor degenerates or the expansion
// identity det = (new row).V fails beyond 1e-9 relative.
ExtremalMapJacobian build_extremal_map(const DomainSpec& spec, const CVec& a,
                                       const Frame& frame);

// Two-sided bracket for the Caratheodory-Eisenman volume ratio:
// lower = |det J|^2 from the constructed map, upper = (n! pi)^2 from
// the permanent bound |det J| <= n! pi.
struct CEBounds {
  double lower = 0.0;
  double upper = 0.0;
};
CEBounds ce_bounds(const ExtremalMapJacobian& jac, const Frame& frame);

// Minimum of pi over orthonormal frames (best found over a Givens-angle
// parametrization, 16 starts, identity anchored) and P = 1 / min pi.
struct MinPiResult {
  double p = 0.0;
  double min_pi = 0.0;
  CMat frame;
};
MinPiResult min_pi_over_frames(const DomainSpec& spec, const CVec& a,
                               long budget = 20000);

// Largest polydisc inside and smallest polydisc outside the
// caratheodory indicatrix at a, each in two variants: axis-aligned
// (frame = identity) and optimized over unitary orientations.
// Volumes are Euclidean in R^{2n}; best-found semantics on the
// optimized variants.
struct PolydiscFit {
  double volume = 0.0;
  std::vector<double> radii;
  CMat frame;
};
struct PolydiscHull {
  PolydiscFit inscribed_axis;
  PolydiscFit inscribed_best;
  PolydiscFit circumscribed_axis;
  PolydiscFit circumscribed_best;
};
PolydiscHull polydisc_hull_volumes(const DomainSpec& spec, const CVec& a,
                                   long budget = 20000);

}  // namespace caralab
