#pragma once

#include <functional>
#include <vector>

#include "caralab/rng.hpp"
#include "caralab/types.hpp"

namespace caralab {

// Derivative-free maximization used by the frame construction, the
// empirical constant search and the polydisc fits.  All searches are
// multi-start coordinate descent with golden-section line refinement
// on angle parametrizations; deterministic given the stream.

struct OptResult {
  double value = 0.0;
  std::vector<double> x;  // angles
  long evals = 0;
};

using RealFn = std::function<double(const std::vector<double>&)>;

// Coarse-scan plus golden-section maximization of f along one
// coordinate inside [center-half, center+half].
double line_max(const std::function<double(double)>& f, double center,
                double half, double xtol, long& budget);

// Cyclic coordinate ascent from x0.  halfwidth gives the per-pass
// search window around the current iterate for every coordinate.
OptResult coordinate_ascent(const RealFn& f, std::vector<double> x0,
                            double halfwidth, double xtol, long budget);

// Multi-start wrapper: first start at x0 (if non-empty), remaining
// starts drawn uniformly from [lo, hi]^dim.  Returns the best local
// optimum; ties resolved by earliest start.
OptResult multistart_max(const RealFn& f, int dim, double lo, double hi,
                         const std::vector<double>& x0, int starts,
                         long budget, SeqStream& rng);

// Unit vector in C^m from 2m-1 hyperspherical angles.
CVec sphere_point(const std::vector<double>& angles, int m);
int sphere_angle_count(int m);

// Unitary in U(n) as a product of Givens rotations, two angles per
// coordinate pair.  Column phases are omitted: every consumer here is
// invariant under them.
CMat unitary_from_angles(const std::vector<double>& angles, int n);
int unitary_angle_count(int n);

}  // namespace caralab
