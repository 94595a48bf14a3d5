#pragma once

#include <functional>
#include <vector>

#include "caralab/domain.hpp"
#include "caralab/extremal.hpp"
#include "caralab/metrics.hpp"
#include "caralab/rng.hpp"
#include "caralab/types.hpp"

namespace caralab {

enum class VolumeMethod { monte_carlo, closed_form };

// What a volume estimate measures.  V, VA and VC are the indicatrix
// volumes of the reciprocal boundary distance, the azukawa metric and
// the caratheodory metric; VE is the closed diamond comparison body;
// the last two are the polydisc fits.
enum class VolumeWhich {
  V,
  VA,
  VC,
  VE,
  V_inscribed,
  V_circumscribed,
  domain_volume,
};

struct VolumeEstimate {
  double value = 0.0;
  double std_error = 0.0;
  long long samples = 0;
  VolumeMethod method = VolumeMethod::monte_carlo;
  VolumeWhich which = VolumeWhich::domain_volume;
};

using Membership = std::function<bool(const CVec&)>;

// Hit-or-miss Monte Carlo volume on the complex box |z_j| < box[j].
// Sample i is a pure function of (stream, i), work is split into fixed
// 65536-sample chunks, and hit counts are integers, so the estimate is
// bit-identical for any thread count (threads are capped by the
// CARALAB_THREADS environment variable).  Before estimating, 1000
// probe points placed outside the box must all be non-members;
// otherwise the box does not bound the set and a std::runtime_error
// is raised.  N must be at least 1000.
VolumeEstimate mc_volume(const Membership& inside,
                         const std::vector<double>& box, long long N,
                         const Stream& stream,
                         VolumeWhich which = VolumeWhich::domain_volume);

// Monte Carlo volume of the domain itself over its bounding box.
VolumeEstimate domain_volume_mc(const DomainSpec& spec, long long N,
                                const Stream& stream);

// Monte Carlo volume of the indicatrix { X : metric(a; X) < 1 } for
// kind in {caratheodory -> VC, azukawa -> VA, reciprocal_distance -> V}.
// The sampling box comes from the greedy frame: in frame coordinates
// the caratheodory indicatrix lies in the polydisc of radii
// 1 / (k_hat (1 - 1e-6) r_j), and the other two indicatrices are
// contained in it.  The first overload builds the frame itself; the
// second reuses a caller-supplied one.  kobayashi is rejected with
// std::invalid_argument.
VolumeEstimate indicatrix_volume(const DomainSpec& spec, const CVec& a,
                                 MetricKind kind, long long N,
                                 const Stream& stream);
VolumeEstimate indicatrix_volume(const DomainSpec& spec, const CVec& a,
                                 MetricKind kind, long long N,
                                 const Stream& stream, const Frame& frame);

// Euclidean volume in R^{2n} of { X : sum_j r_j |X_j| < 1 }:
// (2 pi)^n / ((2n)! prod r_j^2).
double diamond_volume_closed(const std::vector<double>& r);

// Closed-form Euclidean volume of the domain for the model families
// (polydisc, ball, pball, diamond, complex ellipsoid, products and
// affine images of these).  Throws std::invalid_argument for kinds
// without a closed volume (intersections).
double zoo_volume_closed(const DomainSpec& spec);

}  // namespace caralab
