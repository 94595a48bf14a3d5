#pragma once

#include "caralab/domain.hpp"
#include "caralab/rng.hpp"
#include "caralab/types.hpp"

namespace caralab {

// Invariant metrics evaluated where a trustworthy backend exists.
// Effort goes into never returning a plausible wrong number: every
// value is either a closed form, a gauge reduction valid on balanced
// domains at the centre, or a convex-case identity; anything else
// raises NoBackendError.
enum class MetricKind { caratheodory, azukawa, kobayashi, reciprocal_distance };

enum class MetricBackend { closed_form, minkowski_reduction, unsupported };

struct MetricValue {
  double value = 0.0;
  MetricKind kind = MetricKind::caratheodory;
  MetricBackend backend = MetricBackend::unsupported;
};

// Metric evaluation at a in the direction X.
//
// Backends by kind:
//  - caratheodory: polydiscs, balls and convex products at any point
//    (automorphism closed forms); any balanced domain at the centre,
//    where the value is the gauge of the convex hull (the gauge itself
//    when the domain is convex, the weighted-l1 hull gauge for thin
//    complex ellipsoids, a support-function search otherwise).
//  - azukawa: balanced pseudoconvex domains at the centre (the Green
//    function there is log of the gauge); convex domains anywhere, by
//    the squeeze between caratheodory and kobayashi.
//  - kobayashi: convex domains anywhere (equals caratheodory there);
//    balanced pseudoconvex domains at the centre.
//  - reciprocal_distance: everywhere.
// Affine images defer to the underlying domain in all cases.
//
// Throws NoBackendError for unsupported combinations and
// std::invalid_argument for malformed input (a outside, size
// mismatches).
MetricValue metric(const DomainSpec& spec, const CVec& a, const CVec& X,
                   MetricKind kind);

// True when metric() would succeed at (spec, a, kind) for generic X.
bool metric_supported(const DomainSpec& spec, const CVec& a, MetricKind kind);

// True iff metric(spec, a, X, kind).value < 1.
bool indicatrix_member(const DomainSpec& spec, const CVec& a, MetricKind kind,
                       const CVec& X);

// Pluricomplex Green value g(0, w) = log gauge(w) for balanced
// pseudoconvex domains at the centre; negative inside, tending to 0 at
// the boundary.
struct GreenValueAtCenter {
  double value = 0.0;
};
GreenValueAtCenter green_at_center(const DomainSpec& spec, const CVec& w);

// Derivative covector of a function extremal for the caratheodory
// metric in the direction V: c.V = C(a;V) (real, positive) and
// |c.X| <= C(a;X) for every X.
struct ExtremalCovector {
  CVec c;
  CVec target;
  double achieved = 0.0;
};

// Supported where duality gives the covector exactly: polydiscs and
// balls at any point, balanced convex domains at the centre (Holder /
// gradient duals), thin complex ellipsoids at the centre (hull dual),
// and products, intersections and affine images of supported cases.
ExtremalCovector extremal_covector(const DomainSpec& spec, const CVec& a,
                                   const CVec& V);
bool extremal_covector_supported(const DomainSpec& spec, const CVec& a);

// Support function S(c) = sup { |c.z| : z in D } of a balanced domain,
// with c acting bilinearly (no conjugation).  Closed forms for the
// standard families; otherwise a multi-start ascent over ray
// directions driven by the given stream.
double support_function(const DomainSpec& spec, const CVec& c,
                        const Stream& stream, int starts = 8);

// Gauge of the convex hull of a balanced domain by the dual search
//   sup { |c.X| : S(c) <= 1 },
// multi-start coordinate ascent to tolerance ~1e-8.  This is the
// caratheodory metric at the centre; metric() uses it as the fallback
// backend with a fixed internal stream, tests use it as an oracle
// against the closed hull forms.
double hull_gauge_support(const DomainSpec& spec, const CVec& X,
                          const Stream& stream, int starts = 32);

}  // namespace caralab
