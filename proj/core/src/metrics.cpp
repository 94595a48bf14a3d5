#include "caralab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "caralab/optimize.hpp"

namespace caralab {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

bool at_center(const CVec& a) { return a.isZero(0.0); }

Complex bilinear(const CVec& c, const CVec& X) {
  Complex s = 0.0;
  for (Eigen::Index j = 0; j < c.size(); ++j) s += c[j] * X[j];
  return s;
}

Stream internal_stream() {
  return Stream{0x6361726173756D73ull}.derive("hull-gauge");
}

// --------------------------------------------------------------------------
// Support function

// sup of sum b_j u_j over { u >= 0 : sum (u_j/rho_j)^(q_j) <= 1 }.  On
// the surface u_j = rho_j s_j^(1/q_j) with s in the simplex; n <= 3
// keeps the search one or two dimensional.  Deterministic, no RNG.
double moment_surface_max(const std::vector<double>& q,
                          const std::vector<double>& rho,
                          const std::vector<double>& b) {
  const int n = static_cast<int>(q.size());
  auto value = [&](const std::vector<double>& s_full) {
    double f = 0.0;
    for (int j = 0; j < n; ++j)
      f += b[j] * rho[j] * std::pow(s_full[j], 1.0 / q[j]);
    return f;
  };
  if (n == 1) return b[0] * rho[0];
  if (n == 2) {
    auto f = [&](double s) {
      if (s < 0.0 || s > 1.0) return -1.0;
      return value({s, 1.0 - s});
    };
    long budget = 400;
    const double s = line_max(f, 0.5, 0.5, 1e-12, budget);
    return std::max({f(s), f(0.0), f(1.0)});
  }
  auto f = [&](const std::vector<double>& t) {
    if (t[0] < 0.0 || t[1] < 0.0 || t[0] + t[1] > 1.0) return -1.0;
    return value({t[0], t[1], 1.0 - t[0] - t[1]});
  };
  double best = 0.0;
  const std::vector<std::vector<double>> starts = {
      {1.0 / 3, 1.0 / 3}, {1.0, 0.0}, {0.0, 1.0}, {0.0, 0.0},
      {0.5, 0.5},         {0.5, 0.0}, {0.0, 0.5}};
  for (const auto& s0 : starts)
    best = std::max(best, coordinate_ascent(f, s0, 0.5, 1e-12, 600).value);
  return best;
}

// Generic fallback: S(c) = sup over directions d of |c.d| / gauge(d).
double support_search(const DomainSpec& spec, const CVec& c,
                      const Stream& stream, int starts) {
  const int n = spec.dim();
  const int na = sphere_angle_count(n);
  SeqStream rng(stream.derive("support-search"));
  auto objective = [&](const std::vector<double>& angles) {
    const CVec d = sphere_point(angles, n);
    const double h = minkowski(spec, d);
    return h > 0.0 ? std::abs(bilinear(c, d)) / h : 0.0;
  };
  return multistart_max(objective, na, 0.0, 2.0 * std::numbers::pi, {},
                        starts, 800L * starts, rng)
      .value;
}

}  // namespace

double support_function(const DomainSpec& spec, const CVec& c,
                        const Stream& stream, int starts) {
  require(spec.flags().balanced, "support function needs a balanced domain");
  require(c.size() == spec.dim(), "support function: size mismatch");
  const int n = spec.dim();
  switch (spec.kind()) {
    case DomainKind::polydisc: {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += spec.radii()[j] * std::abs(c[j]);
      return s;
    }
    case DomainKind::ball:
      return spec.radii()[0] * c.norm();
    case DomainKind::diamond: {
      double s = 0.0;
      for (int j = 0; j < n; ++j)
        s = std::max(s, std::abs(c[j]) / spec.weights()[j]);
      return s;
    }
    case DomainKind::pball: {
      const double p = spec.p();
      if (p == 1.0) {
        double s = 0.0;
        for (int j = 0; j < n; ++j)
          s = std::max(s, spec.radii()[j] * std::abs(c[j]));
        return s;
      }
      const double qq = p / (p - 1.0);
      double s = 0.0;
      for (int j = 0; j < n; ++j)
        s += std::pow(spec.radii()[j] * std::abs(c[j]), qq);
      return std::pow(s, 1.0 / qq);
    }
    case DomainKind::complex_ellipsoid: {
      std::vector<double> q(n), b(n);
      bool all_thin = true;
      for (int j = 0; j < n; ++j) {
        q[j] = 2.0 * spec.exponents()[j];
        b[j] = std::abs(c[j]);
        all_thin &= q[j] <= 1.0;
      }
      if (all_thin) {
        // The surface objective is convex in the simplex variable, so
        // the maximum sits at a vertex.
        double s = 0.0;
        for (int j = 0; j < n; ++j) s = std::max(s, spec.radii()[j] * b[j]);
        return s;
      }
      return moment_surface_max(q, spec.radii(), b);
    }
    case DomainKind::product: {
      double s = 0.0;
      int off = 0;
      std::uint64_t label = 0;
      for (const auto& m : spec.members()) {
        s += support_function(*m, c.segment(off, m->dim()),
                              stream.derive(label++), starts);
        off += m->dim();
      }
      return s;
    }
    case DomainKind::transformed:
      return std::abs(spec.scale()) *
             support_function(spec.inner(),
                              spec.unitary().transpose() * c, stream, starts);
    case DomainKind::intersection:
      return support_search(spec, c, stream, starts);
  }
  throw std::logic_error("unreachable");
}

double hull_gauge_support(const DomainSpec& spec, const CVec& X,
                          const Stream& stream, int starts) {
  require(spec.flags().balanced, "hull gauge needs a balanced domain");
  require(X.size() == spec.dim() && X.norm() > 0.0,
          "hull gauge: direction must be nonzero");
  const int n = spec.dim();
  const int na = sphere_angle_count(n);
  const Stream inner = stream.derive("support-eval");
  SeqStream rng(stream.derive("dual-search"));
  auto objective = [&](const std::vector<double>& angles) {
    const CVec c = sphere_point(angles, n);
    const double s = support_function(spec, c, inner, 4);
    return s > 1e-12 ? std::abs(bilinear(c, X)) / s : 0.0;
  };
  return multistart_max(objective, na, 0.0, 2.0 * std::numbers::pi, {},
                        starts, 500L * starts, rng)
      .value;
}

// --------------------------------------------------------------------------
// Metric dispatch

namespace {

using Valued = std::pair<double, MetricBackend>;

double cara_polydisc(const std::vector<double>& rho, const CVec& a,
                     const CVec& X) {
  double v = 0.0;
  for (Eigen::Index j = 0; j < X.size(); ++j) {
    const double r = rho[j];
    v = std::max(v, r * std::abs(X[j]) / (r * r - std::norm(a[j])));
  }
  return v;
}

double cara_ball(double rho, const CVec& a, const CVec& X) {
  const double room = rho * rho - a.squaredNorm();
  const double cross = std::abs(Complex(a.dot(X)));  // |<X, a>|
  return std::sqrt(X.squaredNorm() * room + cross * cross) / room;
}

bool ellipsoid_all_thin(const DomainSpec& spec) {
  return std::all_of(spec.exponents().begin(), spec.exponents().end(),
                     [](double p) { return p <= 0.5; });
}

bool ellipsoid_all_fat(const DomainSpec& spec) {
  return std::all_of(spec.exponents().begin(), spec.exponents().end(),
                     [](double p) { return p >= 0.5; });
}

Valued cara(const DomainSpec& spec, const CVec& a, const CVec& X);

bool cara_supported(const DomainSpec& spec, const CVec& a) {
  switch (spec.kind()) {
    case DomainKind::transformed:
      return cara_supported(spec.inner(),
                            spec.unitary().adjoint() *
                                (a - spec.translation()) / spec.scale());
    case DomainKind::polydisc:
    case DomainKind::ball:
      return true;
    default:
      break;
  }
  if (spec.flags().balanced && at_center(a)) return true;
  if (spec.kind() == DomainKind::product && spec.flags().convex) {
    int off = 0;
    for (const auto& m : spec.members()) {
      if (!cara_supported(*m, a.segment(off, m->dim()))) return false;
      off += m->dim();
    }
    return true;
  }
  return false;
}

Valued cara_center_balanced(const DomainSpec& spec, const CVec& X) {
  if (spec.flags().convex)
    return {minkowski(spec, X), MetricBackend::minkowski_reduction};
  if (spec.kind() == DomainKind::complex_ellipsoid && ellipsoid_all_thin(spec)) {
    // Convex hull of the thin ellipsoid is the weighted-l1 diamond.
    double v = 0.0;
    for (int j = 0; j < spec.dim(); ++j)
      v += std::abs(X[j]) / spec.radii()[j];
    return {v, MetricBackend::minkowski_reduction};
  }
  if (spec.kind() == DomainKind::product) {
    double v = 0.0;
    int off = 0;
    for (const auto& m : spec.members()) {
      v = std::max(v,
                   cara_center_balanced(*m, X.segment(off, m->dim())).first);
      off += m->dim();
    }
    return {v, MetricBackend::minkowski_reduction};
  }
  return {hull_gauge_support(spec, X, internal_stream(), 32),
          MetricBackend::minkowski_reduction};
}

Valued cara(const DomainSpec& spec, const CVec& a, const CVec& X) {
  switch (spec.kind()) {
    case DomainKind::transformed: {
      const CVec a0 = spec.unitary().adjoint() * (a - spec.translation()) /
                      spec.scale();
      const auto [v, b] = cara(spec.inner(), a0, spec.unitary().adjoint() * X);
      return {v / std::abs(spec.scale()), b};
    }
    case DomainKind::polydisc:
      return {cara_polydisc(spec.radii(), a, X), MetricBackend::closed_form};
    case DomainKind::ball:
      return {cara_ball(spec.radii()[0], a, X), MetricBackend::closed_form};
    default:
      break;
  }
  if (spec.flags().balanced && at_center(a)) return cara_center_balanced(spec, X);
  if (spec.kind() == DomainKind::product && spec.flags().convex) {
    // Convex products: the metric is the maximum over the factors.
    double v = 0.0;
    MetricBackend b = MetricBackend::closed_form;
    int off = 0;
    for (const auto& m : spec.members()) {
      const CVec Xm = X.segment(off, m->dim());
      if (Xm.norm() > 0.0) {
        const auto [vm, bm] = cara(*m, a.segment(off, m->dim()), Xm);
        v = std::max(v, vm);
        if (bm == MetricBackend::minkowski_reduction) b = bm;
      } else if (!cara_supported(*m, a.segment(off, m->dim()))) {
        throw NoBackendError("caratheodory: unsupported product factor");
      }
      off += m->dim();
    }
    return {v, b};
  }
  throw NoBackendError(
      "caratheodory: no backend at this point for this domain");
}

bool azukawa_supported(const DomainSpec& spec, const CVec& a) {
  if (spec.kind() == DomainKind::transformed)
    return azukawa_supported(spec.inner(),
                             spec.unitary().adjoint() *
                                 (a - spec.translation()) / spec.scale());
  if (spec.flags().balanced && spec.flags().pseudoconvex && at_center(a))
    return true;
  if (spec.flags().convex) return cara_supported(spec, a);
  return false;
}

Valued azukawa(const DomainSpec& spec, const CVec& a, const CVec& X) {
  if (spec.kind() == DomainKind::transformed) {
    const CVec a0 = spec.unitary().adjoint() * (a - spec.translation()) /
                    spec.scale();
    const auto [v, b] = azukawa(spec.inner(), a0, spec.unitary().adjoint() * X);
    return {v / std::abs(spec.scale()), b};
  }
  // Balanced pseudoconvex at the centre: the Green function is
  // log gauge, so the Azukawa indicatrix is the domain itself.
  if (spec.flags().balanced && spec.flags().pseudoconvex && at_center(a))
    return {minkowski(spec, X), MetricBackend::minkowski_reduction};
  // Convex domains: squeezed between caratheodory and kobayashi, which
  // agree by Lempert's theorem.
  if (spec.flags().convex) return cara(spec, a, X);
  throw NoBackendError("azukawa: no backend at this point for this domain");
}

bool kobayashi_supported(const DomainSpec& spec, const CVec& a) {
  if (spec.kind() == DomainKind::transformed)
    return kobayashi_supported(spec.inner(),
                               spec.unitary().adjoint() *
                                   (a - spec.translation()) / spec.scale());
  if (spec.flags().convex) return cara_supported(spec, a);
  if (spec.flags().balanced && spec.flags().pseudoconvex && at_center(a))
    return true;
  return false;
}

Valued kobayashi(const DomainSpec& spec, const CVec& a, const CVec& X) {
  if (spec.kind() == DomainKind::transformed) {
    const CVec a0 = spec.unitary().adjoint() * (a - spec.translation()) /
                    spec.scale();
    const auto [v, b] =
        kobayashi(spec.inner(), a0, spec.unitary().adjoint() * X);
    return {v / std::abs(spec.scale()), b};
  }
  if (spec.flags().convex) return cara(spec, a, X);  // Lempert
  // Non-convex balanced pseudoconvex centre: squeezed between the
  // Azukawa metric and the reciprocal distance, both equal to the gauge.
  if (spec.flags().balanced && spec.flags().pseudoconvex && at_center(a))
    return {minkowski(spec, X), MetricBackend::minkowski_reduction};
  throw NoBackendError("kobayashi: no backend at this point for this domain");
}

Valued recip(const DomainSpec& spec, const CVec& a, const CVec& X) {
  const double d = boundary_distance(spec, a, X);
  const MetricBackend b = (spec.flags().balanced && at_center(a))
                              ? MetricBackend::minkowski_reduction
                              : MetricBackend::closed_form;
  return {1.0 / d, b};
}

void validate_point(const DomainSpec& spec, const CVec& a, const CVec& X) {
  require(a.size() == spec.dim() && X.size() == spec.dim(),
          "metric: dimension mismatch");
  require(contains(spec, a), "metric: base point outside the domain");
}

}  // namespace

bool metric_supported(const DomainSpec& spec, const CVec& a, MetricKind kind) {
  require(a.size() == spec.dim(), "metric: dimension mismatch");
  require(contains(spec, a), "metric: base point outside the domain");
  switch (kind) {
    case MetricKind::caratheodory:
      return cara_supported(spec, a);
    case MetricKind::azukawa:
      return azukawa_supported(spec, a);
    case MetricKind::kobayashi:
      return kobayashi_supported(spec, a);
    case MetricKind::reciprocal_distance:
      return true;
  }
  return false;
}

MetricValue metric(const DomainSpec& spec, const CVec& a, const CVec& X,
                   MetricKind kind) {
  validate_point(spec, a, X);
  if (X.norm() == 0.0) {
    if (!metric_supported(spec, a, kind))
      throw NoBackendError("metric: no backend at this point");
    return {0.0, kind, MetricBackend::closed_form};
  }
  Valued v{0.0, MetricBackend::unsupported};
  switch (kind) {
    case MetricKind::caratheodory:
      v = cara(spec, a, X);
      break;
    case MetricKind::azukawa:
      v = azukawa(spec, a, X);
      break;
    case MetricKind::kobayashi:
      v = kobayashi(spec, a, X);
      break;
    case MetricKind::reciprocal_distance:
      v = recip(spec, a, X);
      break;
  }
  return {v.first, kind, v.second};
}

bool indicatrix_member(const DomainSpec& spec, const CVec& a, MetricKind kind,
                       const CVec& X) {
  return metric(spec, a, X, kind).value < 1.0;
}

GreenValueAtCenter green_at_center(const DomainSpec& spec, const CVec& w) {
  if (!spec.flags().balanced || !spec.flags().pseudoconvex)
    throw NoBackendError(
        "green function: backend covers balanced pseudoconvex domains only");
  require(w.size() == spec.dim(), "green function: dimension mismatch");
  require(contains(spec, w), "green function: point outside the domain");
  return {std::log(minkowski(spec, w))};
}

// --------------------------------------------------------------------------
// Extremal covectors

namespace {

// Tangent-plane dual at the centre for gauges of the form
// sum (|z_j|/rho_j)^(q_j) < 1 with every q_j >= 1 (pballs: q_j = p;
// convex complex ellipsoids: q_j = 2 p_j; diamonds: q_j = 1).
CVec gradient_dual(const std::vector<double>& q,
                   const std::vector<double>& rho, const CVec& V, double h) {
  const int n = static_cast<int>(q.size());
  CVec c = CVec::Zero(n);
  double denom = 0.0;
  std::vector<double> w(n, 0.0);
  for (int j = 0; j < n; ++j) {
    const double u = std::abs(V[j]);
    if (u == 0.0) continue;
    w[j] = std::pow(u / (h * rho[j]), q[j]);
    denom += q[j] * w[j];
  }
  for (int j = 0; j < n; ++j) {
    const double u = std::abs(V[j]);
    if (u == 0.0) continue;
    c[j] = std::conj(V[j]) / u * (q[j] * w[j] / u) * h / denom;
  }
  return c;
}

CVec cov(const DomainSpec& spec, const CVec& a, const CVec& V);

bool cov_supported(const DomainSpec& spec, const CVec& a) {
  switch (spec.kind()) {
    case DomainKind::transformed:
      return cov_supported(spec.inner(),
                           spec.unitary().adjoint() *
                               (a - spec.translation()) / spec.scale());
    case DomainKind::polydisc:
    case DomainKind::ball:
      return true;
    case DomainKind::product: {
      int off = 0;
      for (const auto& m : spec.members()) {
        if (!cov_supported(*m, a.segment(off, m->dim()))) return false;
        off += m->dim();
      }
      return true;
    }
    default:
      break;
  }
  if (!spec.flags().balanced || !at_center(a)) return false;
  switch (spec.kind()) {
    case DomainKind::diamond:
    case DomainKind::pball:
      return true;
    case DomainKind::complex_ellipsoid:
      return ellipsoid_all_thin(spec) || ellipsoid_all_fat(spec);
    case DomainKind::intersection: {
      if (!spec.flags().convex) return false;
      for (const auto& m : spec.members())
        if (!cov_supported(*m, CVec::Zero(m->dim()))) return false;
      return true;
    }
    default:
      return false;
  }
}

CVec cov(const DomainSpec& spec, const CVec& a, const CVec& V) {
  switch (spec.kind()) {
    case DomainKind::transformed: {
      const CVec a0 = spec.unitary().adjoint() * (a - spec.translation()) /
                      spec.scale();
      const CVec V0 = spec.unitary().adjoint() * V / spec.scale();
      const CVec c0 = cov(spec.inner(), a0, V0);
      return spec.unitary().conjugate() * c0 / spec.scale();
    }
    case DomainKind::polydisc: {
      const auto& rho = spec.radii();
      int jstar = -1;
      double best = -1.0;
      for (int j = 0; j < spec.dim(); ++j) {
        if (std::abs(V[j]) == 0.0) continue;
        const double cand =
            rho[j] * std::abs(V[j]) / (rho[j] * rho[j] - std::norm(a[j]));
        if (cand > best) {
          best = cand;
          jstar = j;
        }
      }
      CVec c = CVec::Zero(spec.dim());
      const double r = rho[jstar];
      c[jstar] = std::conj(V[jstar]) / std::abs(V[jstar]) * r /
                 (r * r - std::norm(a[jstar]));
      return c;
    }
    case DomainKind::ball: {
      const double rho = spec.radii()[0];
      const int n = spec.dim();
      if (at_center(a)) return V.conjugate() / (rho * V.norm());
      const CVec at = a / rho;
      const double s2 = 1.0 - at.squaredNorm();
      const CMat P = at * at.adjoint() / at.squaredNorm();
      const CMat M = (P + std::sqrt(s2) * (CMat::Identity(n, n) - P)) / s2;
      const CVec w = (M * V).normalized();
      return (M.adjoint() * w).conjugate() / rho;
    }
    case DomainKind::product: {
      // The factor achieving the metric carries the covector.
      int off = 0, best_off = -1;
      double best = -1.0;
      const DomainSpec* best_m = nullptr;
      for (const auto& m : spec.members()) {
        const CVec Vm = V.segment(off, m->dim());
        if (Vm.norm() > 0.0) {
          const double vm = cara(*m, a.segment(off, m->dim()), Vm).first;
          if (vm > best) {
            best = vm;
            best_off = off;
            best_m = m.get();
          }
        }
        off += m->dim();
      }
      CVec c = CVec::Zero(spec.dim());
      c.segment(best_off, best_m->dim()) =
          cov(*best_m, a.segment(best_off, best_m->dim()),
              V.segment(best_off, best_m->dim()));
      return c;
    }
    default:
      break;
  }
  if (spec.flags().balanced && at_center(a)) {
    switch (spec.kind()) {
      case DomainKind::diamond: {
        CVec c = CVec::Zero(spec.dim());
        for (int j = 0; j < spec.dim(); ++j)
          if (std::abs(V[j]) > 0.0)
            c[j] = spec.weights()[j] * std::conj(V[j]) / std::abs(V[j]);
        return c;
      }
      case DomainKind::pball: {
        const std::vector<double> q(spec.dim(), spec.p());
        return gradient_dual(q, spec.radii(), V, minkowski(spec, V));
      }
      case DomainKind::complex_ellipsoid: {
        if (ellipsoid_all_thin(spec)) {
          // Dual of the hull diamond.
          CVec c = CVec::Zero(spec.dim());
          for (int j = 0; j < spec.dim(); ++j)
            if (std::abs(V[j]) > 0.0)
              c[j] = std::conj(V[j]) / (std::abs(V[j]) * spec.radii()[j]);
          return c;
        }
        if (ellipsoid_all_fat(spec)) {
          std::vector<double> q(spec.dim());
          for (int j = 0; j < spec.dim(); ++j)
            q[j] = 2.0 * spec.exponents()[j];
          return gradient_dual(q, spec.radii(), V, minkowski(spec, V));
        }
        break;
      }
      case DomainKind::intersection: {
        if (!spec.flags().convex) break;
        // Gauge is the max over members; its maximizer is extremal.
        double best = -1.0;
        const DomainSpec* best_m = nullptr;
        for (const auto& m : spec.members()) {
          const double hm = minkowski(*m, V);
          if (hm > best) {
            best = hm;
            best_m = m.get();
          }
        }
        return cov(*best_m, a, V);
      }
      default:
        break;
    }
  }
  throw NoBackendError(
      "extremal covector: no backend at this point for this domain");
}

}  // namespace

bool extremal_covector_supported(const DomainSpec& spec, const CVec& a) {
  require(a.size() == spec.dim(), "extremal covector: dimension mismatch");
  require(contains(spec, a), "extremal covector: point outside the domain");
  return cov_supported(spec, a);
}

ExtremalCovector extremal_covector(const DomainSpec& spec, const CVec& a,
                                   const CVec& V) {
  require(a.size() == spec.dim() && V.size() == spec.dim(),
          "extremal covector: dimension mismatch");
  require(contains(spec, a), "extremal covector: point outside the domain");
  require(V.norm() > 0.0, "extremal covector: direction must be nonzero");
  ExtremalCovector out;
  out.c = cov(spec, a, V);
  out.target = V;
  out.achieved = bilinear(out.c, V).real();
  return out;
}

}  // namespace caralab
