#include "caralab/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "caralab/optimize.hpp"
#include "caralab/rng.hpp"

namespace caralab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Stream module_stream(std::string_view label) {
  return Stream{0x66726D652D6C6162ull}.derive(label);
}

double cara(const DomainSpec& spec, const CVec& a, const CVec& X) {
  return metric(spec, a, X, MetricKind::caratheodory).value;
}

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

// Orthonormal basis of the orthogonal complement of the first `found`
// columns of E, built deterministically from the ambient axes.
CMat complement_basis(const CMat& E, int found) {
  const int n = static_cast<int>(E.rows());
  const int m = n - found;
  CMat B(n, m);
  int got = 0;
  for (int k = 0; k < n && got < m; ++k) {
    CVec w = CVec::Zero(n);
    w[k] = Complex(1.0, 0.0);
    for (int j = 0; j < found; ++j) w -= E.col(j).dot(w) * E.col(j);
    for (int j = 0; j < got; ++j) w -= B.col(j).dot(w) * B.col(j);
    const double nrm = w.norm();
    if (nrm > 1e-6) B.col(got++) = w / nrm;
  }
  if (got != m)
    throw std::runtime_error("frame construction: complement basis failed");
  return B;
}

// Applies the frame tie-break: if some ambient axis (projected into the
// current complement) attains the stage maximum up to 1e-9 relative,
// the smallest such axis wins; then the leading nonzero coordinate is
// rotated to the positive real line.
CVec snap_direction(const DomainSpec& spec, const CVec& a, const CMat& E,
                    int found, CVec x, double value) {
  const int n = static_cast<int>(E.rows());
  for (int k = 0; k < n; ++k) {
    CVec w = CVec::Zero(n);
    w[k] = Complex(1.0, 0.0);
    for (int j = 0; j < found; ++j) w -= E.col(j).dot(w) * E.col(j);
    const double nrm = w.norm();
    if (nrm <= 1e-9) continue;
    w /= nrm;
    if (cara(spec, a, w) >= value * (1.0 - 1e-9)) {
      x = w;
      break;
    }
  }
  for (int k = 0; k < n; ++k) {
    if (std::abs(x[k]) > 1e-9) {
      x *= std::polar(1.0, -std::arg(x[k]));
      break;
    }
  }
  return x;
}

}  // namespace

Frame greedy_basis(const DomainSpec& spec, const CVec& a, long budget) {
  const int n = spec.dim();
  Frame frame;
  frame.basis = CMat::Zero(n, n);
  frame.radii.assign(n, 0.0);

  SeqStream rng(module_stream("greedy-stage"));
  for (int stage = 0; stage < n; ++stage) {
    const int m = n - stage;
    const CMat B = complement_basis(frame.basis, stage);
    CVec x;
    double value;
    if (m == 1) {
      x = B.col(0);
      value = cara(spec, a, x);
    } else {
      auto obj = [&](const std::vector<double>& angles) {
        return cara(spec, a, B * sphere_point(angles, m));
      };
      const int dim = sphere_angle_count(m);
      const OptResult best = multistart_max(
          obj, dim, 0.0, kTwoPi, std::vector<double>(dim, 0.0), 16, budget,
          rng);
      x = B * sphere_point(best.x, m);
      x.normalize();
      value = best.value;
    }
    x = snap_direction(spec, a, frame.basis, stage, x, value);
    frame.basis.col(stage) = x;
    frame.radii[stage] = cara(spec, a, x);
    if (!(frame.radii[stage] > 0.0))
      throw std::runtime_error("frame construction: vanishing metric radius");
  }
  if ((frame.basis.adjoint() * frame.basis - CMat::Identity(n, n)).norm() >
      1e-10)
    throw std::runtime_error("frame construction: basis not orthonormal");

  frame.pi = 1.0;
  for (double r : frame.radii) frame.pi *= r;
  const KHat k = empirical_k(spec, a, frame, budget);
  frame.k_hat = k.value;
  frame.k_hat_witness = k.witness;
  return frame;
}

KHat empirical_k(const DomainSpec& spec, const CVec& a, const Frame& frame,
                 long budget) {
  const int n = spec.dim();
  auto ratio = [&](const CVec& X) {
    double denom = 0.0;
    for (int j = 0; j < n; ++j)
      denom += std::abs(frame.basis.col(j).dot(X)) * frame.radii[j];
    return cara(spec, a, X) / denom;
  };

  KHat best;
  best.value = std::numeric_limits<double>::infinity();
  auto consider = [&](const CVec& X) {
    const double v = ratio(X);
    if (v < best.value) {
      best.value = v;
      best.witness = X;
    }
  };

  // Anchors: the frame vectors (ratio exactly 1) and the direction that
  // equalizes the weighted frame coordinates.
  for (int j = 0; j < n; ++j) consider(frame.basis.col(j));
  CVec eq = CVec::Zero(n);
  for (int j = 0; j < n; ++j) eq += frame.basis.col(j) / frame.radii[j];
  consider(eq.normalized());

  const int dim = sphere_angle_count(n);
  if (dim > 0 && n > 1) {
    SeqStream rng(module_stream("empirical-k"));
    auto obj = [&](const std::vector<double>& angles) {
      return -ratio(sphere_point(angles, n));
    };
    const OptResult run = multistart_max(
        obj, dim, 0.0, kTwoPi, std::vector<double>(dim, 0.0), 32, budget, rng);
    consider(sphere_point(run.x, n));

    SeqStream probes(module_stream("k-probes"));
    for (int i = 0; i < 10000; ++i) consider(probes.next_direction(n));
  }

  best.value = std::min(best.value, 1.0);
  return best;
}

ExtremalMapJacobian build_extremal_map(const DomainSpec& spec, const CVec& a,
                                       const Frame& frame) {
  const int n = spec.dim();
  const CMat& E = frame.basis;
  ExtremalMapJacobian jac;
  jac.rows = CMat::Zero(n, n);

  const ExtremalCovector first = extremal_covector(spec, a, E.col(0));
  jac.rows.row(0) = (E.transpose() * first.c).transpose();

  for (int m = 1; m < n; ++m) {
    // Cofactor direction of the top m x (m+1) block; its inner product
    // with any candidate row m equals the leading (m+1) determinant.
    CVec V(m + 1);
    for (int j = 0; j <= m; ++j) {
      CMat minor(m, m);
      int col = 0;
      for (int k = 0; k <= m; ++k) {
        if (k == j) continue;
        minor.col(col++) = jac.rows.block(0, k, m, 1);
      }
      const Complex d = minor.determinant();
      V[j] = ((m + j) % 2 == 0) ? d : -d;
    }
    if (V.norm() <= 1e-12)
      throw std::runtime_error("extremal map: degenerate cofactor direction");
    const CVec V_amb = E.leftCols(m + 1) * V;
    const ExtremalCovector cov = extremal_covector(spec, a, V_amb);
    jac.rows.row(m) = (E.transpose() * cov.c).transpose();

    const Complex lead =
        jac.rows.topLeftCorner(m + 1, m + 1).determinant();
    Complex expansion(0.0, 0.0);
    for (int j = 0; j <= m; ++j) expansion += jac.rows(m, j) * V[j];
    if (std::abs(lead - expansion) >
        1e-9 * std::max(1.0, std::abs(expansion)))
      throw std::runtime_error("extremal map: expansion identity failed");

    CVec pad = CVec::Zero(n);
    pad.head(m + 1) = V;
    jac.cofactors.push_back(pad);
  }
  jac.det = jac.rows.determinant();
  return jac;
}

CEBounds ce_bounds(const ExtremalMapJacobian& jac, const Frame& frame) {
  const int n = static_cast<int>(jac.rows.rows());
  CEBounds b;
  const double d = std::abs(jac.det);
  b.lower = d * d;
  const double cap = factorial(n) * frame.pi;
  b.upper = cap * cap;
  return b;
}

MinPiResult min_pi_over_frames(const DomainSpec& spec, const CVec& a,
                               long budget) {
  const int n = spec.dim();
  MinPiResult res;
  if (n == 1) {
    CVec one(1);
    one[0] = Complex(1.0, 0.0);
    res.min_pi = cara(spec, a, one);
    res.p = 1.0 / res.min_pi;
    res.frame = CMat::Identity(1, 1);
    return res;
  }

  auto obj = [&](const std::vector<double>& angles) {
    const CMat U = unitary_from_angles(angles, n);
    double p = 1.0;
    for (int j = 0; j < n; ++j) p *= cara(spec, a, U.col(j));
    return -p;
  };
  const int dim = unitary_angle_count(n);
  SeqStream rng(module_stream("min-pi"));
  const OptResult best = multistart_max(
      obj, dim, 0.0, kTwoPi, std::vector<double>(dim, 0.0), 16, budget, rng);
  res.min_pi = -best.value;
  res.p = 1.0 / res.min_pi;
  res.frame = unitary_from_angles(best.x, n);
  return res;
}

namespace {

// True when the caratheodory gauge at a depends only on coordinate
// moduli, so the phase sup over a torus collapses to one evaluation.
bool modulus_invariant_gauge(const DomainSpec& spec, const CVec& a) {
  if (spec.kind() == DomainKind::polydisc) return true;
  if (spec.kind() == DomainKind::product) {
    int off = 0;
    for (const auto& mem : spec.members()) {
      if (!modulus_invariant_gauge(*mem, a.segment(off, mem->dim())))
        return false;
      off += mem->dim();
    }
    return true;
  }
  return spec.flags().balanced && spec.flags().reinhardt && a.isZero(0.0);
}

using Gauge = std::function<double(const CVec&)>;

// sup over torus phases of gauge(U * (s .* e^{i theta})); one global
// phase is factored out.  Grid of 32 per free phase, then one
// golden-section pass per phase around the worst grid point.
double phase_sup(const Gauge& h, const CMat& U, const Eigen::VectorXd& s,
                 bool fast_real) {
  const int n = static_cast<int>(s.size());
  auto eval = [&](const std::vector<double>& th) {
    CVec X(n);
    X[0] = Complex(s[0], 0.0);
    for (int k = 1; k < n; ++k) X[k] = s[k] * std::polar(1.0, th[k - 1]);
    return h(U * X);
  };
  if (fast_real || n == 1) return eval(std::vector<double>(n > 1 ? n - 1 : 0));

  constexpr int kGrid = 32;
  long combos = 1;
  for (int k = 1; k < n; ++k) combos *= kGrid;
  std::vector<double> th(n - 1, 0.0), best_th(n - 1, 0.0);
  double best = -std::numeric_limits<double>::infinity();
  for (long c = 0; c < combos; ++c) {
    long rest = c;
    for (int k = 0; k < n - 1; ++k) {
      th[k] = kTwoPi * static_cast<double>(rest % kGrid) / kGrid;
      rest /= kGrid;
    }
    const double v = eval(th);
    if (v > best) {
      best = v;
      best_th = th;
    }
  }
  for (int k = 0; k < n - 1; ++k) {
    long refine = 64;
    auto slice = [&](double t) {
      std::vector<double> y = best_th;
      y[k] = t;
      return eval(y);
    };
    const double tk =
        line_max(slice, best_th[k], std::numbers::pi / kGrid, 1e-6, refine);
    if (slice(tk) >= best) {
      best_th[k] = tk;
      best = slice(tk);
    }
  }
  return best;
}

struct InscribedResult {
  double volume = 0.0;
  Eigen::VectorXd s;
};

// Largest-volume torus-invariant polydisc U*diag(s)*polytorus inside
// the unit sublevel set of h.  The gauge is positively homogeneous, so
// the scale along any radii direction is 1/sup; the search runs over
// log radii ratios, then a per-coordinate bisection polish.
InscribedResult inscribed_for_frame(
    const Gauge& h, const CMat& U, bool fast_real, long budget,
    const Eigen::VectorXd* seed_ratios = nullptr) {
  const int n = static_cast<int>(U.rows());
  auto scaled = [&](const Eigen::VectorXd& d) {
    const double g = phase_sup(h, U, d, fast_real);
    return Eigen::VectorXd(d / g);
  };
  auto log_volume = [&](const Eigen::VectorXd& s) {
    double lv = 0.0;
    for (int j = 0; j < n; ++j) lv += 2.0 * std::log(s[j]);
    return lv;
  };

  Eigen::VectorXd dir = Eigen::VectorXd::Ones(n);
  if (n > 1) {
    auto obj = [&](const std::vector<double>& y) {
      Eigen::VectorXd d(n);
      d[0] = 1.0;
      for (int j = 1; j < n; ++j) d[j] = std::exp(y[j - 1]);
      return log_volume(scaled(d));
    };
    std::vector<double> y0(n - 1, 0.0);
    if (seed_ratios) {
      for (int j = 1; j < n; ++j)
        y0[j - 1] = std::log((*seed_ratios)[j] / (*seed_ratios)[0]);
    }
    SeqStream rng(module_stream("hull-inscribed"));
    const OptResult best =
        multistart_max(obj, n - 1, -3.0, 3.0, y0, 6, budget, rng);
    dir[0] = 1.0;
    for (int j = 1; j < n; ++j) dir[j] = std::exp(best.x[j - 1]);
  }
  Eigen::VectorXd s = scaled(dir);

  // Polish: grow each radius to the feasibility boundary in turn.
  for (int pass = 0; pass < 2; ++pass) {
    for (int j = 0; j < n; ++j) {
      double lo = s[j];
      double hi = s[j];
      Eigen::VectorXd t = s;
      for (int grow = 0; grow < 12; ++grow) {
        hi *= 1.5;
        t[j] = hi;
        if (phase_sup(h, U, t, fast_real) > 1.0) break;
        lo = hi;
      }
      for (int it = 0; it < 50 && (hi - lo) > 1e-9 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        t[j] = mid;
        if (phase_sup(h, U, t, fast_real) <= 1.0)
          lo = mid;
        else
          hi = mid;
      }
      s[j] = lo;
    }
  }
  InscribedResult res;
  res.s = s;
  res.volume = 1.0;
  for (int j = 0; j < n; ++j)
    res.volume *= std::numbers::pi * s[j] * s[j];
  return res;
}

// A balanced domain whose support function equals the support of the
// caratheodory indicatrix at a.  At a balanced centre the indicatrix is
// the convex hull of the domain, and hull and domain share their
// support, so the domain itself qualifies (convex or not).  Polydiscs
// work at any point because their indicatrix is again a polydisc.
std::unique_ptr<DomainSpec> support_surrogate(const DomainSpec& spec,
                                              const CVec& a) {
  if (spec.flags().balanced && a.isZero(0.0))
    return std::make_unique<DomainSpec>(spec);
  switch (spec.kind()) {
    case DomainKind::polydisc: {
      std::vector<double> R(spec.radii().size());
      for (size_t j = 0; j < R.size(); ++j) {
        const double rho = spec.radii()[j];
        R[j] = (rho * rho - std::norm(a[static_cast<int>(j)])) / rho;
      }
      return std::make_unique<DomainSpec>(DomainSpec::polydisc(R));
    }
    case DomainKind::product: {
      std::vector<DomainSpec> parts;
      int off = 0;
      for (const auto& mem : spec.members()) {
        auto part = support_surrogate(*mem, a.segment(off, mem->dim()));
        if (!part) return nullptr;
        parts.push_back(*part);
        off += mem->dim();
      }
      return std::make_unique<DomainSpec>(DomainSpec::product(parts));
    }
    case DomainKind::transformed: {
      const CVec a0 = spec.unitary().adjoint() * (a - spec.translation()) /
                      spec.scale();
      auto inner = support_surrogate(spec.inner(), a0);
      if (!inner) return nullptr;
      return std::make_unique<DomainSpec>(transformed(
          *inner, spec.unitary(), spec.scale(), CVec::Zero(spec.dim())));
    }
    default:
      return nullptr;
  }
}

struct CircumscribedHelper {
  Gauge h;
  std::unique_ptr<DomainSpec> ind;
  Stream support_stream = module_stream("hull-support");
  // Fallback boundary sample: angle seeds plus the boundary points they
  // generate, shared across directions and frames.
  std::vector<std::vector<double>> angles;
  std::vector<CVec> boundary;

  void ensure_samples(int n) {
    if (!boundary.empty()) return;
    SeqStream rng(module_stream("hull-boundary"));
    const int dim = sphere_angle_count(n);
    angles.resize(1024);
    boundary.resize(1024);
    for (int i = 0; i < 1024; ++i) {
      angles[i].resize(dim);
      for (int k = 0; k < dim; ++k) angles[i][k] = rng.next_uniform(0, kTwoPi);
      const CVec d = sphere_point(angles[i], n);
      boundary[i] = d / h(d);
    }
  }

  // sup over the indicatrix of |<X, u>|.
  double radius(const CVec& u) {
    if (ind) return support_function(*ind, u.conjugate(), support_stream);
    const int n = static_cast<int>(u.size());
    ensure_samples(n);
    int arg = 0;
    double best = 0.0;
    for (int i = 0; i < 1024; ++i) {
      const double v = std::abs(u.dot(boundary[i]));
      if (v > best) {
        best = v;
        arg = i;
      }
    }
    auto obj = [&](const std::vector<double>& th) {
      const CVec d = sphere_point(th, n);
      return std::abs(u.dot(d)) / h(d);
    };
    const OptResult polish =
        coordinate_ascent(obj, angles[arg], 0.4, 1e-7, 300);
    return std::max(best, polish.value);
  }

  double volume(const CMat& U, Eigen::VectorXd* radii_out = nullptr) {
    const int n = static_cast<int>(U.rows());
    double vol = 1.0;
    if (radii_out) radii_out->resize(n);
    for (int j = 0; j < n; ++j) {
      const double sj = radius(U.col(j));
      if (radii_out) (*radii_out)[j] = sj;
      vol *= std::numbers::pi * sj * sj;
    }
    return vol;
  }
};

PolydiscFit make_fit(double volume, const Eigen::VectorXd& s, const CMat& U) {
  PolydiscFit fit;
  fit.volume = volume;
  fit.radii.assign(s.data(), s.data() + s.size());
  fit.frame = U;
  return fit;
}

}  // namespace

PolydiscHull polydisc_hull_volumes(const DomainSpec& spec, const CVec& a,
                                   long budget) {
  const int n = spec.dim();
  Gauge h = [&](const CVec& X) { return cara(spec, a, X); };
  const bool modinv = modulus_invariant_gauge(spec, a);
  const CMat I = CMat::Identity(n, n);

  PolydiscHull out;

  const InscribedResult ins_axis =
      inscribed_for_frame(h, I, modinv, budget / 4);
  out.inscribed_axis = make_fit(ins_axis.volume, ins_axis.s, I);

  out.inscribed_best = out.inscribed_axis;
  if (n > 1) {
    const int adim = unitary_angle_count(n);
    auto obj = [&](const std::vector<double>& params) {
      std::vector<double> ang(params.begin(), params.begin() + adim);
      const CMat U = unitary_from_angles(ang, n);
      Eigen::VectorXd d(n);
      d[0] = 1.0;
      for (int j = 1; j < n; ++j) d[j] = std::exp(params[adim + j - 1]);
      const double g = phase_sup(h, U, d, false);
      double lv = 0.0;
      for (int j = 0; j < n; ++j) lv += 2.0 * std::log(d[j] / g);
      return lv;
    };
    std::vector<double> x0(adim + n - 1, 0.0);
    for (int j = 1; j < n; ++j)
      x0[adim + j - 1] = std::log(ins_axis.s[j] / ins_axis.s[0]);
    SeqStream rng(module_stream("hull-inscribed-frames"));
    const OptResult run = multistart_max(obj, adim + n - 1, -3.0, 3.0, x0, 6,
                                         budget / 4, rng);
    std::vector<double> ang(run.x.begin(), run.x.begin() + adim);
    const CMat U = unitary_from_angles(ang, n);
    Eigen::VectorXd seed(n);
    seed[0] = 1.0;
    for (int j = 1; j < n; ++j) seed[j] = std::exp(run.x[adim + j - 1]);
    const InscribedResult ins =
        inscribed_for_frame(h, U, false, budget / 8, &seed);
    if (ins.volume > out.inscribed_best.volume)
      out.inscribed_best = make_fit(ins.volume, ins.s, U);
  }

  CircumscribedHelper circ;
  circ.h = h;
  circ.ind = support_surrogate(spec, a);
  Eigen::VectorXd s_axis;
  const double vol_axis = circ.volume(I, &s_axis);
  out.circumscribed_axis = make_fit(vol_axis, s_axis, I);

  out.circumscribed_best = out.circumscribed_axis;
  if (n > 1) {
    const int adim = unitary_angle_count(n);
    auto obj = [&](const std::vector<double>& ang) {
      return -std::log(circ.volume(unitary_from_angles(ang, n)));
    };
    SeqStream rng(module_stream("hull-circ-frames"));
    const OptResult run =
        multistart_max(obj, adim, 0.0, kTwoPi, std::vector<double>(adim, 0.0),
                       8, std::max<long>(budget / 64, 200), rng);
    const CMat U = unitary_from_angles(run.x, n);
    Eigen::VectorXd s_best;
    const double vol = circ.volume(U, &s_best);
    if (vol < out.circumscribed_best.volume)
      out.circumscribed_best = make_fit(vol, s_best, U);
  }
  return out;
}

}  // namespace caralab
