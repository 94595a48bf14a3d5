#include "caralab/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <utility>

#include <json.hpp>

#include "caralab/optimize.hpp"

namespace caralab {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void check_dim(std::size_t n, const std::string& what) {
  require(n >= 1 && n <= static_cast<std::size_t>(kMaxDim),
          what + ": dimension must be between 1 and 3");
}

void check_positive(const std::vector<double>& v, const std::string& what) {
  for (double x : v)
    require(std::isfinite(x) && x > 0.0, what + ": entries must be positive");
}

bool is_generalized_permutation(const CMat& U) {
  for (Eigen::Index i = 0; i < U.rows(); ++i) {
    int big = 0;
    for (Eigen::Index j = 0; j < U.cols(); ++j)
      if (std::abs(U(i, j)) > 1e-9) ++big;
    if (big != 1) return false;
  }
  return true;
}

}  // namespace

DomainSpec DomainSpec::polydisc(std::vector<double> radii) {
  check_dim(radii.size(), "polydisc");
  check_positive(radii, "polydisc radii");
  DomainSpec d;
  d.kind_ = DomainKind::polydisc;
  d.dim_ = static_cast<int>(radii.size());
  d.reals_ = std::move(radii);
  d.flags_ = {true, true, true, true, true};
  return d;
}

DomainSpec DomainSpec::ball(int dim, double radius) {
  check_dim(static_cast<std::size_t>(dim > 0 ? dim : 0), "ball");
  require(std::isfinite(radius) && radius > 0.0,
          "ball radius: entries must be positive");
  DomainSpec d;
  d.kind_ = DomainKind::ball;
  d.dim_ = dim;
  d.reals_ = {radius};
  d.flags_ = {true, true, true, true, true};
  return d;
}

DomainSpec DomainSpec::complex_ellipsoid(std::vector<double> exponents,
                                         std::vector<double> radii) {
  check_dim(exponents.size(), "complex_ellipsoid");
  require(exponents.size() == radii.size(),
          "complex_ellipsoid: exponents and radii must have equal length");
  check_positive(exponents, "complex_ellipsoid exponents");
  check_positive(radii, "complex_ellipsoid radii");
  DomainSpec d;
  d.kind_ = DomainKind::complex_ellipsoid;
  d.dim_ = static_cast<int>(radii.size());
  d.reals_ = std::move(radii);
  d.exponents_ = std::move(exponents);
  const bool convex = std::all_of(d.exponents_.begin(), d.exponents_.end(),
                                  [](double p) { return p >= 0.5; });
  d.flags_ = {true, convex, convex, true, true};
  return d;
}

DomainSpec DomainSpec::pball(double p, std::vector<double> radii) {
  require(std::isfinite(p) && p >= 1.0,
          "p must be >= 1; use complex_ellipsoid for non-convex powers");
  check_dim(radii.size(), "pball");
  check_positive(radii, "pball radii");
  DomainSpec d;
  d.kind_ = DomainKind::pball;
  d.dim_ = static_cast<int>(radii.size());
  d.reals_ = std::move(radii);
  d.p_ = p;
  d.flags_ = {true, true, true, true, true};
  return d;
}

DomainSpec DomainSpec::diamond(std::vector<double> weights) {
  check_dim(weights.size(), "diamond");
  check_positive(weights, "diamond weights");
  DomainSpec d;
  d.kind_ = DomainKind::diamond;
  d.dim_ = static_cast<int>(weights.size());
  d.reals_ = std::move(weights);
  d.flags_ = {true, true, true, true, true};
  return d;
}

DomainSpec DomainSpec::intersection(std::vector<DomainSpec> members) {
  require(!members.empty(), "intersection: needs at least one member");
  const int n = members.front().dim();
  DomainSpec d;
  d.kind_ = DomainKind::intersection;
  d.dim_ = n;
  d.flags_ = {true, true, true, true, true};
  for (auto& m : members) {
    require(m.dim() == n, "intersection: members must share the dimension");
    require(m.flags().balanced, "intersection: members must be balanced");
    d.flags_.convex &= m.flags().convex;
    d.flags_.reinhardt &= m.flags().reinhardt;
    d.flags_.pseudoconvex &= m.flags().pseudoconvex;
    d.members_.push_back(std::make_shared<const DomainSpec>(std::move(m)));
  }
  // Lineal convexity is not stable under intersection in general; keep
  // the flag only when plain convexity already guarantees it.
  d.flags_.c_convex = d.flags_.convex;
  return d;
}

DomainSpec DomainSpec::product(std::vector<DomainSpec> members) {
  require(members.size() >= 2, "product: needs at least two members");
  DomainSpec d;
  d.kind_ = DomainKind::product;
  d.dim_ = 0;
  d.flags_ = {true, true, true, true, true};
  for (auto& m : members) {
    d.dim_ += m.dim();
    d.flags_.balanced &= m.flags().balanced;
    d.flags_.convex &= m.flags().convex;
    d.flags_.reinhardt &= m.flags().reinhardt;
    d.flags_.pseudoconvex &= m.flags().pseudoconvex;
    d.members_.push_back(std::make_shared<const DomainSpec>(std::move(m)));
  }
  check_dim(static_cast<std::size_t>(d.dim_), "product");
  d.flags_.c_convex = d.flags_.convex;
  return d;
}

DomainSpec transformed(const DomainSpec& spec, const CMat& unitary,
                       Complex scale, const CVec& translation) {
  const int n = spec.dim();
  require(unitary.rows() == n && unitary.cols() == n,
          "transform: unitary has wrong shape");
  const double defect =
      (unitary.adjoint() * unitary - CMat::Identity(n, n)).cwiseAbs().maxCoeff();
  require(defect <= kUnitaryTol, "transform: matrix is not unitary");
  require(std::abs(scale) > 0.0, "transform: scale must be nonzero");
  require(translation.size() == n, "transform: translation has wrong shape");

  DomainSpec d;
  d.kind_ = DomainKind::transformed;
  d.dim_ = n;
  d.members_.push_back(std::make_shared<const DomainSpec>(spec));
  d.unitary_ = unitary;
  d.scale_ = scale;
  d.translation_ = translation;
  const bool centered = translation.isZero(0.0);
  d.flags_ = spec.flags();
  d.flags_.balanced = spec.flags().balanced && centered;
  d.flags_.reinhardt =
      spec.flags().reinhardt && centered && is_generalized_permutation(unitary);
  return d;
}

std::vector<double> DomainSpec::bounding_radii() const {
  switch (kind_) {
    case DomainKind::polydisc:
    case DomainKind::pball:
    case DomainKind::complex_ellipsoid:
      return reals_;
    case DomainKind::ball:
      return std::vector<double>(dim_, reals_[0]);
    case DomainKind::diamond: {
      std::vector<double> r(dim_);
      for (int j = 0; j < dim_; ++j) r[j] = 1.0 / reals_[j];
      return r;
    }
    case DomainKind::intersection: {
      std::vector<double> r = members_.front()->bounding_radii();
      for (std::size_t m = 1; m < members_.size(); ++m) {
        auto rm = members_[m]->bounding_radii();
        for (int j = 0; j < dim_; ++j) r[j] = std::min(r[j], rm[j]);
      }
      return r;
    }
    case DomainKind::product: {
      std::vector<double> r;
      for (const auto& m : members_) {
        auto rm = m->bounding_radii();
        r.insert(r.end(), rm.begin(), rm.end());
      }
      return r;
    }
    case DomainKind::transformed: {
      const auto ri = inner().bounding_radii();
      std::vector<double> r(dim_);
      for (int j = 0; j < dim_; ++j) {
        double s = 0.0;
        for (int k = 0; k < dim_; ++k) s += std::abs(unitary_(j, k)) * ri[k];
        r[j] = std::abs(scale_) * s + std::abs(translation_[j]);
      }
      return r;
    }
  }
  throw std::logic_error("unreachable");
}

bool contains(const DomainSpec& spec, const CVec& z) {
  require(z.size() == spec.dim(), "contains: point has wrong dimension");
  switch (spec.kind()) {
    case DomainKind::polydisc: {
      for (int j = 0; j < spec.dim(); ++j)
        if (std::abs(z[j]) >= spec.radii()[j]) return false;
      return true;
    }
    case DomainKind::ball:
      return z.norm() < spec.radii()[0];
    case DomainKind::complex_ellipsoid: {
      double s = 0.0;
      for (int j = 0; j < spec.dim(); ++j)
        s += std::pow(std::abs(z[j]) / spec.radii()[j],
                      2.0 * spec.exponents()[j]);
      return s < 1.0;
    }
    case DomainKind::pball: {
      double s = 0.0;
      for (int j = 0; j < spec.dim(); ++j)
        s += std::pow(std::abs(z[j]) / spec.radii()[j], spec.p());
      return s < 1.0;
    }
    case DomainKind::diamond: {
      double s = 0.0;
      for (int j = 0; j < spec.dim(); ++j)
        s += spec.weights()[j] * std::abs(z[j]);
      return s < 1.0;
    }
    case DomainKind::intersection: {
      for (const auto& m : spec.members())
        if (!contains(*m, z)) return false;
      return true;
    }
    case DomainKind::product: {
      int off = 0;
      for (const auto& m : spec.members()) {
        if (!contains(*m, z.segment(off, m->dim()))) return false;
        off += m->dim();
      }
      return true;
    }
    case DomainKind::transformed: {
      const CVec w = spec.unitary().adjoint() * (z - spec.translation()) /
                     spec.scale();
      return contains(spec.inner(), w);
    }
  }
  throw std::logic_error("unreachable");
}

namespace {

// Gauge of a complex ellipsoid: the unique t > 0 with
// sum ((|X_j|/rho_j)/t)^(2 p_j) = 1.  Closed form when the exponents
// agree, monotone bisection otherwise.
double ellipsoid_gauge(const std::vector<double>& exponents,
                       const std::vector<double>& radii, const CVec& X) {
  const int n = static_cast<int>(radii.size());
  std::vector<double> c(n), q(n);
  double cmax = 0.0;
  for (int j = 0; j < n; ++j) {
    c[j] = std::abs(X[j]) / radii[j];
    q[j] = 2.0 * exponents[j];
    cmax = std::max(cmax, c[j]);
  }
  if (cmax == 0.0) return 0.0;
  const bool equal = std::all_of(q.begin(), q.end(),
                                 [&](double v) { return v == q[0]; });
  if (equal) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += std::pow(c[j] / cmax, q[0]);
    return cmax * std::pow(s, 1.0 / q[0]);
  }
  const double qmin = *std::min_element(q.begin(), q.end());
  double lo = cmax;
  double hi = cmax * std::pow(static_cast<double>(n), 1.0 / qmin) + 1e-300;
  for (int it = 0; it < 200 && (hi - lo) > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += std::pow(c[j] / mid, q[j]);
    (s >= 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double minkowski(const DomainSpec& spec, const CVec& X) {
  require(spec.flags().balanced, "minkowski: domain is not balanced");
  require(X.size() == spec.dim(), "minkowski: vector has wrong dimension");
  switch (spec.kind()) {
    case DomainKind::polydisc: {
      double h = 0.0;
      for (int j = 0; j < spec.dim(); ++j)
        h = std::max(h, std::abs(X[j]) / spec.radii()[j]);
      return h;
    }
    case DomainKind::ball:
      return X.norm() / spec.radii()[0];
    case DomainKind::complex_ellipsoid:
      return ellipsoid_gauge(spec.exponents(), spec.radii(), X);
    case DomainKind::pball: {
      double s = 0.0;
      for (int j = 0; j < spec.dim(); ++j)
        s += std::pow(std::abs(X[j]) / spec.radii()[j], spec.p());
      return std::pow(s, 1.0 / spec.p());
    }
    case DomainKind::diamond: {
      double s = 0.0;
      for (int j = 0; j < spec.dim(); ++j)
        s += spec.weights()[j] * std::abs(X[j]);
      return s;
    }
    case DomainKind::intersection: {
      double h = 0.0;
      for (const auto& m : spec.members())
        h = std::max(h, minkowski(*m, X));
      return h;
    }
    case DomainKind::product: {
      double h = 0.0;
      int off = 0;
      for (const auto& m : spec.members()) {
        h = std::max(h, minkowski(*m, X.segment(off, m->dim())));
        off += m->dim();
      }
      return h;
    }
    case DomainKind::transformed:
      // Balanced requires translation zero; unimodular factors of the
      // scale leave a balanced domain invariant.
      return minkowski(spec.inner(), spec.unitary().adjoint() * X) /
             std::abs(spec.scale());
  }
  throw std::logic_error("unreachable");
}

namespace {

// Exit radius along the single ray a + r*Y, r > 0.  r_out must be
// outside; marching locates the first crossing for domains whose ray
// slices can be disconnected.
double ray_exit(const DomainSpec& spec, const CVec& a, const CVec& Y,
                double r_out, bool interval_slice) {
  double lo = 0.0;
  double hi = r_out;
  if (!interval_slice) {
    constexpr int kMarch = 256;
    double prev = 0.0;
    for (int k = 1; k <= kMarch; ++k) {
      const double r = r_out * static_cast<double>(k) / kMarch;
      if (!contains(spec, a + r * Y)) {
        lo = prev;
        hi = r;
        break;
      }
      prev = r;
    }
  }
  for (int it = 0; it < 200 && (hi - lo) > 1e-10; ++it) {
    const double mid = 0.5 * (lo + hi);
    (contains(spec, a + mid * Y) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Worst-phase exit radius: sample 64 ray phases, refine the best three
// local candidates by golden section.
double phase_min_distance(const DomainSpec& spec, const CVec& a,
                          const CVec& X) {
  const auto R = spec.bounding_radii();
  double r_out = std::numeric_limits<double>::infinity();
  for (int j = 0; j < spec.dim(); ++j) {
    const double xj = std::abs(X[j]);
    if (xj > 0.0) r_out = std::min(r_out, (R[j] + std::abs(a[j])) / xj);
  }
  const bool interval = spec.flags().convex;
  auto exit_at = [&](double theta) {
    const CVec Y = std::polar(1.0, theta) * X;
    return ray_exit(spec, a, Y, r_out, interval);
  };

  constexpr int kPhases = 64;
  std::array<double, kPhases> val{};
  for (int i = 0; i < kPhases; ++i)
    val[i] = exit_at(2.0 * std::numbers::pi * i / kPhases);
  std::array<int, kPhases> idx{};
  for (int i = 0; i < kPhases; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](int p, int q) { return val[p] < val[q]; });

  double best = val[idx[0]];
  const double window = 2.0 * std::numbers::pi / kPhases;
  for (int t = 0; t < 3; ++t) {
    const double center = 2.0 * std::numbers::pi * idx[t] / kPhases;
    long budget = 256;
    const double theta = line_max(
        [&](double th) { return -exit_at(th); }, center, window, 1e-9, budget);
    best = std::min(best, exit_at(theta));
  }
  return best;
}

double bd(const DomainSpec& spec, const CVec& a, const CVec& X) {
  switch (spec.kind()) {
    case DomainKind::transformed: {
      const CVec a0 = spec.unitary().adjoint() * (a - spec.translation()) /
                      spec.scale();
      return std::abs(spec.scale()) *
             bd(spec.inner(), a0, spec.unitary().adjoint() * X);
    }
    case DomainKind::product: {
      double d = std::numeric_limits<double>::infinity();
      int off = 0;
      for (const auto& m : spec.members()) {
        const CVec Xm = X.segment(off, m->dim());
        if (Xm.norm() > 0.0)
          d = std::min(d, bd(*m, a.segment(off, m->dim()), Xm));
        off += m->dim();
      }
      return d;
    }
    case DomainKind::intersection: {
      double d = std::numeric_limits<double>::infinity();
      for (const auto& m : spec.members()) d = std::min(d, bd(*m, a, X));
      return d;
    }
    default:
      break;
  }
  if (spec.flags().balanced && a.isZero(0.0)) return 1.0 / minkowski(spec, X);
  switch (spec.kind()) {
    case DomainKind::polydisc: {
      double d = std::numeric_limits<double>::infinity();
      for (int j = 0; j < spec.dim(); ++j) {
        const double xj = std::abs(X[j]);
        if (xj > 0.0)
          d = std::min(d, (spec.radii()[j] - std::abs(a[j])) / xj);
      }
      return d;
    }
    case DomainKind::ball: {
      const double rho = spec.radii()[0];
      const double q = std::abs(Complex(X.dot(a)));  // |<X, a>| hermitian
      const double nx2 = X.squaredNorm();
      const double room = rho * rho - a.squaredNorm();
      return (-q + std::sqrt(q * q + nx2 * room)) / nx2;
    }
    default:
      return phase_min_distance(spec, a, X);
  }
}

}  // namespace

double boundary_distance(const DomainSpec& spec, const CVec& a,
                         const CVec& X) {
  require(a.size() == spec.dim() && X.size() == spec.dim(),
          "boundary_distance: dimension mismatch");
  require(X.norm() > 0.0, "boundary_distance: direction must be nonzero");
  require(contains(spec, a), "boundary_distance: base point outside domain");
  return bd(spec, a, X);
}

// ---------------------------------------------------------------------------
// JSON configuration parsing

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path + ": " + msg);
}

double number_at(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

std::vector<double> number_array(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(number_at(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

Complex complex_at(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    fail(path, "expected a [re, im] pair");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

DomainSpec parse_spec(const json& j, const std::string& path);

DomainSpec parse_base_spec(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  if (!j.contains("kind") || !j["kind"].is_string())
    fail(path + ".kind", "expected a string");
  const std::string kind = j["kind"].get<std::string>();
  try {
    if (kind == "polydisc")
      return DomainSpec::polydisc(
          number_array(j.at("radii"), path + ".radii"));
    if (kind == "ball") {
      if (!j.contains("dimension") || !j["dimension"].is_number_integer())
        fail(path + ".dimension", "expected an integer");
      return DomainSpec::ball(j["dimension"].get<int>(),
                              number_at(j.at("radius"), path + ".radius"));
    }
    if (kind == "complex_ellipsoid")
      return DomainSpec::complex_ellipsoid(
          number_array(j.at("exponents"), path + ".exponents"),
          number_array(j.at("radii"), path + ".radii"));
    if (kind == "pball")
      return DomainSpec::pball(number_at(j.at("p"), path + ".p"),
                               number_array(j.at("radii"), path + ".radii"));
    if (kind == "diamond")
      return DomainSpec::diamond(
          number_array(j.at("weights"), path + ".weights"));
    if (kind == "intersection" || kind == "product") {
      if (!j.contains("members") || !j["members"].is_array())
        fail(path + ".members", "expected an array of domain objects");
      std::vector<DomainSpec> members;
      for (std::size_t i = 0; i < j["members"].size(); ++i)
        members.push_back(parse_spec(
            j["members"][i], path + ".members[" + std::to_string(i) + "]"));
      return kind == "intersection"
                 ? DomainSpec::intersection(std::move(members))
                 : DomainSpec::product(std::move(members));
    }
  } catch (const json::out_of_range&) {
    fail(path, "missing a required field for kind '" + kind + "'");
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
  fail(path + ".kind", "unknown kind '" + kind + "'");
}

DomainSpec parse_spec(const json& j, const std::string& path) {
  DomainSpec spec = parse_base_spec(j, path);
  if (!j.contains("transform")) return spec;
  const json& t = j["transform"];
  const std::string tp = path + ".transform";
  if (!t.is_object()) fail(tp, "expected an object");
  const int n = spec.dim();
  CMat U = CMat::Identity(n, n);
  if (t.contains("unitary")) {
    const json& u = t["unitary"];
    if (!u.is_array() || static_cast<int>(u.size()) != n)
      fail(tp + ".unitary", "expected " + std::to_string(n) + " rows");
    for (int i = 0; i < n; ++i) {
      if (!u[i].is_array() || static_cast<int>(u[i].size()) != n)
        fail(tp + ".unitary[" + std::to_string(i) + "]",
             "expected " + std::to_string(n) + " entries");
      for (int k = 0; k < n; ++k)
        U(i, k) = complex_at(u[i][k], tp + ".unitary[" + std::to_string(i) +
                                          "][" + std::to_string(k) + "]");
    }
  }
  Complex lambda(1.0, 0.0);
  if (t.contains("scale")) lambda = complex_at(t["scale"], tp + ".scale");
  CVec tr = CVec::Zero(n);
  if (t.contains("translation")) {
    const json& v = t["translation"];
    if (!v.is_array() || static_cast<int>(v.size()) != n)
      fail(tp + ".translation", "expected " + std::to_string(n) + " entries");
    for (int i = 0; i < n; ++i)
      tr[i] = complex_at(v[i], tp + ".translation[" + std::to_string(i) + "]");
  }
  try {
    return transformed(spec, U, lambda, tr);
  } catch (const std::invalid_argument& e) {
    fail(tp, e.what());
  }
}

CVec parse_point(const json& j, int dim, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array");
  CVec z(dim);
  if (j[0].is_number()) {
    // Shorthand: flat array of real coordinates.
    if (static_cast<int>(j.size()) != dim)
      fail(path, "point has " + std::to_string(j.size()) +
                     " coordinates, domain has " + std::to_string(dim));
    for (int k = 0; k < dim; ++k)
      z[k] = Complex(number_at(j[k], path + "[" + std::to_string(k) + "]"), 0);
    return z;
  }
  if (static_cast<int>(j.size()) != dim)
    fail(path, "point has " + std::to_string(j.size()) +
                   " coordinates, domain has " + std::to_string(dim));
  for (int k = 0; k < dim; ++k)
    z[k] = complex_at(j[k], path + "[" + std::to_string(k) + "]");
  return z;
}

}  // namespace

std::vector<ZooEntry> parse_domain_spec(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!root.is_array()) throw ConfigError("config: expected a top-level array");
  std::vector<ZooEntry> entries;
  std::set<std::string> names;
  for (std::size_t i = 0; i < root.size(); ++i) {
    const std::string path = "domains[" + std::to_string(i) + "]";
    const json& j = root[i];
    if (!j.is_object()) fail(path, "expected an object");
    if (!j.contains("name") || !j["name"].is_string() ||
        j["name"].get<std::string>().empty())
      fail(path + ".name", "expected a non-empty string");
    const std::string name = j["name"].get<std::string>();
    if (!names.insert(name).second)
      fail(path + ".name", "duplicate name '" + name + "'");
    ZooEntry entry{name, parse_spec(j, path), {}};
    if (j.contains("points")) {
      const json& pts = j["points"];
      if (!pts.is_array()) fail(path + ".points", "expected an array");
      for (std::size_t k = 0; k < pts.size(); ++k) {
        const std::string pp = path + ".points[" + std::to_string(k) + "]";
        CVec z = parse_point(pts[k], entry.spec.dim(), pp);
        if (!contains(entry.spec, z))
          fail(pp, "point lies outside the domain");
        entry.points.push_back(std::move(z));
      }
    }
    if (entry.points.empty()) entry.points.push_back(CVec::Zero(entry.spec.dim()));
    entries.push_back(std::move(entry));
  }
  return entries;
}

}  // namespace caralab
