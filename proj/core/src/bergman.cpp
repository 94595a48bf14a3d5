#include "caralab/bergman.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace caralab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kCondLimit = 1e12;

double closed_value(const DomainSpec& spec, const CVec& z) {
  const int n = spec.dim();
  switch (spec.kind()) {
    case DomainKind::polydisc: {
      double k = 1.0;
      for (int j = 0; j < n; ++j) {
        const double rho = spec.radii()[static_cast<size_t>(j)];
        const double gap = rho * rho - std::norm(z[j]);
        k *= rho * rho / (std::numbers::pi * gap * gap);
      }
      return k;
    }
    case DomainKind::ball: {
      const double rho = spec.radii()[0];
      const double gap = rho * rho - z.squaredNorm();
      double fact = 1.0;
      for (int j = 2; j <= n; ++j) fact *= j;
      return fact * rho * rho /
             (std::pow(std::numbers::pi, n) * std::pow(gap, n + 1));
    }
    case DomainKind::product: {
      double k = 1.0;
      int off = 0;
      for (const auto& mem : spec.members()) {
        k *= closed_value(*mem, z.segment(off, mem->dim()));
        off += mem->dim();
      }
      return k;
    }
    case DomainKind::transformed: {
      const CVec w = spec.unitary().adjoint() * (z - spec.translation()) /
                     spec.scale();
      return closed_value(spec.inner(), w) /
             std::pow(std::abs(spec.scale()), 2 * n);
    }
    default:
      throw NoBackendError("bergman kernel: no closed form for this kind");
  }
}

// All multi-indices with |alpha| <= degree, ordered by total degree so
// a degree cut is a leading block of the Gram matrix.
std::vector<std::vector<int>> monomials_up_to(int n, int degree) {
  std::vector<std::vector<int>> out;
  for (int total = 0; total <= degree; ++total) {
    std::vector<int> alpha(static_cast<size_t>(n), 0);
    // Odometer over compositions of `total` into n parts.
    std::function<void(int, int)> rec = [&](int pos, int left) {
      if (pos == n - 1) {
        alpha[static_cast<size_t>(pos)] = left;
        out.push_back(alpha);
        return;
      }
      for (int v = left; v >= 0; --v) {
        alpha[static_cast<size_t>(pos)] = v;
        rec(pos + 1, left - v);
      }
    };
    rec(0, total);
  }
  return out;
}

Complex monomial_value(const CVec& z, const std::vector<int>& alpha) {
  Complex v(1.0, 0.0);
  for (int j = 0; j < static_cast<int>(alpha.size()); ++j)
    for (int k = 0; k < alpha[static_cast<size_t>(j)]; ++k) v *= z[j];
  return v;
}

// Moment of prod |z_j|^{2 alpha_j} over sum_j (|z_j|/rho_j)^{2 p_j} < 1.
double dirichlet_moment(const std::vector<double>& exponents,
                        const std::vector<double>& radii,
                        const std::vector<int>& alpha) {
  const int n = static_cast<int>(radii.size());
  double value = std::pow(std::numbers::pi, n);
  double msum = 0.0;
  for (int j = 0; j < n; ++j) {
    const double p = exponents[static_cast<size_t>(j)];
    const double rho = radii[static_cast<size_t>(j)];
    const double m = (alpha[static_cast<size_t>(j)] + 1.0) / p;
    value *= std::pow(rho, 2.0 * alpha[static_cast<size_t>(j)] + 2.0) *
             std::tgamma(m) / p;
    msum += m;
  }
  return value / std::tgamma(1.0 + msum);
}

CVec box_sample(const Stream& stream, const std::vector<double>& box,
                std::uint64_t base) {
  const int n = static_cast<int>(box.size());
  CVec z(n);
  for (int j = 0; j < n; ++j) {
    const double u1 = stream.uniform(base + 2 * static_cast<unsigned>(j));
    const double u2 = stream.uniform(base + 2 * static_cast<unsigned>(j) + 1);
    z[j] = std::polar(box[static_cast<size_t>(j)] * std::sqrt(u1),
                      kTwoPi * u2);
  }
  return z;
}

struct GramData {
  CMat full;            // combined Gram over all samples
  std::vector<CMat> batches;
};

// Monte Carlo Gram of the monomial family over the domain, using the
// bounding box sampler.  diagonal_only skips the off-diagonal entries
// (valid for Reinhardt domains, where they vanish).
GramData mc_gram(const DomainSpec& spec,
                 const std::vector<std::vector<int>>& basis, long long N,
                 const Stream& stream, bool diagonal_only) {
  const int m = static_cast<int>(basis.size());
  const std::vector<double> box = spec.bounding_radii();
  double box_volume = 1.0;
  for (double r : box) box_volume *= std::numbers::pi * r * r;

  constexpr int kBatches = 8;
  GramData g;
  g.batches.assign(kBatches, CMat::Zero(m, m));
  CVec v(m);
  for (long long i = 0; i < N; ++i) {
    const CVec z = box_sample(stream, box, 8ull * static_cast<std::uint64_t>(i));
    if (!contains(spec, z)) continue;
    const int b = static_cast<int>(i * kBatches / N);
    for (int r = 0; r < m; ++r) v[r] = monomial_value(z, basis[static_cast<size_t>(r)]);
    if (diagonal_only) {
      for (int r = 0; r < m; ++r)
        g.batches[static_cast<size_t>(b)](r, r) += std::norm(v[r]);
    } else {
      g.batches[static_cast<size_t>(b)].selfadjointView<Eigen::Lower>()
          .rankUpdate(v, 1.0);
    }
  }
  g.full = CMat::Zero(m, m);
  for (int b = 0; b < kBatches; ++b) {
    const long long lo = N * b / kBatches;
    const long long hi = N * (b + 1) / kBatches;
    g.full += g.batches[static_cast<size_t>(b)];
    g.batches[static_cast<size_t>(b)] *=
        box_volume / static_cast<double>(hi - lo);
  }
  g.full *= box_volume / static_cast<double>(N);
  if (!diagonal_only) {
    g.full = g.full.selfadjointView<Eigen::Lower>();
    for (CMat& b : g.batches) b = b.selfadjointView<Eigen::Lower>();
  }
  return g;
}

// Largest leading block (ordered by degree) whose condition number is
// acceptable; returns the number of monomials kept and the degree.
std::pair<int, int> usable_block(const CMat& gram,
                                 const std::vector<std::vector<int>>& basis) {
  const int m = static_cast<int>(gram.rows());
  auto degree_of = [&](int idx) {
    int d = 0;
    for (int a : basis[static_cast<size_t>(idx)]) d += a;
    return d;
  };
  int keep = m;
  while (keep > 1) {
    const CMat block = gram.topLeftCorner(keep, keep);
    Eigen::SelfAdjointEigenSolver<CMat> es(block);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (lo > 0.0 && hi / lo <= kCondLimit) break;
    // Drop the whole top degree, keeping the block degree-complete.
    const int top = degree_of(keep - 1);
    while (keep > 1 && degree_of(keep - 1) == top) --keep;
  }
  return {keep, degree_of(keep - 1)};
}

double solve_estimate(const CMat& gram, const CVec& v) {
  const Eigen::LDLT<CMat> ldlt(gram);
  if (ldlt.info() != Eigen::Success) return -1.0;
  const CVec w = ldlt.solve(v);
  return v.dot(w).real();
}

}  // namespace

KernelEstimate kernel_balanced_center(const DomainSpec& spec,
                                      const VolumeEstimate& vol) {
  if (!spec.flags().balanced)
    throw std::invalid_argument(
        "bergman kernel: balanced identity needs a balanced domain");
  if (vol.which != VolumeWhich::domain_volume || !(vol.value > 0.0))
    throw std::invalid_argument(
        "bergman kernel: balanced identity needs a domain volume estimate");
  KernelEstimate k;
  k.exact = 1.0 / vol.value;
  k.lower = *k.exact;
  k.std_error = *k.exact * (vol.std_error / vol.value);
  k.basis_size = 1;
  k.method = KernelMethod::balanced_identity;
  return k;
}

KernelEstimate kernel_closed(const DomainSpec& spec, const CVec& z) {
  if (z.size() != spec.dim())
    throw std::invalid_argument("bergman kernel: dimension mismatch");
  if (!contains(spec, z))
    throw std::invalid_argument(
        "bergman kernel: point must lie inside the domain");
  KernelEstimate k;
  k.exact = closed_value(spec, z);
  k.lower = *k.exact;
  k.basis_size = 0;
  k.method = KernelMethod::closed_form;
  return k;
}

double monomial_moment_closed(const DomainSpec& spec,
                              const std::vector<int>& alpha) {
  const int n = spec.dim();
  if (static_cast<int>(alpha.size()) != n)
    throw std::invalid_argument("monomial moment: index dimension mismatch");
  switch (spec.kind()) {
    case DomainKind::polydisc: {
      double m = 1.0;
      for (int j = 0; j < n; ++j) {
        const double rho = spec.radii()[static_cast<size_t>(j)];
        m *= std::numbers::pi *
             std::pow(rho, 2.0 * alpha[static_cast<size_t>(j)] + 2.0) /
             (alpha[static_cast<size_t>(j)] + 1.0);
      }
      return m;
    }
    case DomainKind::ball:
      return dirichlet_moment(std::vector<double>(static_cast<size_t>(n), 1.0),
                              std::vector<double>(static_cast<size_t>(n),
                                                  spec.radii()[0]),
                              alpha);
    case DomainKind::pball:
      return dirichlet_moment(
          std::vector<double>(static_cast<size_t>(n), spec.p() / 2.0),
          spec.radii(), alpha);
    case DomainKind::diamond: {
      std::vector<double> radii(static_cast<size_t>(n));
      for (int j = 0; j < n; ++j)
        radii[static_cast<size_t>(j)] =
            1.0 / spec.weights()[static_cast<size_t>(j)];
      return dirichlet_moment(std::vector<double>(static_cast<size_t>(n), 0.5),
                              radii, alpha);
    }
    case DomainKind::complex_ellipsoid:
      return dirichlet_moment(spec.exponents(), spec.radii(), alpha);
    case DomainKind::product: {
      double m = 1.0;
      int off = 0;
      for (const auto& mem : spec.members()) {
        const std::vector<int> part(
            alpha.begin() + off, alpha.begin() + off + mem->dim());
        m *= monomial_moment_closed(*mem, part);
        off += mem->dim();
      }
      return m;
    }
    default:
      throw NoBackendError("monomial moment: no closed form for this kind");
  }
}

KernelEstimate kernel_gram_lower(const DomainSpec& spec, const CVec& z,
                                 int degree, long long N,
                                 const Stream& stream) {
  if (degree < 0 || degree > 8)
    throw std::invalid_argument("bergman kernel: degree must be 0..8");
  if (z.size() != spec.dim())
    throw std::invalid_argument("bergman kernel: dimension mismatch");
  if (!contains(spec, z))
    throw std::invalid_argument(
        "bergman kernel: point must lie inside the domain");

  const int n = spec.dim();
  const std::vector<std::vector<int>> basis = monomials_up_to(n, degree);
  const int m = static_cast<int>(basis.size());
  const bool reinhardt = spec.flags().reinhardt;

  CMat gram;
  std::vector<CMat> batch_grams;
  bool have_batches = false;
  if (reinhardt) {
    bool closed = true;
    CMat diag = CMat::Zero(m, m);
    try {
      for (int r = 0; r < m; ++r)
        diag(r, r) = monomial_moment_closed(spec, basis[static_cast<size_t>(r)]);
    } catch (const NoBackendError&) {
      closed = false;
    }
    if (closed) {
      gram = diag;
    } else {
      GramData g = mc_gram(spec, basis, N, stream, true);
      gram = g.full;
      batch_grams = std::move(g.batches);
      have_batches = true;
    }
  } else {
    GramData g = mc_gram(spec, basis, N, stream, false);
    gram = g.full;
    batch_grams = std::move(g.batches);
    have_batches = true;
  }

  const auto [keep, degree_used] = usable_block(gram, basis);
  CVec v(keep);
  for (int r = 0; r < keep; ++r)
    v[r] = monomial_value(z, basis[static_cast<size_t>(r)]);

  const double estimate = solve_estimate(gram.topLeftCorner(keep, keep), v);
  if (!(estimate > 0.0))
    throw std::runtime_error("bergman kernel: gram solve failed");

  KernelEstimate k;
  k.lower = estimate;
  k.basis_size = keep;
  k.degree_used = degree_used;
  k.method = KernelMethod::gram_lower;
  if (have_batches) {
    double mean = 0.0, sq = 0.0;
    int good = 0;
    for (const CMat& b : batch_grams) {
      const double e = solve_estimate(b.topLeftCorner(keep, keep), v);
      if (e > 0.0) {
        mean += e;
        sq += e * e;
        ++good;
      }
    }
    if (good >= 2) {
      mean /= good;
      const double var = std::max(0.0, sq / good - mean * mean);
      k.std_error = std::sqrt(var / good);
    } else {
      k.std_error = estimate;  // no usable batches: quote full width
    }
  }
  return k;
}

}  // namespace caralab
