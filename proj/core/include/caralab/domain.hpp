#pragma once

#include <memory>
#include <string>
#include <vector>

#include "caralab/types.hpp"

namespace caralab {

// Bounded domains in C^n (n <= 3) given by explicit defining data.
// All domains are open; membership is strict inequality throughout.
enum class DomainKind {
  polydisc,           // |z_j| < rho_j
  ball,               // ||z||_2 < rho
  complex_ellipsoid,  // sum (|z_j|/rho_j)^(2 p_j) < 1
  pball,              // sum (|z_j|/rho_j)^p < 1, p >= 1
  diamond,            // sum w_j |z_j| < 1
  intersection,       // all members (balanced, equal dimension)
  product,            // cartesian product of members
  transformed,        // t + lambda * U * (inner domain)
};

struct DomainFlags {
  bool balanced = false;
  bool convex = false;
  bool c_convex = false;  // invariant under complex lines; conservative
  bool reinhardt = false;
  bool pseudoconvex = false;
};

class DomainSpec {
 public:
  static DomainSpec polydisc(std::vector<double> radii);
  static DomainSpec ball(int dim, double radius);
  static DomainSpec complex_ellipsoid(std::vector<double> exponents,
                                      std::vector<double> radii);
  static DomainSpec pball(double p, std::vector<double> radii);
  static DomainSpec diamond(std::vector<double> weights);
  static DomainSpec intersection(std::vector<DomainSpec> members);
  static DomainSpec product(std::vector<DomainSpec> members);

  DomainKind kind() const { return kind_; }
  int dim() const { return dim_; }
  const DomainFlags& flags() const { return flags_; }

  // Kind-specific accessors; meaningful only for the matching kind.
  const std::vector<double>& radii() const { return reals_; }
  const std::vector<double>& weights() const { return reals_; }
  const std::vector<double>& exponents() const { return exponents_; }
  double p() const { return p_; }
  const std::vector<std::shared_ptr<const DomainSpec>>& members() const {
    return members_;
  }
  const DomainSpec& inner() const { return *members_.front(); }
  const CMat& unitary() const { return unitary_; }
  Complex scale() const { return scale_; }
  const CVec& translation() const { return translation_; }

  // Per-coordinate sup of |z_j| over the domain (possibly loose for
  // transformed domains).  Defines the Monte Carlo sampling box.
  std::vector<double> bounding_radii() const;

  friend DomainSpec transformed(const DomainSpec&, const CMat&, Complex,
                                const CVec&);

 private:
  DomainSpec() = default;

  DomainKind kind_ = DomainKind::polydisc;
  int dim_ = 0;
  DomainFlags flags_;
  std::vector<double> reals_;      // radii or weights
  std::vector<double> exponents_;  // complex_ellipsoid only
  double p_ = 0.0;                 // pball only
  std::vector<std::shared_ptr<const DomainSpec>> members_;
  CMat unitary_;
  Complex scale_{1.0, 0.0};
  CVec translation_;
};

// Affine image t + lambda*U*D of a domain.  U must be unitary (checked
// to 1e-12) and lambda nonzero.  Flags: convexity, lineal convexity and
// pseudoconvexity survive; balancedness survives only for t = 0; the
// Reinhardt property additionally requires U to be a generalized
// permutation matrix.
DomainSpec transformed(const DomainSpec& spec, const CMat& unitary,
                       Complex scale, const CVec& translation);

// Strict membership test.
bool contains(const DomainSpec& spec, const CVec& z);

// Minkowski gauge h(X) = inf { t > 0 : X/t in D } for balanced domains.
// Positive homogeneous of degree one; h(X) < 1 iff X in D.
double minkowski(const DomainSpec& spec, const CVec& X);

// Largest r such that a + lambda*X stays inside for all |lambda| < r.
// Closed forms for polydiscs and balls at any point and for balanced
// domains at the origin; otherwise the exit radius is minimized over
// sampled ray phases with golden-section refinement (accuracy ~1e-6).
double boundary_distance(const DomainSpec& spec, const CVec& a,
                         const CVec& X);

struct ZooEntry {
  std::string name;
  DomainSpec spec;
  std::vector<CVec> points;
};

// Parse a JSON array of domain descriptions (see README for the
// schema).  Validates parameters, dimensions, transforms, point
// membership and name uniqueness; throws ConfigError with the JSON
// path of the offending field.
std::vector<ZooEntry> parse_domain_spec(const std::string& json_text);

}  // namespace caralab
