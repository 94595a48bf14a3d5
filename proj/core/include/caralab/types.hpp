#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace caralab {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

// Thrown when a quantity has no evaluation backend for the given
// domain/point combination.  Callers that can degrade gracefully (the
// suite harness) catch this and mark the affected checks as skipped;
// a wrong number is never returned instead.
class NoBackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown for malformed configuration input (JSON schema violations,
// out-of-range parameters, points outside their domain).  The CLI maps
// this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kUnitaryTol = 1e-12;

// Largest supported complex dimension.  Everything here is desk-scale
// by design; the closed forms and search budgets assume small n.
inline constexpr int kMaxDim = 3;

}  // namespace caralab
