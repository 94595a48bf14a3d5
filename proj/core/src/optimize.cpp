#include "caralab/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace caralab {

namespace {
constexpr double kGolden = 0.6180339887498949;  // 1/phi
}

double line_max(const std::function<double(double)>& f, double center,
                double half, double xtol, long& budget) {
  // Coarse scan to locate the best bracket, then golden-section.
  constexpr int kScan = 9;
  double best_x = center;
  double best_f = f(center);
  --budget;
  for (int i = 0; i < kScan && budget > 0; ++i) {
    const double x =
        center - half + (2.0 * half) * (static_cast<double>(i) + 0.5) / kScan;
    const double fx = f(x);
    --budget;
    if (fx > best_f) {
      best_f = fx;
      best_x = x;
    }
  }
  double lo = best_x - 2.0 * half / kScan;
  double hi = best_x + 2.0 * half / kScan;
  double x1 = hi - kGolden * (hi - lo);
  double x2 = lo + kGolden * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  budget -= 2;
  while (hi - lo > xtol && budget > 0) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kGolden * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kGolden * (hi - lo);
      f1 = f(x1);
    }
    --budget;
  }
  const double xm = 0.5 * (lo + hi);
  const double fm = f(xm);
  --budget;
  if (fm >= best_f) return xm;
  return best_x;
}

OptResult coordinate_ascent(const RealFn& f, std::vector<double> x,
                            double halfwidth, double xtol, long budget) {
  OptResult res;
  const long initial = budget;
  double fx = f(x);
  --budget;
  const int d = static_cast<int>(x.size());
  for (int pass = 0; pass < 60 && budget > 0; ++pass) {
    const double before = fx;
    for (int i = 0; i < d && budget > 0; ++i) {
      auto slice = [&](double t) {
        std::vector<double> y = x;
        y[i] = t;
        return f(y);
      };
      const double xi = line_max(slice, x[i], halfwidth, xtol, budget);
      std::vector<double> y = x;
      y[i] = xi;
      const double fy = f(y);
      --budget;
      if (fy > fx) {
        fx = fy;
        x = std::move(y);
      }
    }
    if (fx - before <= 1e-13 * (1.0 + std::abs(fx))) break;
  }
  res.value = fx;
  res.x = std::move(x);
  res.evals = initial - budget;
  return res;
}

OptResult multistart_max(const RealFn& f, int dim, double lo, double hi,
                         const std::vector<double>& x0, int starts,
                         long budget, SeqStream& rng) {
  OptResult best;
  bool have = false;
  const long per_start = std::max<long>(budget / std::max(starts, 1), 64);
  for (int s = 0; s < starts; ++s) {
    std::vector<double> x(dim);
    if (s == 0 && !x0.empty()) {
      x = x0;
    } else {
      for (int i = 0; i < dim; ++i) x[i] = rng.next_uniform(lo, hi);
    }
    OptResult r =
        coordinate_ascent(f, std::move(x), 0.5 * (hi - lo), 1e-9, per_start);
    if (!have || r.value > best.value) {
      best = std::move(r);
      have = true;
    }
  }
  return best;
}

int sphere_angle_count(int m) { return 2 * m - 1; }

CVec sphere_point(const std::vector<double>& angles, int m) {
  // Real hyperspherical coordinates on S^{2m-1}, folded into C^m.
  const int dr = 2 * m;
  std::vector<double> u(dr);
  double s = 1.0;
  for (int i = 0; i < dr - 1; ++i) {
    u[i] = s * std::cos(angles[i]);
    s *= std::sin(angles[i]);
  }
  u[dr - 1] = s;
  CVec w(m);
  for (int j = 0; j < m; ++j) w[j] = Complex(u[2 * j], u[2 * j + 1]);
  return w;
}

int unitary_angle_count(int n) { return n * (n - 1); }

CMat unitary_from_angles(const std::vector<double>& angles, int n) {
  CMat U = CMat::Identity(n, n);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double th = angles[k++];
      const double ph = angles[k++];
      CMat G = CMat::Identity(n, n);
      const double c = std::cos(th);
      const double s = std::sin(th);
      const Complex e = std::polar(1.0, ph);
      G(i, i) = c;
      G(i, j) = -s * e;
      G(j, i) = s * std::conj(e);
      G(j, j) = c;
      U = U * G;
    }
  }
  return U;
}

}  // namespace caralab
