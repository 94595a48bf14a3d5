#include "caralab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <locale>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "caralab/metrics.hpp"
#include "caralab/rng.hpp"

namespace caralab {

using nlohmann::json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Shrink factor applied to the empirical k_hat wherever it enters an
// inequality: k_hat is a sampled minimum, so a hair of slack keeps
// fresh directions from flipping a true statement.
constexpr double kKhatShrink = 1.0 - 1e-6;

// Relative floor for links touching Monte Carlo indicatrix volumes.
// Their sampling box is inflated by 1e-6 per axis so it strictly
// contains the indicatrix, which shows up as a systematic relative
// bias of up to (1 + 1e-6)^2 that the binomial error bar cannot see
// when the hit rate approaches one.
constexpr double kMcVolumeRel = 5e-6;

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

const char* const kCheckNames[kCheckCount] = {
    "volume_chain",        "kernel_upper_volume", "kernel_vs_azukawa",
    "frame_bound_upper",   "frame_bound_lower",   "det_lower",
    "det_upper",           "ce_det_bracket",      "diamond_closed_form",
    "ce_volume_bracket",   "kernel_volume_chain", "ce_kernel_bracket",
    "ratio_bands",
};

// ---------------------------------------------------------------------------
// Check assembly

// One quantity entering an inequality link, with its standard error.
struct Side {
  double value = 0.0;
  double sigma = 0.0;
};

// Collects the links of one check and keeps the worst.  A link
// lhs <= rhs gets the signed slack (rhs - lhs) / sigma_eff where
// sigma_eff combines both error bars with a relative floor, so closed
// form ties pass and Monte Carlo noise is judged in sigma units.
class CheckBuilder {
 public:
  explicit CheckBuilder(CheckId id) { check_.id = id; }

  void link(Side lhs, Side rhs, double rel = 1e-9) {
    const double scale =
        std::max({std::abs(lhs.value), std::abs(rhs.value), 1e-300});
    const double sigma_eff =
        std::hypot(lhs.sigma, rhs.sigma) + scale * rel / 3.0;
    double slack = (rhs.value - lhs.value) / sigma_eff;
    slack = std::clamp(slack, -1e9, 1e9);
    if (!have_link_ || slack < check_.slack_sigma) {
      check_.lhs = lhs.value;
      check_.rhs = rhs.value;
      check_.stderr_lhs = lhs.sigma;
      check_.stderr_rhs = rhs.sigma;
      check_.slack_sigma = slack;
    }
    have_link_ = true;
  }

  void equal(Side a, Side b, double rel = 1e-9) {
    link(a, b, rel);
    link(b, a, rel);
  }

  void skip(const std::string& reason) {
    skipped_ = true;
    if (check_.reason.empty()) check_.reason = reason;
  }

  InequalityCheck finish() {
    if (skipped_ || !have_link_) {
      check_.verdict = Verdict::skipped;
      if (check_.reason.empty()) check_.reason = "not evaluated";
      check_.lhs = check_.rhs = check_.stderr_lhs = check_.stderr_rhs = 0.0;
      check_.slack_sigma = 0.0;
    } else {
      check_.verdict =
          check_.slack_sigma >= -3.0 ? Verdict::pass : Verdict::fail;
    }
    return check_;
  }

 private:
  InequalityCheck check_;
  bool have_link_ = false;
  bool skipped_ = false;
};

Side vol_side(const VolumeEstimate& v) { return {v.value, v.std_error}; }

// 1/x with the first order error propagation.
Side inverse(Side s) {
  return {1.0 / s.value, s.sigma / (s.value * s.value)};
}

Side scaled(Side s, double c) { return {c * s.value, std::abs(c) * s.sigma}; }

// ---------------------------------------------------------------------------
// Diamond recognition for the closed volume cross-check

std::optional<std::vector<double>> diamond_weights_of(const DomainSpec& s) {
  switch (s.kind()) {
    case DomainKind::diamond:
      return s.weights();
    case DomainKind::pball: {
      if (s.p() != 1.0) return std::nullopt;
      std::vector<double> w;
      for (double r : s.radii()) w.push_back(1.0 / r);
      return w;
    }
    case DomainKind::complex_ellipsoid: {
      for (double p : s.exponents())
        if (p != 0.5) return std::nullopt;
      std::vector<double> w;
      for (double r : s.radii()) w.push_back(1.0 / r);
      return w;
    }
    default:
      return std::nullopt;
  }
}

int gram_degree(int n) { return n == 1 ? 8 : n == 2 ? 6 : 4; }

bool at_balanced_center(const DomainSpec& spec, const CVec& a) {
  return spec.flags().balanced && a.norm() < 1e-15;
}

// ---------------------------------------------------------------------------
// Row execution

struct WorstPair {
  Side lhs, rhs;
  bool any = false;
};

RowReport run_row(const std::string& name, const DomainSpec& spec,
                  std::size_t point_index, const CVec& a,
                  const SuiteParams& params) {
  const auto t0 = std::chrono::steady_clock::now();
  const Stream rs =
      Stream{params.seed}.derive(name).derive(
          static_cast<std::uint64_t>(point_index));
  const int n = spec.dim();

  RowReport row;
  row.name = name;
  row.point = a;
  RowQuantities& q = row.q;

  q.frame = greedy_basis(spec, a, params.budget);
  const double khs = q.frame.k_hat * kKhatShrink;

  const ExtremalMapJacobian jac = build_extremal_map(spec, a, q.frame);
  q.jacobian = jac.rows;
  q.det = jac.det;
  q.ce = ce_bounds(jac, q.frame);

  q.V = indicatrix_volume(spec, a, MetricKind::reciprocal_distance,
                          params.samples, rs.derive("vol-V"), q.frame);
  try {
    q.VA = indicatrix_volume(spec, a, MetricKind::azukawa, params.samples,
                             rs.derive("vol-VA"), q.frame);
  } catch (const NoBackendError&) {
    q.VA.reset();
  }
  q.VC = indicatrix_volume(spec, a, MetricKind::caratheodory, params.samples,
                           rs.derive("vol-VC"), q.frame);

  q.VE.value = diamond_volume_closed(q.frame.radii);
  q.VE.std_error = 0.0;
  q.VE.samples = 0;
  q.VE.method = VolumeMethod::closed_form;
  q.VE.which = VolumeWhich::VE;

  try {
    q.domain_volume_closed = zoo_volume_closed(spec);
  } catch (const std::invalid_argument&) {
    q.domain_volume_closed.reset();
  }
  const auto diamond_w = diamond_weights_of(spec);
  if (diamond_w || !q.domain_volume_closed)
    q.domain_volume_mc =
        domain_volume_mc(spec, params.samples, rs.derive("vol-domain"));

  // Exact kernel route: closed form first, then the balanced identity.
  try {
    q.kernel = kernel_closed(spec, a);
  } catch (const NoBackendError&) {
    if (at_balanced_center(spec, a)) {
      VolumeEstimate dv;
      if (q.domain_volume_closed) {
        dv.value = *q.domain_volume_closed;
        dv.std_error = 0.0;
        dv.samples = 0;
        dv.method = VolumeMethod::closed_form;
      } else {
        dv = *q.domain_volume_mc;
      }
      dv.which = VolumeWhich::domain_volume;
      q.kernel = kernel_balanced_center(spec, dv);
    }
  }
  try {
    q.kernel_gram =
        kernel_gram_lower(spec, a, gram_degree(n),
                          std::min<long long>(params.samples, 200000),
                          rs.derive("gram"));
  } catch (const std::exception&) {
    q.kernel_gram.reset();
  }

  q.hull = polydisc_hull_volumes(spec, a, params.budget);
  q.inscribed = {q.hull.inscribed_best.volume, 0.0, 0,
                 VolumeMethod::closed_form, VolumeWhich::V_inscribed};
  q.circumscribed = {q.hull.circumscribed_best.volume, 0.0, 0,
                     VolumeMethod::closed_form, VolumeWhich::V_circumscribed};

  q.min_pi = min_pi_over_frames(spec, a, params.budget);
  // The greedy frame is itself admissible; never report a minimum
  // above it.
  if (q.frame.pi < q.min_pi.min_pi) {
    q.min_pi.min_pi = q.frame.pi;
    q.min_pi.p = 1.0 / q.frame.pi;
    q.min_pi.frame = q.frame.basis;
  }

  // Fresh directions for the frame comparison, worst link on each side.
  WorstPair up, low;
  {
    SeqStream dirs(rs.derive("frame-bound"));
    const long m = std::clamp<long>(params.budget / 40, 128, 2048);
    CheckBuilder upper(CheckId::frame_bound_upper);
    CheckBuilder lower(CheckId::frame_bound_lower);
    for (long i = 0; i < m; ++i) {
      const CVec X = dirs.next_direction(n);
      const double c = metric(spec, a, X, MetricKind::caratheodory).value;
      double sum = 0.0;
      for (int j = 0; j < n; ++j)
        sum += std::abs(q.frame.basis.col(j).dot(X)) * q.frame.radii[j];
      upper.link({c, 0.0}, {sum, 0.0});
      lower.link({khs * sum, 0.0}, {c, 0.0}, 1e-6);
    }
    row.checks.resize(kCheckCount);
    row.checks[static_cast<int>(CheckId::frame_bound_upper)] = upper.finish();
    row.checks[static_cast<int>(CheckId::frame_bound_lower)] = lower.finish();
  }

  const double nfact = factorial(n);
  const double absdet = std::abs(q.det);
  const double pi_f = q.frame.pi;
  const double kh2n = std::pow(khs, 2 * n);

  {
    CheckBuilder b(CheckId::volume_chain);
    if (q.VA) {
      b.link(vol_side(q.V), vol_side(*q.VA), kMcVolumeRel);
      b.link(vol_side(*q.VA), vol_side(q.VC), kMcVolumeRel);
    } else {
      b.skip("no azukawa backend at this point");
    }
    row.checks[static_cast<int>(CheckId::volume_chain)] = b.finish();
  }
  {
    CheckBuilder b(CheckId::kernel_upper_volume);
    if (q.kernel) {
      b.link({q.kernel->lower, q.kernel->std_error}, inverse(vol_side(q.V)),
             kMcVolumeRel);
    } else if (q.kernel_gram) {
      b.link({q.kernel_gram->lower, q.kernel_gram->std_error},
             inverse(vol_side(q.V)), kMcVolumeRel);
    } else {
      b.skip("no kernel estimate");
    }
    row.checks[static_cast<int>(CheckId::kernel_upper_volume)] = b.finish();
  }
  {
    CheckBuilder b(CheckId::kernel_vs_azukawa);
    if (!spec.flags().pseudoconvex) {
      b.skip("domain not flagged pseudoconvex");
    } else if (!q.kernel) {
      b.skip("kernel lower bound only");
    } else if (!q.VA) {
      b.skip("no azukawa backend at this point");
    } else {
      const Side k{q.kernel->lower, q.kernel->std_error};
      b.link(inverse(vol_side(*q.VA)), k, kMcVolumeRel);
      if (at_balanced_center(spec, a))
        b.link(k, inverse(vol_side(*q.VA)), kMcVolumeRel);
    }
    row.checks[static_cast<int>(CheckId::kernel_vs_azukawa)] = b.finish();
  }
  {
    CheckBuilder b(CheckId::det_lower);
    b.link({std::pow(khs, n) * pi_f, 0.0}, {absdet, 0.0});
    row.checks[static_cast<int>(CheckId::det_lower)] = b.finish();
  }
  {
    CheckBuilder b(CheckId::det_upper);
    b.link({absdet, 0.0}, {nfact * pi_f, 0.0});
    row.checks[static_cast<int>(CheckId::det_upper)] = b.finish();
  }
  {
    CheckBuilder b(CheckId::ce_det_bracket);
    const double pi2 = pi_f * pi_f;
    b.link({kh2n, 0.0}, {q.ce.upper / pi2, 0.0});
    b.link({q.ce.lower / pi2, 0.0}, {nfact * nfact, 0.0});
    row.checks[static_cast<int>(CheckId::ce_det_bracket)] = b.finish();
  }
  {
    CheckBuilder b(CheckId::diamond_closed_form);
    if (diamond_w) {
      b.equal(vol_side(*q.domain_volume_mc),
              {diamond_volume_closed(*diamond_w), 0.0});
    } else {
      b.skip("domain has no diamond closed form");
    }
    row.checks[static_cast<int>(CheckId::diamond_closed_form)] = b.finish();
  }
  const double bracket_scale = std::pow(kTwoPi, n);
  {
    CheckBuilder b(CheckId::ce_volume_bracket);
    const double t = factorial(2 * n) / bracket_scale;
    b.link({kh2n, 0.0}, scaled(vol_side(q.VC), t * q.ce.upper),
           kMcVolumeRel);
    b.link(scaled(vol_side(q.VC), t * q.ce.lower),
           {nfact * nfact / kh2n, 0.0}, kMcVolumeRel);
    row.checks[static_cast<int>(CheckId::ce_volume_bracket)] = b.finish();
  }
  const double c_const =
      spec.flags().convex ? 0.5 : spec.flags().c_convex ? 0.25 : 0.0;
  {
    CheckBuilder b(CheckId::kernel_volume_chain);
    if (c_const == 0.0) {
      b.skip("domain neither convex nor lineally convex");
    } else if (!spec.flags().pseudoconvex) {
      b.skip("domain not flagged pseudoconvex");
    } else if (!q.VA) {
      b.skip("no azukawa backend at this point");
    } else if (!q.kernel) {
      b.skip("kernel lower bound only");
    } else {
      const Side k{q.kernel->lower, q.kernel->std_error};
      b.link(inverse(vol_side(q.V)),
             scaled(inverse(vol_side(*q.VA)), std::pow(c_const, -2 * n)),
             kMcVolumeRel);
      b.link(k, inverse(vol_side(q.V)), kMcVolumeRel);
      b.link(inverse(vol_side(*q.VA)), k, kMcVolumeRel);
    }
    row.checks[static_cast<int>(CheckId::kernel_volume_chain)] = b.finish();
  }
  {
    CheckBuilder b(CheckId::ce_kernel_bracket);
    if (c_const == 0.0) {
      b.skip("domain neither convex nor lineally convex");
    } else if (!spec.flags().pseudoconvex) {
      b.skip("domain not flagged pseudoconvex");
    } else if (!q.kernel) {
      b.skip("kernel lower bound only");
    } else {
      const Side k{q.kernel->lower, q.kernel->std_error};
      const double Cn =
          bracket_scale * nfact * nfact / (factorial(2 * n) * kh2n);
      const double cn = bracket_scale * kh2n / factorial(2 * n);
      b.link({q.ce.lower, 0.0}, scaled(k, Cn));
      b.link(scaled(k, std::pow(c_const, 2 * n) * cn), {q.ce.upper, 0.0});
    }
    row.checks[static_cast<int>(CheckId::ce_kernel_bracket)] = b.finish();
  }
  {
    CheckBuilder b(CheckId::ratio_bands);
    const double ve = q.VE.value;
    const double t = factorial(2 * n) / bracket_scale;
    const double fac_i =
        factorial(2 * n) / (std::pow(2.0, n) * std::pow(double(n), 2 * n));
    const double fac_e = factorial(2 * n) / (std::pow(2.0, n) * kh2n);
    b.link({ve, 0.0}, vol_side(q.VC), kMcVolumeRel);
    b.link(vol_side(q.VC), {ve / kh2n, 0.0}, kMcVolumeRel);
    b.link({ve * fac_i, 0.0}, {q.inscribed.value, 0.0});
    b.link({q.inscribed.value, 0.0}, {ve / kh2n, 0.0});
    b.link({ve, 0.0}, {q.circumscribed.value, 0.0});
    b.link({q.circumscribed.value, 0.0}, {ve * fac_e, 0.0});
    b.link({1.0 / q.ce.upper, 0.0}, {ve * t / kh2n, 0.0});
    b.link({ve * t / (nfact * nfact), 0.0}, {1.0 / q.ce.lower, 0.0});
    b.link({1.0, 0.0}, {q.min_pi.p * pi_f, 0.0});
    b.link({q.min_pi.p * pi_f, 0.0}, {nfact / std::pow(khs, n), 0.0});
    row.checks[static_cast<int>(CheckId::ratio_bands)] = b.finish();
  }

  row.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return row;
}

int row_thread_count(std::size_t rows) {
  unsigned n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("CARALAB_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) n = static_cast<unsigned>(std::min<long>(v, 64));
  }
  return static_cast<int>(std::min<std::size_t>(n, rows));
}

}  // namespace

const char* check_name(CheckId id) {
  return kCheckNames[static_cast<int>(id)];
}

std::optional<CheckId> check_from_name(std::string_view name) {
  for (int i = 0; i < kCheckCount; ++i)
    if (name == kCheckNames[i]) return static_cast<CheckId>(i);
  return std::nullopt;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    case Verdict::skipped:
      return "skipped";
  }
  return "skipped";
}

const std::string& builtin_zoo_json() {
  static const std::string text = R"([
  {"name": "disc", "kind": "polydisc", "radii": [1.0],
   "points": [[0.0], [0.5]]},
  {"name": "bidisc", "kind": "polydisc", "radii": [1.0, 1.0],
   "points": [[0.0, 0.0], [[0.3, 0.0], [0.0, 0.4]]]},
  {"name": "polydisc-tall", "kind": "polydisc", "radii": [1.0, 2.0],
   "points": [[[0.5, 0.0], [0.0, 1.0]]]},
  {"name": "ball2", "kind": "ball", "dimension": 2, "radius": 1.0,
   "points": [[0.0, 0.0], [0.5, 0.0]]},
  {"name": "ball3", "kind": "ball", "dimension": 3, "radius": 1.0},
  {"name": "diamond", "kind": "diamond", "weights": [1.0, 1.0]},
  {"name": "diamond-skew", "kind": "diamond", "weights": [1.0, 2.0]},
  {"name": "pball-1", "kind": "pball", "p": 1.0, "radii": [1.0, 0.8]},
  {"name": "pball-15", "kind": "pball", "p": 1.5, "radii": [1.0, 1.0]},
  {"name": "pball-3", "kind": "pball", "p": 3.0, "radii": [1.0, 1.0, 1.0]},
  {"name": "thin-ellipsoid", "kind": "complex_ellipsoid",
   "exponents": [0.3, 0.3], "radii": [1.0, 1.0]},
  {"name": "rotated-polydisc", "kind": "polydisc", "radii": [1.0, 2.0],
   "transform": {"unitary": [[[0.6, 0.0], [0.8, 0.0]],
                             [[-0.8, 0.0], [0.6, 0.0]]],
                 "scale": [1.2, 0.9]}},
  {"name": "disc-x-ball", "kind": "product",
   "members": [{"kind": "polydisc", "radii": [1.0]},
               {"kind": "ball", "dimension": 2, "radius": 1.0}]}
])";
  return text;
}

InequalityReport run_suite(const std::vector<ZooEntry>& zoo,
                           const SuiteParams& params) {
  const auto t0 = std::chrono::steady_clock::now();
  struct Task {
    const ZooEntry* entry;
    std::size_t point_index;
  };
  std::vector<Task> tasks;
  for (const ZooEntry& e : zoo)
    for (std::size_t k = 0; k < e.points.size(); ++k) {
      if (!metric_supported(e.spec, e.points[k], MetricKind::caratheodory))
        throw ConfigError("row '" + e.name +
                          "': no caratheodory backend at point " +
                          std::to_string(k));
      tasks.push_back({&e, k});
    }

  InequalityReport report;
  report.seed = params.seed;
  report.samples = params.samples;
  report.budget = params.budget;
  report.rows.resize(tasks.size());

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        report.rows[i] =
            run_row(tasks[i].entry->name, tasks[i].entry->spec,
                    tasks[i].point_index,
                    tasks[i].entry->points[tasks[i].point_index], params);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  const int workers = row_thread_count(tasks.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  report.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  return report;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

void require_finite(double x, const char* what) {
  if (!std::isfinite(x))
    throw std::runtime_error(std::string("non-finite value in report: ") +
                             what);
}

json complex_to_json(Complex z) {
  require_finite(z.real(), "complex");
  require_finite(z.imag(), "complex");
  return json::array({z.real(), z.imag()});
}

Complex complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2)
    throw ConfigError("report: expected a [re, im] pair");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

json cvec_to_json(const CVec& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v[i]));
  return out;
}

CVec cvec_from_json(const json& j) {
  CVec v(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v[static_cast<int>(i)] = complex_from_json(j[i]);
  return v;
}

json cmat_to_json(const CMat& m) {
  json out = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    out.push_back(row);
  }
  return out;
}

CMat cmat_from_json(const json& j) {
  const int rows = static_cast<int>(j.size());
  const int cols = rows == 0 ? 0 : static_cast<int>(j[0].size());
  CMat m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = complex_from_json(j[r][c]);
  return m;
}

const char* method_name(VolumeMethod m) {
  return m == VolumeMethod::monte_carlo ? "monte_carlo" : "closed_form";
}

const char* which_name(VolumeWhich w) {
  switch (w) {
    case VolumeWhich::V: return "V";
    case VolumeWhich::VA: return "VA";
    case VolumeWhich::VC: return "VC";
    case VolumeWhich::VE: return "VE";
    case VolumeWhich::V_inscribed: return "V_inscribed";
    case VolumeWhich::V_circumscribed: return "V_circumscribed";
    case VolumeWhich::domain_volume: return "domain_volume";
  }
  return "domain_volume";
}

VolumeWhich which_from_name(const std::string& s) {
  for (VolumeWhich w : {VolumeWhich::V, VolumeWhich::VA, VolumeWhich::VC,
                        VolumeWhich::VE, VolumeWhich::V_inscribed,
                        VolumeWhich::V_circumscribed,
                        VolumeWhich::domain_volume})
    if (s == which_name(w)) return w;
  throw ConfigError("report: unknown volume tag '" + s + "'");
}

json volume_to_json(const VolumeEstimate& v) {
  require_finite(v.value, "volume value");
  require_finite(v.std_error, "volume std_error");
  return json{{"value", v.value},
              {"std_error", v.std_error},
              {"samples", v.samples},
              {"method", method_name(v.method)},
              {"which", which_name(v.which)}};
}

VolumeEstimate volume_from_json(const json& j) {
  VolumeEstimate v;
  v.value = j.at("value").get<double>();
  v.std_error = j.at("std_error").get<double>();
  v.samples = j.at("samples").get<long long>();
  v.method = j.at("method").get<std::string>() == "monte_carlo"
                 ? VolumeMethod::monte_carlo
                 : VolumeMethod::closed_form;
  v.which = which_from_name(j.at("which").get<std::string>());
  return v;
}

const char* kernel_method_name(KernelMethod m) {
  switch (m) {
    case KernelMethod::balanced_identity: return "balanced_identity";
    case KernelMethod::closed_form: return "closed_form";
    case KernelMethod::gram_lower: return "gram_lower";
  }
  return "gram_lower";
}

KernelMethod kernel_method_from_name(const std::string& s) {
  if (s == "balanced_identity") return KernelMethod::balanced_identity;
  if (s == "closed_form") return KernelMethod::closed_form;
  if (s == "gram_lower") return KernelMethod::gram_lower;
  throw ConfigError("report: unknown kernel method '" + s + "'");
}

json kernel_to_json(const KernelEstimate& k) {
  require_finite(k.lower, "kernel lower");
  json out{{"lower", k.lower},
           {"std_error", k.std_error},
           {"basis_size", k.basis_size},
           {"degree_used", k.degree_used},
           {"method", kernel_method_name(k.method)}};
  if (k.exact) {
    require_finite(*k.exact, "kernel exact");
    out["exact"] = *k.exact;
  }
  return out;
}

KernelEstimate kernel_from_json(const json& j) {
  KernelEstimate k;
  k.lower = j.at("lower").get<double>();
  k.std_error = j.at("std_error").get<double>();
  k.basis_size = j.at("basis_size").get<long long>();
  k.degree_used = j.at("degree_used").get<int>();
  k.method = kernel_method_from_name(j.at("method").get<std::string>());
  if (j.contains("exact")) k.exact = j["exact"].get<double>();
  return k;
}

json fit_to_json(const PolydiscFit& f) {
  require_finite(f.volume, "fit volume");
  return json{{"volume", f.volume}, {"radii", f.radii}};
}

PolydiscFit fit_from_json(const json& j) {
  PolydiscFit f;
  f.volume = j.at("volume").get<double>();
  f.radii = j.at("radii").get<std::vector<double>>();
  return f;
}

json check_to_json(const InequalityCheck& c) {
  require_finite(c.lhs, "check lhs");
  require_finite(c.rhs, "check rhs");
  require_finite(c.slack_sigma, "check slack");
  return json{{"id", check_name(c.id)},
              {"lhs", c.lhs},
              {"rhs", c.rhs},
              {"stderr_lhs", c.stderr_lhs},
              {"stderr_rhs", c.stderr_rhs},
              {"verdict", verdict_name(c.verdict)},
              {"slack_sigma", c.slack_sigma},
              {"reason", c.reason}};
}

InequalityCheck check_from_json(const json& j) {
  InequalityCheck c;
  const std::string id = j.at("id").get<std::string>();
  const auto parsed = check_from_name(id);
  if (!parsed) throw ConfigError("report: unknown check id '" + id + "'");
  c.id = *parsed;
  c.lhs = j.at("lhs").get<double>();
  c.rhs = j.at("rhs").get<double>();
  c.stderr_lhs = j.at("stderr_lhs").get<double>();
  c.stderr_rhs = j.at("stderr_rhs").get<double>();
  const std::string v = j.at("verdict").get<std::string>();
  c.verdict = v == "pass" ? Verdict::pass
              : v == "fail" ? Verdict::fail
                            : Verdict::skipped;
  c.slack_sigma = j.at("slack_sigma").get<double>();
  c.reason = j.at("reason").get<std::string>();
  return c;
}

json row_to_json(const RowReport& row) {
  const RowQuantities& q = row.q;
  json frame{{"basis", cmat_to_json(q.frame.basis)},
             {"radii", q.frame.radii},
             {"pi", q.frame.pi},
             {"k_hat", q.frame.k_hat},
             {"k_hat_witness", cvec_to_json(q.frame.k_hat_witness)}};
  json volumes{{"V", volume_to_json(q.V)},
               {"VC", volume_to_json(q.VC)},
               {"VE", volume_to_json(q.VE)},
               {"inscribed", volume_to_json(q.inscribed)},
               {"circumscribed", volume_to_json(q.circumscribed)}};
  if (q.VA) volumes["VA"] = volume_to_json(*q.VA);
  json hull{{"inscribed_axis", fit_to_json(q.hull.inscribed_axis)},
            {"inscribed_best", fit_to_json(q.hull.inscribed_best)},
            {"circumscribed_axis", fit_to_json(q.hull.circumscribed_axis)},
            {"circumscribed_best", fit_to_json(q.hull.circumscribed_best)}};
  json out{{"name", row.name},
           {"point", cvec_to_json(row.point)},
           {"frame", frame},
           {"jacobian", cmat_to_json(q.jacobian)},
           {"det", complex_to_json(q.det)},
           {"ce", json{{"lower", q.ce.lower}, {"upper", q.ce.upper}}},
           {"volumes", volumes},
           {"hull", hull},
           {"min_pi", json{{"p", q.min_pi.p}, {"min_pi", q.min_pi.min_pi}}},
           {"wall_ms", row.wall_ms}};
  if (q.kernel) out["kernel"] = kernel_to_json(*q.kernel);
  if (q.kernel_gram) out["kernel_gram"] = kernel_to_json(*q.kernel_gram);
  if (q.domain_volume_closed)
    out["domain_volume_closed"] = *q.domain_volume_closed;
  if (q.domain_volume_mc)
    out["domain_volume_mc"] = volume_to_json(*q.domain_volume_mc);
  json checks = json::array();
  for (const InequalityCheck& c : row.checks) checks.push_back(check_to_json(c));
  out["checks"] = checks;
  return out;
}

RowReport row_from_json(const json& j) {
  RowReport row;
  row.name = j.at("name").get<std::string>();
  row.point = cvec_from_json(j.at("point"));
  RowQuantities& q = row.q;
  const json& f = j.at("frame");
  q.frame.basis = cmat_from_json(f.at("basis"));
  q.frame.radii = f.at("radii").get<std::vector<double>>();
  q.frame.pi = f.at("pi").get<double>();
  q.frame.k_hat = f.at("k_hat").get<double>();
  q.frame.k_hat_witness = cvec_from_json(f.at("k_hat_witness"));
  q.jacobian = cmat_from_json(j.at("jacobian"));
  q.det = complex_from_json(j.at("det"));
  q.ce.lower = j.at("ce").at("lower").get<double>();
  q.ce.upper = j.at("ce").at("upper").get<double>();
  const json& vols = j.at("volumes");
  q.V = volume_from_json(vols.at("V"));
  if (vols.contains("VA")) q.VA = volume_from_json(vols["VA"]);
  q.VC = volume_from_json(vols.at("VC"));
  q.VE = volume_from_json(vols.at("VE"));
  q.inscribed = volume_from_json(vols.at("inscribed"));
  q.circumscribed = volume_from_json(vols.at("circumscribed"));
  const json& h = j.at("hull");
  q.hull.inscribed_axis = fit_from_json(h.at("inscribed_axis"));
  q.hull.inscribed_best = fit_from_json(h.at("inscribed_best"));
  q.hull.circumscribed_axis = fit_from_json(h.at("circumscribed_axis"));
  q.hull.circumscribed_best = fit_from_json(h.at("circumscribed_best"));
  q.min_pi.p = j.at("min_pi").at("p").get<double>();
  q.min_pi.min_pi = j.at("min_pi").at("min_pi").get<double>();
  if (j.contains("kernel")) q.kernel = kernel_from_json(j["kernel"]);
  if (j.contains("kernel_gram"))
    q.kernel_gram = kernel_from_json(j["kernel_gram"]);
  if (j.contains("domain_volume_closed"))
    q.domain_volume_closed = j["domain_volume_closed"].get<double>();
  if (j.contains("domain_volume_mc"))
    q.domain_volume_mc = volume_from_json(j["domain_volume_mc"]);
  for (const json& c : j.at("checks")) row.checks.push_back(check_from_json(c));
  row.wall_ms = j.at("wall_ms").get<std::int64_t>();
  return row;
}

std::string format_double(double x) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  os << x;
  return os.str();
}

std::string format_point(const CVec& v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  for (int i = 0; i < v.size(); ++i) {
    if (i) os << ';';
    os << v[i].real();
    if (v[i].imag() != 0.0) os << (v[i].imag() > 0 ? "+" : "") << v[i].imag()
                               << "i";
  }
  return os.str();
}

}  // namespace

std::string report_to_json(const InequalityReport& report) {
  json rows = json::array();
  for (const RowReport& r : report.rows) rows.push_back(row_to_json(r));
  const json out{{"seed", report.seed},
                 {"samples", report.samples},
                 {"budget", report.budget},
                 {"wall_ms", report.wall_ms},
                 {"rows", rows}};
  return out.dump(2) + "\n";
}

InequalityReport report_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("report: invalid JSON: ") + e.what());
  }
  try {
    InequalityReport report;
    report.seed = j.at("seed").get<std::uint64_t>();
    report.samples = j.at("samples").get<long long>();
    report.budget = j.at("budget").get<long>();
    report.wall_ms = j.at("wall_ms").get<std::int64_t>();
    for (const json& r : j.at("rows")) report.rows.push_back(row_from_json(r));
    return report;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("report: malformed field: ") + e.what());
  }
}

std::string report_to_csv(const InequalityReport& report) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << "name,point,check,lhs,rhs,stderr_lhs,stderr_rhs,verdict,slack_sigma\n";
  for (const RowReport& row : report.rows) {
    const std::string point = format_point(row.point);
    for (const InequalityCheck& c : row.checks) {
      os << row.name << ',' << point << ',' << check_name(c.id) << ','
         << format_double(c.lhs) << ',' << format_double(c.rhs) << ','
         << format_double(c.stderr_lhs) << ',' << format_double(c.stderr_rhs)
         << ',' << verdict_name(c.verdict) << ','
         << format_double(c.slack_sigma) << '\n';
    }
  }
  return os.str();
}

std::string emit(const InequalityReport& report, const std::string& format) {
  if (format == "json") return report_to_json(report);
  if (format == "csv") return report_to_csv(report);
  throw std::invalid_argument("unsupported format");
}

CheckSummary check_report(const InequalityReport& report) {
  CheckSummary s;
  std::ostringstream os;
  os.imbue(std::locale::classic());
  std::ostringstream skips;
  skips.imbue(std::locale::classic());
  for (const RowReport& row : report.rows) {
    int pass = 0, fail = 0, skip = 0;
    for (const InequalityCheck& c : row.checks) {
      switch (c.verdict) {
        case Verdict::pass:
          ++pass;
          break;
        case Verdict::fail:
          ++fail;
          os << "  FAIL " << row.name << " @ (" << format_point(row.point)
             << ") " << check_name(c.id) << ": lhs=" << format_double(c.lhs)
             << " rhs=" << format_double(c.rhs)
             << " slack_sigma=" << format_double(c.slack_sigma) << "\n";
          break;
        case Verdict::skipped:
          ++skip;
          skips << "  skip " << row.name << " @ (" << format_point(row.point)
                << ") " << check_name(c.id) << ": " << c.reason << "\n";
          break;
      }
    }
    s.passed += pass;
    s.failed += fail;
    s.skipped += skip;
    os << row.name << " @ (" << format_point(row.point) << "): " << pass
       << " pass, " << fail << " fail, " << skip << " skipped\n";
  }
  os << "total: " << (s.passed + s.failed + s.skipped) << " checks, "
     << s.passed << " pass, " << s.failed << " fail, " << s.skipped
     << " skipped\n";
  if (s.skipped > 0) os << "skipped rows:\n" << skips.str();
  os << "result: " << (s.failed == 0 ? "PASS" : "FAIL") << "\n";
  s.text = os.str();
  s.exit_code = s.failed == 0 ? 0 : 1;
  return s;
}

}  // namespace caralab
