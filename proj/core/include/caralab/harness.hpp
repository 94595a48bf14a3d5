#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "caralab/bergman.hpp"
#include "caralab/domain.hpp"
#include "caralab/extremal.hpp"
#include "caralab/volume.hpp"

namespace caralab {

// Per-row inequality checks.  Each id appears exactly once per
// (domain, point) row with verdict pass, fail or skipped; a skip always
// carries a reason.
enum class CheckId {
  volume_chain,         // V <= VA <= VC
  kernel_upper_volume,  // K <= 1/V
  kernel_vs_azukawa,    // K >= 1/VA (equality at balanced centres)
  frame_bound_upper,    // C(a;X) <= sum |<X,e_j>| r_j on fresh directions
  frame_bound_lower,    // C(a;X) >= k_hat (1-1e-6) sum |<X,e_j>| r_j
  det_lower,            // |det F'(a)| >= (k_hat (1-1e-6))^n Pi
  det_upper,            // |det F'(a)| <= n! Pi
  ce_det_bracket,       // k^2n <= CE / Pi^2 <= (n!)^2 via the CE interval
  diamond_closed_form,  // MC domain volume vs the closed diamond form
  ce_volume_bracket,    // (2n)!/(2 pi)^n CE VC within [k^2n, (n!)^2/k^2n]
  kernel_volume_chain,  // c^-2n / VA >= 1/V >= K >= 1/VA
  ce_kernel_bracket,    // C_n K >= CE >= c^2n c_n K
  ratio_bands,          // V_i, V_e, VE, P, 1/CE pairwise ratio bands
};

inline constexpr int kCheckCount = 13;

const char* check_name(CheckId id);
std::optional<CheckId> check_from_name(std::string_view name);

enum class Verdict { pass, fail, skipped };

const char* verdict_name(Verdict v);

// One verified inequality.  lhs <= rhs is the binding link (the worst
// one when the check is a chain); slack_sigma is its signed margin in
// combined-sigma units, clamped to [-1e9, 1e9], and the verdict is
// pass iff slack_sigma >= -3.  Closed-form comparisons get a floor of
// one third relative 1e-9 per sigma so that exact ties pass.
struct InequalityCheck {
  CheckId id = CheckId::volume_chain;
  double lhs = 0.0;
  double rhs = 0.0;
  double stderr_lhs = 0.0;
  double stderr_rhs = 0.0;
  Verdict verdict = Verdict::skipped;
  double slack_sigma = 0.0;
  std::string reason;  // non-empty iff skipped
};

// Everything measured on one (domain, point) row.
struct RowQuantities {
  Frame frame;
  CMat jacobian;  // rows of the extremal map derivative
  Complex det{0.0, 0.0};
  CEBounds ce;
  VolumeEstimate V, VC, VE;
  std::optional<VolumeEstimate> VA;  // azukawa backend may be absent
  VolumeEstimate inscribed, circumscribed;  // best variants of the hull
  PolydiscHull hull;
  MinPiResult min_pi;
  std::optional<KernelEstimate> kernel;       // exact route when available
  std::optional<KernelEstimate> kernel_gram;  // Gram lower bound
  std::optional<double> domain_volume_closed;
  std::optional<VolumeEstimate> domain_volume_mc;
};

struct RowReport {
  std::string name;
  CVec point;
  RowQuantities q;
  std::vector<InequalityCheck> checks;  // kCheckCount entries, enum order
  std::int64_t wall_ms = 0;
};

struct SuiteParams {
  std::uint64_t seed = 20260814;
  long long samples = 1000000;
  long budget = 20000;
};

struct InequalityReport {
  std::uint64_t seed = 0;
  long long samples = 0;
  long budget = 0;
  std::int64_t wall_ms = 0;
  std::vector<RowReport> rows;
};

// The built-in domain zoo as a parse_domain_spec config string.
const std::string& builtin_zoo_json();

// Runs the full pipeline on every (domain, point) row: frame, extremal
// map, CE bounds, indicatrix volumes, diamond comparison volume,
// kernel estimates, polydisc hulls, frame-product minimization, then
// all checks.  Rows run concurrently (capped by CARALAB_THREADS) with
// per-row substreams keyed by name and point index, so reports are
// reproducible at any thread count.  A missing caratheodory backend at
// some row is a configuration error; a missing backend for an
// individual quantity marks the dependent checks skipped.
InequalityReport run_suite(const std::vector<ZooEntry>& zoo,
                           const SuiteParams& params);

// Lossless JSON round trip.  Serialization sorts keys and never emits
// NaN or infinities; wall_ms is the only field that differs between
// reruns with equal parameters.
std::string report_to_json(const InequalityReport& report);
InequalityReport report_from_json(const std::string& text);

// One CSV row per (domain, point, check); decimal dot, no locale.
std::string report_to_csv(const InequalityReport& report);

// Dispatch on format in {json, csv}; anything else is
// std::invalid_argument("unsupported format").
std::string emit(const InequalityReport& report, const std::string& format);

struct CheckSummary {
  int exit_code = 0;  // 0 iff no check failed
  int passed = 0;
  int failed = 0;
  int skipped = 0;
  std::string text;  // human table, one line per row plus totals
};

CheckSummary check_report(const InequalityReport& report);

}  // namespace caralab
