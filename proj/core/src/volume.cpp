#include "caralab/volume.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace caralab {

namespace {

constexpr long long kChunk = 65536;
constexpr std::uint64_t kProbeOffset = 1ull << 62;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

int thread_count(long long chunks) {
  unsigned n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("CARALAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 64)
      n = static_cast<unsigned>(v);
  }
  return static_cast<int>(std::min<long long>(n, std::max<long long>(chunks, 1)));
}

// Point i of the box sampler; every coordinate draws radius and phase
// from its own pair of counters, so samples are order-free.
CVec box_point(const Stream& stream, const std::vector<double>& box,
               std::uint64_t base) {
  const int n = static_cast<int>(box.size());
  CVec z(n);
  for (int j = 0; j < n; ++j) {
    const double u1 = stream.uniform(base + 2 * j);
    const double u2 = stream.uniform(base + 2 * j + 1);
    z[j] = std::polar(box[j] * std::sqrt(u1), kTwoPi * u2);
  }
  return z;
}

}  // namespace

VolumeEstimate mc_volume(const Membership& inside,
                         const std::vector<double>& box, long long N,
                         const Stream& stream, VolumeWhich which) {
  if (!inside) throw std::invalid_argument("mc_volume: empty membership");
  if (box.empty() || box.size() > static_cast<size_t>(kMaxDim))
    throw std::invalid_argument("mc_volume: box dimension must be 1..3");
  for (double r : box)
    if (!(r > 0.0) || !std::isfinite(r))
      throw std::invalid_argument("mc_volume: box radii must be positive");
  if (N < 1000)
    throw std::invalid_argument("mc_volume: need at least 1000 samples");

  const int n = static_cast<int>(box.size());

  // The box must actually bound the set: probe points pushed outside
  // one coordinate at a time have to be non-members.
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t base = kProbeOffset + 8ull * static_cast<unsigned>(i);
    CVec z = box_point(stream, box, base);
    const int k = static_cast<int>(stream.at(base + 6) % n);
    const double factor = 1.0001 + stream.uniform(base + 7);
    z[k] = std::polar(box[k] * factor, kTwoPi * stream.uniform(base + 7));
    if (inside(z))
      throw std::runtime_error(
          "mc_volume: sampling box violation, found a member outside the box");
  }

  const long long chunks = (N + kChunk - 1) / kChunk;
  std::vector<long long> hits(static_cast<size_t>(chunks), 0);
  std::atomic<long long> next{0};
  std::exception_ptr error;
  std::mutex error_mu;

  auto worker = [&]() {
    try {
      for (;;) {
        const long long c = next.fetch_add(1);
        if (c >= chunks) return;
        const long long lo = c * kChunk;
        const long long hi = std::min(N, lo + kChunk);
        long long h = 0;
        for (long long i = lo; i < hi; ++i) {
          const CVec z =
              box_point(stream, box, 8ull * static_cast<std::uint64_t>(i));
          if (inside(z)) ++h;
        }
        hits[static_cast<size_t>(c)] = h;
      }
    } catch (...) {
      const std::scoped_lock lock(error_mu);
      if (!error) error = std::current_exception();
    }
  };

  const int workers = thread_count(chunks);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  long long total = 0;
  for (long long h : hits) total += h;

  double box_volume = 1.0;
  for (double r : box) box_volume *= std::numbers::pi * r * r;
  const double p = static_cast<double>(total) / static_cast<double>(N);

  VolumeEstimate est;
  est.value = p * box_volume;
  est.std_error =
      box_volume * std::sqrt(p * (1.0 - p) / static_cast<double>(N));
  est.samples = N;
  est.method = VolumeMethod::monte_carlo;
  est.which = which;
  return est;
}

VolumeEstimate domain_volume_mc(const DomainSpec& spec, long long N,
                                const Stream& stream) {
  const std::vector<double> box = spec.bounding_radii();
  return mc_volume([&spec](const CVec& z) { return contains(spec, z); }, box,
                   N, stream, VolumeWhich::domain_volume);
}

VolumeEstimate indicatrix_volume(const DomainSpec& spec, const CVec& a,
                                 MetricKind kind, long long N,
                                 const Stream& stream) {
  return indicatrix_volume(spec, a, kind, N, stream, greedy_basis(spec, a));
}

VolumeEstimate indicatrix_volume(const DomainSpec& spec, const CVec& a,
                                 MetricKind kind, long long N,
                                 const Stream& stream, const Frame& frame) {
  VolumeWhich which;
  switch (kind) {
    case MetricKind::caratheodory:
      which = VolumeWhich::VC;
      break;
    case MetricKind::azukawa:
      which = VolumeWhich::VA;
      break;
    case MetricKind::reciprocal_distance:
      which = VolumeWhich::V;
      break;
    default:
      throw std::invalid_argument(
          "indicatrix_volume: no volume for the kobayashi kind, use "
          "azukawa or caratheodory");
  }
  if (!metric_supported(spec, a, kind))
    throw NoBackendError(
        "indicatrix volume: no metric backend at this domain/point");

  const int n = spec.dim();
  std::vector<double> box(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j)
    box[static_cast<size_t>(j)] =
        1.0 / (frame.k_hat * (1.0 - 1e-6) * frame.radii[static_cast<size_t>(j)]);

  // Sample in frame coordinates; the frame is unitary, so volume is
  // preserved.
  const CMat& E = frame.basis;
  auto member = [&](const CVec& u) {
    return indicatrix_member(spec, a, kind, E * u);
  };
  return mc_volume(member, box, N, stream, which);
}

double diamond_volume_closed(const std::vector<double>& r) {
  if (r.empty() || r.size() > static_cast<size_t>(kMaxDim))
    throw std::invalid_argument("diamond volume: dimension must be 1..3");
  const int n = static_cast<int>(r.size());
  double denom = 1.0;
  for (int k = 2; k <= 2 * n; ++k) denom *= k;
  double vol = 1.0;
  for (double w : r) {
    if (!(w > 0.0))
      throw std::invalid_argument("diamond volume: weights must be positive");
    vol /= w * w;
  }
  return vol * std::pow(kTwoPi, n) / denom;
}

namespace {

// Volume of { sum_j (|z_j|/rho_j)^(2 p_j) < 1 } via the Dirichlet
// integral over the moduli simplex.
double dirichlet_volume(const std::vector<double>& exponents,
                        const std::vector<double>& radii) {
  const int n = static_cast<int>(radii.size());
  double vol = std::pow(std::numbers::pi, n);
  double inv_sum = 0.0;
  for (int j = 0; j < n; ++j) {
    const double p = exponents[static_cast<size_t>(j)];
    const double rho = radii[static_cast<size_t>(j)];
    vol *= rho * rho * std::tgamma(1.0 + 1.0 / p);
    inv_sum += 1.0 / p;
  }
  return vol / std::tgamma(1.0 + inv_sum);
}

}  // namespace

double zoo_volume_closed(const DomainSpec& spec) {
  const int n = spec.dim();
  switch (spec.kind()) {
    case DomainKind::polydisc: {
      double vol = 1.0;
      for (double rho : spec.radii()) vol *= std::numbers::pi * rho * rho;
      return vol;
    }
    case DomainKind::ball: {
      double fact = 1.0;
      for (int k = 2; k <= n; ++k) fact *= k;
      return std::pow(std::numbers::pi * spec.radii()[0] * spec.radii()[0],
                      n) /
             fact;
    }
    case DomainKind::diamond:
      return diamond_volume_closed(spec.weights());
    case DomainKind::pball:
      return dirichlet_volume(std::vector<double>(static_cast<size_t>(n),
                                                  spec.p() / 2.0),
                              spec.radii());
    case DomainKind::complex_ellipsoid:
      return dirichlet_volume(spec.exponents(), spec.radii());
    case DomainKind::product: {
      double vol = 1.0;
      for (const auto& mem : spec.members()) vol *= zoo_volume_closed(*mem);
      return vol;
    }
    case DomainKind::transformed:
      return std::pow(std::abs(spec.scale()), 2 * n) *
             zoo_volume_closed(spec.inner());
    default:
      throw std::invalid_argument(
          "zoo volume: no closed form for this domain kind");
  }
}

}  // namespace caralab
