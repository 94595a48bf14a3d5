// Single metric evaluations across backends.  Directions are drawn once
// and cycled so the RNG stays out of the measured loop.

#include <benchmark/benchmark.h>

#include "caralab/domain.hpp"
#include "caralab/metrics.hpp"
#include "caralab/rng.hpp"

using namespace caralab;

namespace {

CVec point2(double x, double re, double im) {
  CVec a(2);
  a[0] = Complex(x, 0.0);
  a[1] = Complex(re, im);
  return a;
}

void run_metric(benchmark::State& state, const DomainSpec& spec,
                const CVec& a, MetricKind kind) {
  SeqStream dirs(Stream{1}.derive("bench-metrics"));
  std::vector<CVec> X;
  for (int i = 0; i < 64; ++i) X.push_back(dirs.next_direction(spec.dim()));
  std::size_t i = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(metric(spec, a, X[i++ & 63], kind).value);
}

const DomainSpec kPolydisc = DomainSpec::polydisc({1.0, 2.0});
const DomainSpec kBall = DomainSpec::ball(2, 1.0);
const DomainSpec kDiamond = DomainSpec::diamond({1.0, 1.0});

}  // namespace

BENCHMARK_CAPTURE(run_metric, caratheodory_polydisc, kPolydisc,
                  point2(0.5, 0.0, 1.0), MetricKind::caratheodory);
BENCHMARK_CAPTURE(run_metric, caratheodory_ball, kBall, point2(0.5, 0.0, 0.0),
                  MetricKind::caratheodory);
BENCHMARK_CAPTURE(run_metric, azukawa_ball, kBall, point2(0.5, 0.0, 0.0),
                  MetricKind::azukawa);
BENCHMARK_CAPTURE(run_metric, kobayashi_ball, kBall, point2(0.5, 0.0, 0.0),
                  MetricKind::kobayashi);
BENCHMARK_CAPTURE(run_metric, reciprocal_distance_diamond, kDiamond,
                  point2(0.0, 0.0, 0.0), MetricKind::reciprocal_distance);

BENCHMARK_MAIN();
