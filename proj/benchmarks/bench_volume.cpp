// Monte Carlo volume throughput: domain hit tests and indicatrix
// membership for the slowest metric in the chain.

#include <benchmark/benchmark.h>

#include "caralab/domain.hpp"
#include "caralab/extremal.hpp"
#include "caralab/metrics.hpp"
#include "caralab/rng.hpp"
#include "caralab/volume.hpp"

using namespace caralab;

namespace {

void run_domain_volume(benchmark::State& state, const DomainSpec& spec) {
  const long long N = state.range(0);
  const Stream s = Stream{7}.derive("bench-domain");
  for (auto _ : state)
    benchmark::DoNotOptimize(domain_volume_mc(spec, N, s).value);
  state.SetItemsProcessed(state.iterations() * N);
}

void run_indicatrix(benchmark::State& state, const DomainSpec& spec,
                    const CVec& a, MetricKind kind) {
  const long long N = state.range(0);
  const Stream s = Stream{7}.derive("bench-indicatrix");
  const Frame f = greedy_basis(spec, a, 2000);
  for (auto _ : state)
    benchmark::DoNotOptimize(indicatrix_volume(spec, a, kind, N, s, f).value);
  state.SetItemsProcessed(state.iterations() * N);
}

CVec tall_point() {
  CVec a(2);
  a[0] = Complex(0.5, 0.0);
  a[1] = Complex(0.0, 1.0);
  return a;
}

const DomainSpec kDiamond3 = DomainSpec::diamond({1.0, 1.0, 1.0});
const DomainSpec kTall = DomainSpec::polydisc({1.0, 2.0});

}  // namespace

BENCHMARK_CAPTURE(run_domain_volume, diamond3, kDiamond3)
    ->Arg(1 << 14)
    ->Arg(1 << 17)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(run_indicatrix, caratheodory_tall, kTall, tall_point(),
                  MetricKind::caratheodory)
    ->Arg(1 << 12)
    ->Arg(1 << 14)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(run_indicatrix, azukawa_tall, kTall, tall_point(),
                  MetricKind::azukawa)
    ->Arg(1 << 12)
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
