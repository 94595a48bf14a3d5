// Greedy frame construction cost as a function of the search budget.

#include <benchmark/benchmark.h>

#include "caralab/domain.hpp"
#include "caralab/extremal.hpp"

using namespace caralab;

namespace {

void run_frame(benchmark::State& state, const DomainSpec& spec,
               const CVec& a) {
  const long budget = state.range(0);
  for (auto _ : state) {
    const Frame f = greedy_basis(spec, a, budget);
    benchmark::DoNotOptimize(f.pi);
  }
}

CVec offcenter() {
  CVec a(2);
  a[0] = Complex(0.3, 0.0);
  a[1] = Complex(0.0, 0.4);
  return a;
}

const DomainSpec kBidisc = DomainSpec::polydisc({1.0, 1.0});
const DomainSpec kBall = DomainSpec::ball(2, 1.0);

}  // namespace

BENCHMARK_CAPTURE(run_frame, bidisc_offcenter, kBidisc, offcenter())
    ->Arg(2000)
    ->Arg(20000)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(run_frame, ball_offcenter, kBall, offcenter())
    ->Arg(2000)
    ->Arg(20000)
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
