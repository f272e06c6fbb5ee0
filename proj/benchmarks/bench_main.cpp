#include <benchmark/benchmark.h>

#include "reflectsde/brownian.hpp"
#include "reflectsde/schemes.hpp"
#include "reflectsde/skorohod.hpp"

namespace {

using namespace reflectsde;

Vec point(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

DomainSpec domain_for(int which) {
  switch (which) {
    case 0: return DomainSpec::half_space(point(0, 1), 0.0);
    case 1: return DomainSpec::ball(point(0, 0), 1.0);
    case 2: return DomainSpec::box(2, 0.0, 1.0);
    default: return DomainSpec::ball_exterior(point(0, 0), 1.0);
  }
}

const char* kDomainNames[] = {"half_space", "ball", "square", "ball_exterior"};

void BM_Project(benchmark::State& state) {
  const auto domain = domain_for(static_cast<int>(state.range(0)));
  const Vec x = point(1.7, -0.4);
  for (auto _ : state) benchmark::DoNotOptimize(domain.project(x));
  state.SetLabel(kDomainNames[state.range(0)]);
}
BENCHMARK(BM_Project)->DenseRange(0, 3);

void BM_SampleBrownian(benchmark::State& state) {
  const BrownianGenerator gen{1, 2, 1.0, 20};
  std::uint64_t id = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_brownian(gen, static_cast<int>(state.range(0)), id++));
  state.SetItemsProcessed(state.iterations() << state.range(0));
}
BENCHMARK(BM_SampleBrownian)->Arg(8)->Arg(12);

void BM_SolveSkorohod(benchmark::State& state) {
  const auto domain = domain_for(static_cast<int>(state.range(0)));
  const Vec start = state.range(0) == 3 ? point(1.5, 0.0) : point(0.3, 0.2);
  const auto w = sample_brownian(BrownianGenerator{2, 2, 1.0, 20}, 10, 0).translated(start);
  for (auto _ : state) benchmark::DoNotOptimize(solve(domain, w, 1));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.size()));
  state.SetLabel(kDomainNames[state.range(0)]);
}
BENCHMARK(BM_SolveSkorohod)->DenseRange(0, 3);

void BM_EulerPeano(benchmark::State& state) {
  const auto domain = DomainSpec::ball(point(0, 0), 1.0);
  const auto coef = coefficients::diag_tanh(2, coefficients::Drift::NegTanh);
  const BrownianGenerator gen{3, 2, 1.0, 20};
  for (auto _ : state) benchmark::DoNotOptimize(euler_peano(domain, coef, gen, 10, point(0, 0)));
}
BENCHMARK(BM_EulerPeano);

void BM_WongZakai(benchmark::State& state) {
  const auto domain = DomainSpec::ball(point(0, 0), 1.0);
  const auto coef = coefficients::diag_tanh(2, coefficients::Drift::NegTanh);
  const BrownianGenerator gen{3, 2, 1.0, 20};
  for (auto _ : state) {
    benchmark::DoNotOptimize(wong_zakai(domain, coef, gen, 8, point(0, 0), static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_WongZakai)->Arg(1)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
