// Serial vs OpenMP for the kernels that dominate runtime.
// Arg 0 selects serial, 1 selects parallel.

#include <benchmark/benchmark.h>

#include "heavy_anchor/game.hpp"
#include "heavy_anchor/graph.hpp"
#include "heavy_anchor/kernels.hpp"
#include "heavy_anchor/operator_analysis.hpp"

using namespace heavy_anchor;

namespace {

kernels::Exec exec_of(const benchmark::State& st) {
  return st.range(0) ? kernels::Exec::parallel : kernels::Exec::serial;
}

Vector filled(Eigen::Index n, std::uint64_t seed) {
  auto g = SplitMix64::stream(seed, 0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = g.uniform(-10, 10);
  return v;
}

void BM_LiftedLaplacian(benchmark::State& st) {
  const int nodes = static_cast<int>(st.range(1));
  const Eigen::Index block = 20;
  const LiftedLaplacian L(CommGraph::ring(nodes), block);
  const Vector x = filled(nodes * block, 1);
  Vector out(x.size());
  for (auto _ : st) {
    kernels::lifted_laplacian_apply(L, x, out, exec_of(st));
    benchmark::DoNotOptimize(out.data());
  }
  st.SetLabel(kernels::to_string(exec_of(st)));
}
BENCHMARK(BM_LiftedLaplacian)->ArgsProduct({{0, 1}, {100, 2000}});

void BM_ExtendedPseudoGradient(benchmark::State& st) {
  const Game g = build_benchmark("sine");
  const Vector x = filled(g.n_agents() * g.dim(), 2);
  Vector out(g.dim());
  for (auto _ : st) {
    kernels::extended_pseudo_gradient(g, x, out, exec_of(st));
    benchmark::DoNotOptimize(out.data());
  }
  st.SetLabel(kernels::to_string(exec_of(st)));
}
BENCHMARK(BM_ExtendedPseudoGradient)->Arg(0)->Arg(1);

void BM_SampledConstants(benchmark::State& st) {
  const Game g = build_benchmark("sine");
  const Operator F = pseudo_gradient_operator(g);
  SamplingOptions o;
  o.pairs = 20000;
  o.exec = exec_of(st);
  for (auto _ : st) benchmark::DoNotOptimize(sampled_constants(F, g.dim(), o));
  st.SetLabel(kernels::to_string(o.exec));
}
BENCHMARK(BM_SampledConstants)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ResolventBoundSweep(benchmark::State& st) {
  Matrix A(4, 4);
  A << -0.3, 2, 0, 0, -2, -0.3, 0, 0, 0, 0, 0.5, 1, 0, 0, -1, 0.5;
  const auto c = exact_linear_constants(A);
  const double lo = c.mu * *c.inv_lipschitz * *c.inv_lipschitz;
  const auto rc = resolvent_constants(c, 0.5 * (lo + 1.0 / c.mu));
  for (auto _ : st) benchmark::DoNotOptimize(check_resolvent_bounds(A, 0.5 * (lo + 1.0 / c.mu), rc, 100000, 1, exec_of(st)));
  st.SetLabel(kernels::to_string(exec_of(st)));
}
BENCHMARK(BM_ResolventBoundSweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
