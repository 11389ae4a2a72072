#include <benchmark/benchmark.h>

#include "hadamard/expansion.hpp"
#include "hadamard/hadamard.hpp"
#include "hadamard/oracle.hpp"
#include "hadamard/riesz.hpp"

using namespace hadamard;

namespace {

void BM_RieszPairBump(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  auto model = MinkowskiModel::cube(d, 4.0);
  RieszDistribution R{+1, cplx(d + 0.5, 0.0), model};
  std::vector<double> c(static_cast<std::size_t>(d), 0.0), w(static_cast<std::size_t>(d), 0.3);
  c[0] = 1.0;
  TestFunction phi{Event(c), Event(w)};
  QuadratureSpec q;
  q.rel_tol = 1e-9;
  for (auto _ : state) benchmark::DoNotOptimize(riesz_pair(R, phi, Event(d), q));
}
BENCHMARK(BM_RieszPairBump)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_RieszEval(benchmark::State& state) {
  auto model = MinkowskiModel::cube(4, 4.0);
  RieszDistribution R{+1, cplx(6.5, 0.0), model};
  Event y{1.0, 0.2, 0.1, -0.3}, x(4);
  for (auto _ : state) benchmark::DoNotOptimize(riesz_eval(R, y, x));
}
BENCHMARK(BM_RieszEval);

void BM_FamilyBumpPotential(benchmark::State& state) {
  auto model = MinkowskiModel::cube(2, 4.0);
  OperatorSpec op(model, Potential::bump(Event{0.5, 0.0}, 0.8, 1.0));
  for (auto _ : state) benchmark::DoNotOptimize(hadamard_family(op, 4));
}
BENCHMARK(BM_FamilyBumpPotential)->Unit(benchmark::kMillisecond);

void BM_FamilyValues(benchmark::State& state) {
  auto model = MinkowskiModel::cube(2, 4.0);
  OperatorSpec op(model, Potential::bump(Event{0.5, 0.0}, 0.8, 1.0));
  HadamardFamily fam = hadamard_family(op, 4);
  Event y{1.2, 0.3}, x{0.1, -0.2};
  for (auto _ : state) benchmark::DoNotOptimize(fam.values(y, x, 4));
}
BENCHMARK(BM_FamilyValues);

void BM_FDSolve(benchmark::State& state) {
  auto model = MinkowskiModel::cube(2, 4.0);
  OperatorSpec op(model, Potential::constant(2, 0.0), cplx(-1.0, 0.0));
  TestFunction f(Event{0.6, 0.0}, Event{0.4, 0.4});
  GridSpec g;
  g.domain = Box(Event{0.0, -2.5}, Event{2.0, 2.5});
  g.h = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fd_retarded_solve(op, f, g));
}
BENCHMARK(BM_FDSolve)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_ExactKernel(benchmark::State& state) {
  Event y{1.5, 0.4}, x(2);
  for (auto _ : state) benchmark::DoNotOptimize(exact_kernel_2d(cplx(2.0, 1.0), 2, y, x));
}
BENCHMARK(BM_ExactKernel);

void BM_PowerExpansionEval(benchmark::State& state) {
  auto model = MinkowskiModel::cube(4, 4.0);
  OperatorSpec op(model, Potential::constant(4, 0.5), cplx(1.0, 0.0));
  TruncatedExpansion T = power_expansion(op, 2, 6);
  Event y{1.0, 0.2, 0.1, -0.3}, x(4);
  for (auto _ : state) benchmark::DoNotOptimize(expansion_eval(T, y, x));
}
BENCHMARK(BM_PowerExpansionEval);

}  // namespace

BENCHMARK_MAIN();
