#include <benchmark/benchmark.h>

#include <cmath>

#include "semicoupling/dual_solver.hpp"
#include "semicoupling/measures.hpp"
#include "semicoupling/problem.hpp"
#include "semicoupling/retraction.hpp"
#include "semicoupling/stratify.hpp"
#include "semicoupling/transform.hpp"

namespace sc = semicoupling;
using sc::Matrix;
using sc::Vector;

namespace {

// Three equal Diracs on a triangle of circumradius 0.5, uniform density on
// [-1, 1]^2.
sc::Problem triangle(int n) {
  sc::Box box{Vector::Constant(2, -1.0), Vector::Constant(2, 1.0)};
  auto src = sc::make_source(box, {n, n}, [](const sc::VectorRef&) { return 1.0; });
  Matrix y(2, 3);
  for (int i = 0; i < 3; ++i) {
    const double a = M_PI / 2 + 2 * M_PI * i / 3;
    y.col(i) << 0.5 * std::cos(a), 0.5 * std::sin(a);
  }
  return sc::Problem(std::move(src), sc::TargetMeasure(y, {0.8, 0.8, 0.8}), sc::make_quadratic_cost());
}

void BM_CTransformGrid(benchmark::State& state) {
  const auto p = triangle(static_cast<int>(state.range(0)));
  const sc::Potential pot(Vector::Constant(3, 0.1));
  for (auto _ : state) {
    double acc = 0.0;
    for (std::size_t c = 0; c < p.grid().size(); ++c) acc += sc::c_transform(p, pot, p.grid().center(c));
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(p.grid().size()));
}
BENCHMARK(BM_CTransformGrid)->Arg(128)->Arg(256);

void BM_CellMasses(benchmark::State& state) {
  const auto p = triangle(static_cast<int>(state.range(0)));
  const sc::Potential pot(Vector::Constant(3, 0.1));
  for (auto _ : state) benchmark::DoNotOptimize(sc::cell_masses(p, pot));
}
BENCHMARK(BM_CellMasses)->Arg(128)->Arg(256)->Arg(512);

void BM_SolveDual(benchmark::State& state) {
  const auto p = triangle(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sc::solve_dual(p));
}
BENCHMARK(BM_SolveDual)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_Stratify(benchmark::State& state) {
  const auto p = triangle(static_cast<int>(state.range(0)));
  const auto pot = sc::solve_dual(p).potential;
  for (auto _ : state) benchmark::DoNotOptimize(sc::stratify(p, pot, p.tolerances()));
}
BENCHMARK(BM_Stratify)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_OffDomainFlow(benchmark::State& state) {
  const auto p = triangle(128);
  const auto pot = sc::solve_dual(p).potential;
  Vector seed(2);
  seed << 0.9, -0.8;
  for (auto _ : state) benchmark::DoNotOptimize(sc::integrate_flow(seed, {}, p, pot, p.tolerances()));
}
BENCHMARK(BM_OffDomainFlow)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
