#include <benchmark/benchmark.h>

#include "wgdmp/dmp.hpp"

using namespace wgdmp;

namespace {

TriMesh mesh_for(const benchmark::State& state, const Problem& p) {
  const int n = static_cast<int>(state.range(0));
  return generate_structured(MeshKind::kMesh90, n, n, p.domain);
}

void BM_Discretize(benchmark::State& state) {
  const Problem p = example52(99.0);
  const TriMesh mesh = mesh_for(state, p);
  for (auto _ : state) benchmark::DoNotOptimize(discretize(mesh, p, quadrature(4)));
  state.SetItemsProcessed(state.iterations() * mesh.num_elements());
}

void BM_SolveCg(benchmark::State& state) {
  const Problem p = example52(99.0);
  const TriMesh mesh = mesh_for(state, p);
  const Discretization d = discretize(mesh, p, quadrature(4));
  for (auto _ : state) benchmark::DoNotOptimize(solve(d));
  state.counters["unknowns"] = mesh.num_interior_edges();
}

void BM_SolveDense(benchmark::State& state) {
  const Problem p = example51();
  const TriMesh mesh = mesh_for(state, p);
  const Discretization d = discretize(mesh, p, quadrature(1));
  SolverConfig cfg;
  cfg.method = SolverMethod::kDenseCholesky;
  for (auto _ : state) benchmark::DoNotOptimize(solve(d, cfg));
  state.counters["unknowns"] = mesh.num_interior_edges();
}

void BM_AuditConditions(benchmark::State& state) {
  const Problem p = example52(99.0);
  const TriMesh mesh = mesh_for(state, p);
  const Discretization d = discretize(mesh, p, quadrature(4));
  for (auto _ : state) benchmark::DoNotOptimize(audit_discretization(mesh, d, DenseAudit::kSkip));
}

void BM_AuditDense(benchmark::State& state) {
  const Problem p = example51();
  const TriMesh mesh = mesh_for(state, p);
  const Discretization d = discretize(mesh, p, quadrature(1));
  for (auto _ : state) benchmark::DoNotOptimize(mmatrix_audit(d.reduced, DenseAudit::kRequired));
}

}  // namespace

BENCHMARK(BM_Discretize)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveCg)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveDense)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AuditConditions)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AuditDense)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
