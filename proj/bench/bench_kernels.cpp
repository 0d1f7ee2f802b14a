// Serial reference kernels against their OpenMP versions, plus one full
// certified solver run for scale.

#include <benchmark/benchmark.h>

#include "proxcert/certificates.hpp"
#include "proxcert/harness.hpp"
#include "proxcert/kernels.hpp"
#include "proxcert/solvers.hpp"

using namespace proxcert;

namespace {

template <bool Parallel>
void BM_gemv(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  Rng rng(1);
  const RowMatrix A = rng.normal_matrix(n, n);
  const Vector x = rng.normal_vector(n);
  Vector out(n);
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::gemv(A, x, out);
    else
      kernels::serial::gemv(A, x, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetBytesProcessed(state.iterations() * n * n * static_cast<std::int64_t>(sizeof(double)));
}

template <bool Parallel>
void BM_dot(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  Rng rng(2);
  const Vector x = rng.normal_vector(n);
  const Vector y = rng.normal_vector(n);
  for (auto _ : state) {
    double v = Parallel ? kernels::dot(x, y) : kernels::serial::dot(x, y);
    benchmark::DoNotOptimize(v);
  }
  state.SetBytesProcessed(state.iterations() * 2 * n * static_cast<std::int64_t>(sizeof(double)));
}

void BM_certified_run(benchmark::State& state) {
  const ProblemSpec spec{ProblemKind::lasso, state.range(0), 0, 100.0, 0.1, 3};
  const CompositeProblem p = make_problem(spec);
  const CompositeProblem bound = with_reference(p, reference_solution(p));
  SolverConfig cfg;
  cfg.step = half_inverse_step(bound);
  cfg.max_iters = 500;
  cfg.record_certificates = true;
  for (auto _ : state) {
    Trace t = run(bound, cfg, Vector::Zero(bound.dim()));
    benchmark::DoNotOptimize(t.records.data());
  }
}

}  // namespace

BENCHMARK(BM_gemv<false>)->Name("gemv/serial")->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(BM_gemv<true>)->Name("gemv/omp")->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(BM_dot<false>)->Name("dot/serial")->Arg(1 << 10)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_dot<true>)->Name("dot/omp")->Arg(1 << 10)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_certified_run)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
