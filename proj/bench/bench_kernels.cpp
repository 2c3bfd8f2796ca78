#include <benchmark/benchmark.h>

#include <vector>

#include "qmc/certificate.hpp"
#include "qmc/kernels.hpp"
#include "qmc/resolvent.hpp"
#include "qmc/simulator.hpp"
#include "qmc/zoo.hpp"

using namespace qmc;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::Serial : Exec::Parallel; }

// Pi(1) on a Schlogl d=2 window as a sweep operator with boundary value 1.
SweepOperator schlogl_operator(std::int64_t cap) {
  const auto pi = build_embedded(zoo::make("schlogl-2").model, 1.0, cap);
  SweepOperator op;
  op.row_start = pi.row_start;
  op.col = pi.col;
  op.weight = pi.prob;
  op.offset = pi.boundary_mass;
  return op;
}

void BM_Sweep(benchmark::State& state) {
  static const SweepOperator op = schlogl_operator(400);
  std::vector<double> cur(op.rows(), 1.0), next(op.rows());
  const Exec exec = exec_of(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::sweep(exec, op, cur, next));
    std::swap(cur, next);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(op.col.size()));
}
BENCHMARK(BM_Sweep)->Arg(0)->Arg(1)->ArgName("parallel");

void BM_Drift(benchmark::State& state) {
  static const auto cw = compile_window(zoo::make("schlogl-2").model, 400);
  const auto& rows = *cw.rows;
  std::vector<double> f(cw.window->size() + cw.window->boundary.size(), 1.0);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] += static_cast<double>(i % 97);
  std::vector<double> out(cw.window->size());
  for (auto _ : state) {
    if (exec_of(state) == Exec::Serial)
      kernels::drift_serial(rows.row_start, rows.col, rows.rate, f, out);
    else
      kernels::drift_parallel(rows.row_start, rows.col, rows.rate, f, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows.col.size()));
}
BENCHMARK(BM_Drift)->Arg(0)->Arg(1)->ArgName("parallel");

void BM_Bracket(benchmark::State& state) {
  static const auto fx = zoo::make("quadratic-birth");
  static const auto pi = build_embedded(fx.model, 1.0, 3200);
  for (auto _ : state)
    benchmark::DoNotOptimize(maximal_solution_bracket(pi, {.exec = exec_of(state), .tail = fx.tail}).gap);
}
BENCHMARK(BM_Bracket)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_Certificate(benchmark::State& state) {
  static const auto m = zoo::make("schlogl-2").model;
  LyapunovCertificate cert{[](const StateVec& s) { return 1.0 + static_cast<double>(s.level()); }, 2.0};
  for (auto _ : state)
    benchmark::DoNotOptimize(check_uniqueness_certificate(m, cert, 200, {.exec = exec_of(state)}).checked_states);
}
BENCHMARK(BM_Certificate)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& state) {
  static const auto m = zoo::make("quadratic-birth").model;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        estimate_explosion_probability(m, StateVec{0}, {.t_max = 5}, 200, 11, kDefaultExplosionEpsilon, exec_of(state))
            .flagged);
}
BENCHMARK(BM_Simulate)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
