#include <benchmark/benchmark.h>

#include "qflow/bell.hpp"
#include "qflow/dynamics.hpp"
#include "qflow/operator_expr.hpp"
#include "qflow/symbolic_fpe.hpp"

namespace {

const qflow::PhaseSpacePDE& amplifier() {
  static const auto pde = qflow::compile_fpe(qflow::parse_hamiltonian("0.5i*adag^2 - 0.5i*a^2"),
                                             qflow::QuadratureConvention::OperatorQuadratures);
  return pde;
}

void BM_Trajectories(benchmark::State& state) {
  const auto exec = state.range(1) ? qflow::Execution::Parallel : qflow::Execution::Serial;
  const auto bc = qflow::eigenstate_boundary(1.0, 0.0, 3.0);
  for (auto _ : state) {
    auto e = qflow::simulate(amplifier(), bc, qflow::TimeGrid(0.0, 3.0, 300),
                             static_cast<std::size_t>(state.range(0)), 7,
                             qflow::Scheme::ExactOU, {30, exec});
    benchmark::DoNotOptimize(e.raw().data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Trajectories)->Args({10000, 0})->Args({10000, 1})->Unit(benchmark::kMillisecond);

void BM_Chsh(benchmark::State& state) {
  qflow::ChshSettings s;
  const auto a = qflow::optimal_angles();
  s.theta = a.theta;
  s.phi = a.phi;
  s.gain = 1.0;
  s.n_samples = static_cast<std::size_t>(state.range(0));
  s.execution = state.range(1) ? qflow::Execution::Parallel : qflow::Execution::Serial;
  for (auto _ : state) {
    auto r = qflow::chsh_monte_carlo(s);
    benchmark::DoNotOptimize(r.B);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 4);
}
BENCHMARK(BM_Chsh)->Args({100000, 0})->Args({100000, 1})->Unit(benchmark::kMillisecond);

void BM_CompileFpe(benchmark::State& state) {
  const auto h = qflow::parse_hamiltonian("adag^2*a^2 + 0.5i*adag^2 - 0.5i*a^2 + 3*adag*a");
  for (auto _ : state) {
    auto p = qflow::compile_fpe(h, qflow::QuadratureConvention::OperatorQuadratures);
    benchmark::DoNotOptimize(p.drift.data());
  }
}
BENCHMARK(BM_CompileFpe);

}  // namespace

BENCHMARK_MAIN();
