#include <cmath>

#include <benchmark/benchmark.h>

#include "dqr/dynamics.hpp"
#include "dqr/feasibility.hpp"
#include "dqr/optimizer.hpp"
#include "dqr/oracle.hpp"
#include "dqr/readout.hpp"
#include "reference.hpp"

namespace {

using namespace dqr;

void BM_CheckConstraints(benchmark::State& state) {
  const auto d = reference::case_i();
  for (auto _ : state)
    benchmark::DoNotOptimize(check_constraints(d, reference::kNBar, reference::kWindow, {}));
}
BENCHMARK(BM_CheckConstraints);

void BM_FieldOde(benchmark::State& state) {
  const auto d = reference::case_i();
  const auto drive = calibrated(d, {}, reference::kNBar);
  const double step = max_field_step(d, drive.omega_d(d));
  const auto grid = uniform_grid(0.0, reference::kWindow,
                                 static_cast<std::size_t>(std::ceil(reference::kWindow / step)));
  const PulseSchedule schedule{QubitState::ground, {0.0}};
  const Complex eps = drive.amplitude();
  for (auto _ : state)
    benchmark::DoNotOptimize(integrate_field_ode(d, drive, schedule, [eps](double) { return eps; }, grid));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.size()));
}
BENCHMARK(BM_FieldOde);

void BM_Sweep(benchmark::State& state) {
  DesignSpace space;
  space.base = {reference::case_i(), reference::kWindow, reference::kNBar};
  space.free.push_back({Variable::kappa, 1e6, 1e9, true, 0});
  space.free.push_back({Variable::g, 1e7, 1e9, true, 0});
  SweepOptions options;
  options.points_per_axis = static_cast<std::size_t>(state.range(0));
  options.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(sweep(space, options));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_Sweep)->Arg(16)->Arg(64);

void BM_GeneratorApply(benchmark::State& state) {
  const auto d = reference::weak_coupling();
  oracle::OracleConfig config;
  config.n_fock = static_cast<int>(state.range(0));
  config.dt = 1e-13;
  const auto gen = oracle::build_generator(d, calibrated(d, {}, 1.0), config);
  const auto rho = oracle::DensityMatrix::coherent(QubitState::excited, {0.8, 0.1}, config.n_fock);
  for (auto _ : state) benchmark::DoNotOptimize(gen.apply(0.5, rho.matrix()));
}
BENCHMARK(BM_GeneratorApply)->Arg(8)->Arg(12)->Arg(24);

}  // namespace

BENCHMARK_MAIN();
