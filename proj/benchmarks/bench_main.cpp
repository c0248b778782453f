#include "fbheat/evolve.hpp"
#include "fbheat/kernelfit.hpp"
#include "fbheat/mollify.hpp"
#include "fbheat/nashlab.hpp"
#include "fbheat/quadform.hpp"

#include <benchmark/benchmark.h>

using namespace fbheat;

namespace {

ParabolicProblem problem(DriftField b) {
  return {make_matrix(MatrixKind::Identity, {}), std::move(b), Variant::Lambda, 2.0, {}, {}, {}};
}

SolverConfig radial(int points) {
  SolverConfig cfg;
  cfg.grid = GridSpec::radial(3, 12.0, points);
  return cfg;
}

std::vector<double> taus() { return {0.25, 0.5, 0.75, 1.0}; }

void BM_AssembleRadial(benchmark::State& state) {
  const auto pb = problem(hardy_drift(3, 1.0, HardySign::Attracting));
  const auto mesh = make_mesh(GridSpec::radial(3, 12.0, static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(assemble(pb, mesh));
}
BENCHMARK(BM_AssembleRadial)->Arg(1024)->Arg(4096);

void BM_AssembleCartesian(benchmark::State& state) {
  const auto pb = problem(tanh_drift(3, 1.0));
  const auto mesh = make_mesh(GridSpec::cartesian(3, 4.0, static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(assemble(pb, mesh));
  state.SetItemsProcessed(state.iterations() * mesh->size());
}
BENCHMARK(BM_AssembleCartesian)->Arg(24)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_KernelSeriesRadial(benchmark::State& state) {
  const auto pb = problem(hardy_drift(3, 0.25, HardySign::Attracting));
  const auto cfg = radial(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_kernel_series(pb, 0.0, taus(), Vec::Zero(3), cfg));
}
BENCHMARK(BM_KernelSeriesRadial)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_KernelCartesian(benchmark::State& state) {
  const auto pb = problem(tanh_drift(3, 1.0));
  SolverConfig cfg;
  cfg.grid = GridSpec::cartesian(3, 1.25 * suggest_box_half_width(pb, 0.25), static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_kernel(pb, 0.0, 0.25, Vec::Zero(3), cfg));
}
BENCHMARK(BM_KernelCartesian)->Arg(32)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_FormBoundHardy(benchmark::State& state) {
  const auto b = hardy_drift(3, 1.0, HardySign::Attracting);
  FormBoundOptions opt;
  opt.levels = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_form_bound(b, 0.0, GridSpec::radial(3, 1.0, 512), opt));
}
BENCHMARK(BM_FormBoundHardy)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_KatoBall(benchmark::State& state) {
  const auto v = indicator_ball(3);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_kato_norm(v, 0.0, GridSpec::radial(3, 2.0, 1024)));
}
BENCHMARK(BM_KatoBall)->Unit(benchmark::kMillisecond);

void BM_MollifyCartesian(benchmark::State& state) {
  const auto b = tanh_drift(3, 1.0);
  const auto grid = GridSpec::cartesian(3, 3.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(mollify(b, 0.05, grid));
}
BENCHMARK(BM_MollifyCartesian)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_FitAndNash(benchmark::State& state) {
  const auto series = estimate_kernel_series(problem(zero_drift(3)), 0.0, taus(), Vec::Zero(3), radial(1024));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_bound(series, Side::Upper, 1.0, 1.0));
    benchmark::DoNotOptimize(nash_diagnostics(series, 1.875));
  }
}
BENCHMARK(BM_FitAndNash)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
