#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "nonrecip/cmt.hpp"
#include "nonrecip/tuner.hpp"

using namespace nonrecip;

namespace {

ValidatedDevice circulator() {
    DeviceConfig cfg;
    cfg.modes = {ModeSpec{"a", 9.167e9, 44e6}, ModeSpec{"b", 5.241e9, 19e6}, ModeSpec{"c", 7.174e9, 50e6}};
    cfg.couplings = {{ModePair("a", "b"), ProcessKind::Conversion, 0.97, std::numbers::pi / 2},
                     {ModePair("b", "c"), ProcessKind::Conversion, 0.98, 0.0},
                     {ModePair("a", "c"), ProcessKind::Conversion, 0.99, 0.0}};
    return validate_device(cfg);
}

template <auto Fn>
void BM_Sweep(benchmark::State& state) {
    const auto dev = circulator();
    const auto grid = linear_grid(-30e6, 30e6, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(Fn(dev, grid));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Fn>
void BM_PhaseSweep(benchmark::State& state) {
    const auto dev = circulator();
    const auto phis = linear_grid(-std::numbers::pi, std::numbers::pi, static_cast<std::size_t>(state.range(0)));
    const auto deltas = linear_grid(-30e6, 30e6, 201);
    const std::vector<Channel> channels{{1, 1}, {1, 0}, {0, 1}};
    for (auto _ : state) benchmark::DoNotOptimize(Fn(dev, phis, deltas, channels));
    state.SetItemsProcessed(state.iterations() * state.range(0) * 201);
}

}  // namespace

BENCHMARK(BM_Sweep<sweep_serial>)->Arg(1201)->Arg(12001)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Sweep<sweep>)->Arg(1201)->Arg(12001)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_PhaseSweep<phase_sweep_serial>)->Arg(91)->Arg(361)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PhaseSweep<phase_sweep>)->Arg(91)->Arg(361)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
