#include <benchmark/benchmark.h>

#include "qdelay/delayperf.hpp"
#include "qdelay/linalg.hpp"

using namespace qdelay;

namespace {

SynthesisModel cavity_model() {
    return build_synthesis_model(preset_damped_cavity(0.5, 1.0), 1.98, 0.0);
}

void BM_expm(benchmark::State& state) {
    Mat a{{-0.5, 0.3}, {-0.7, -1.5}};
    for (auto _ : state) benchmark::DoNotOptimize(expm(a));
}
BENCHMARK(BM_expm);

void BM_synthesize(benchmark::State& state) {
    SynthesisModel m = cavity_model();
    for (auto _ : state) benchmark::DoNotOptimize(synthesize(m));
}
BENCHMARK(BM_synthesize);

void BM_delay_penalty_gramian(benchmark::State& state) {
    SynthesisModel m = cavity_model();
    GainSet g = synthesize(m);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            delay_penalty(g.f, m.a, g.l, 5.0, PenaltyMethod::Gramian));
}
BENCHMARK(BM_delay_penalty_gramian);

void BM_delay_penalty_quadrature(benchmark::State& state) {
    SynthesisModel m = cavity_model();
    GainSet g = synthesize(m);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            delay_penalty(g.f, m.a, g.l, 5.0, PenaltyMethod::Quadrature));
}
BENCHMARK(BM_delay_penalty_quadrature);

void BM_sweep_101(benchmark::State& state) {
    SynthesisModel m = cavity_model();
    GainSet g = synthesize(m);
    std::vector<double> grid = make_grid(0.0, 10.0, 0.1);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            sweep_delay(m, g, grid, PenaltyMethod::Gramian));
}
BENCHMARK(BM_sweep_101);

void BM_optimize_phi(benchmark::State& state) {
    PlantSpec plant = preset_damped_cavity(0.5, 1.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            optimize_phi(plant, default_c1(), default_d12(), 1.0));
}
BENCHMARK(BM_optimize_phi);

}  // namespace

BENCHMARK_MAIN();
