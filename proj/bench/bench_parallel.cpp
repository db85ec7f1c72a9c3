#include "fhq/oracle.hpp"
#include "fhq/quantizer.hpp"
#include "fhq/simulation.hpp"

#include <benchmark/benchmark.h>

namespace {

void BM_BussgangSerial(benchmark::State& state) {
    const auto cb = fhq::design_lloyd_max(3);
    fhq::BussgangSetup setup;
    setup.sample_count = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(fhq::bussgang_check_serial(cb, setup));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BussgangSerial)->Arg(1 << 18)->Arg(1 << 20)->Unit(benchmark::kMillisecond);

void BM_BussgangParallel(benchmark::State& state) {
    const auto cb = fhq::design_lloyd_max(3);
    fhq::BussgangSetup setup;
    setup.sample_count = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(fhq::bussgang_check(cb, setup));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BussgangParallel)->Arg(1 << 18)->Arg(1 << 20)->Unit(benchmark::kMillisecond);

fhq::SweepConfig bench_sweep() {
    fhq::SweepConfig c;
    c.realizations = 8;
    c.bit_budgets = {16, 64, 160};
    c.schemes = {fhq::Scheme::Ideal, fhq::Scheme::JBP, fhq::Scheme::UB, fhq::Scheme::UnawareWF};
    c.record_timing = false;
    return c;
}

void BM_SweepSerial(benchmark::State& state) {
    const auto c = bench_sweep();
    for (auto _ : state) benchmark::DoNotOptimize(fhq::run_sweep_serial(c));
}
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);

void BM_SweepParallel(benchmark::State& state) {
    const auto c = bench_sweep();
    for (auto _ : state) benchmark::DoNotOptimize(fhq::run_sweep(c));
}
BENCHMARK(BM_SweepParallel)->Unit(benchmark::kMillisecond);

fhq::AllocationProblem oracle_problem() {
    fhq::AllocationProblem p;
    p.singulars = {4.0, 2.0, 1.5, 1.0};
    p.power = 3.0;
    p.bit_budget = 12;
    return p;
}

void BM_OracleSerial(benchmark::State& state) {
    const auto p = oracle_problem();
    for (auto _ : state) benchmark::DoNotOptimize(fhq::brute_force_alloc_serial(p, 20));
}
BENCHMARK(BM_OracleSerial)->Unit(benchmark::kMillisecond);

void BM_OracleParallel(benchmark::State& state) {
    const auto p = oracle_problem();
    for (auto _ : state) benchmark::DoNotOptimize(fhq::brute_force_alloc(p, 20));
}
BENCHMARK(BM_OracleParallel)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
