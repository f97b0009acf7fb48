// OpenMP kernels against their serial references.

#include <benchmark/benchmark.h>

#include "flockpp/lowerbound.hpp"
#include "flockpp/protocols.hpp"
#include "flockpp/sim.hpp"
#include "flockpp/verify.hpp"

using namespace flockpp;

namespace {

void BM_VerifyRange(benchmark::State& state) {
    const auto d = static_cast<std::uint64_t>(state.range(0));
    const Protocol p = build_best(d);
    for (auto _ : state) benchmark::DoNotOptimize(verify_range(p, d, 1, d + 3));
}

void BM_VerifyRangeSerial(benchmark::State& state) {
    const auto d = static_cast<std::uint64_t>(state.range(0));
    const Protocol p = build_best(d);
    for (auto _ : state) benchmark::DoNotOptimize(verify_range_serial(p, d, 1, d + 3));
}

void BM_ComputeF(benchmark::State& state) {
    const auto d = static_cast<std::uint64_t>(state.range(0));
    const Protocol p = build_best(d);
    for (auto _ : state) benchmark::DoNotOptimize(compute_f(p, d + 2));
}

void BM_ComputeFSerial(benchmark::State& state) {
    const auto d = static_cast<std::uint64_t>(state.range(0));
    const Protocol p = build_best(d);
    for (auto _ : state) benchmark::DoNotOptimize(compute_f_serial(p, d + 2));
}

void BM_RunBatch(benchmark::State& state) {
    const Protocol p = build_protocol_b(7);
    const auto seeds = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(run_batch(p, 10, 0, seeds));
}

void BM_RunBatchSerial(benchmark::State& state) {
    const Protocol p = build_protocol_b(7);
    const auto seeds = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(run_batch_serial(p, 10, 0, seeds));
}

}  // namespace

BENCHMARK(BM_VerifyRange)->Arg(11)->Arg(20)->Arg(33)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VerifyRangeSerial)->Arg(11)->Arg(20)->Arg(33)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ComputeF)->Arg(11)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ComputeFSerial)->Arg(11)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RunBatch)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RunBatchSerial)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
