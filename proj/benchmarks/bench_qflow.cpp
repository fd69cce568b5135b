// SPDX-License-Identifier: Apache-2.0
#include "qflow/metrics/metrics.hpp"
#include "qflow/qasm/binary.hpp"
#include "qflow/qasm/parser.hpp"
#include "qflow/qasm/printer.hpp"
#include "qflow/sim/run.hpp"
#include "qflow/transpile/transpile.hpp"

#include "support/corpus.hpp"
#include "support/devices.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace qflow;

void BM_Parse(benchmark::State& state) {
    const std::string text = qasm::print_qasm(testing::random_circuit(16, static_cast<std::size_t>(state.range(0)), 1));
    for (auto _ : state) benchmark::DoNotOptimize(qasm::parse_qasm(text));
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_Parse)->Arg(1000)->Arg(10000);

void BM_EncodeBinary(benchmark::State& state) {
    const auto c = testing::random_circuit(16, 10000, 2);
    for (auto _ : state) benchmark::DoNotOptimize(qasm::encode_binary(c));
}
BENCHMARK(BM_EncodeBinary);

void BM_Analyze(benchmark::State& state) {
    const auto c = testing::random_circuit(32, 20000, 3);
    for (auto _ : state) benchmark::DoNotOptimize(metrics::analyze(c));
}
BENCHMARK(BM_Analyze);

void BM_TranspileGrid(benchmark::State& state) {
    const auto side = static_cast<std::uint32_t>(state.range(0));
    const auto device = testing::grid_device(side, side);
    const auto c = testing::lattice_circuit(side * side, side, static_cast<std::size_t>(state.range(1)), 4);
    for (auto _ : state) benchmark::DoNotOptimize(transpile::transpile(c, device));
}
BENCHMARK(BM_TranspileGrid)->Args({5, 2000})->Args({10, 20000})->Unit(benchmark::kMillisecond);

void BM_StateVector(benchmark::State& state) {
    const auto n = static_cast<std::uint32_t>(state.range(0));
    const auto c = testing::random_circuit(n, 200, 5);
    for (auto _ : state) benchmark::DoNotOptimize(sim::sv_final_state(c));
}
BENCHMARK(BM_StateVector)->Arg(10)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_DensityMatrix(benchmark::State& state) {
    const auto n = static_cast<std::uint32_t>(state.range(0));
    const auto c = testing::random_circuit(n, 100, 6);
    for (auto _ : state) benchmark::DoNotOptimize(sim::dm_final_state(c, nullptr));
}
BENCHMARK(BM_DensityMatrix)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_Stabilizer(benchmark::State& state) {
    const auto n = static_cast<std::uint32_t>(state.range(0));
    auto c = testing::random_clifford(n, 10 * n, 7);
    testing::measure_all(c);
    sim::RunOptions o;
    o.shots = 16;
    for (auto _ : state) benchmark::DoNotOptimize(sim::stab_run(c, o));
}
BENCHMARK(BM_Stabilizer)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
