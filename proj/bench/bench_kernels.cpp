// Serial reference vs OpenMP path for each enumeration kernel.

#include <benchmark/benchmark.h>

#include "models.hpp"
#include "tpc/kernels.hpp"
#include "tpc/sem.hpp"

using namespace tpc;
using kernels::Execution;

namespace {

Execution mode(const benchmark::State& state) { return state.range(1) ? Execution::parallel : Execution::serial; }

void label(benchmark::State& state) {
  state.SetLabel(state.range(1) ? "parallel" : "serial");
  state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << state.range(0)));
}

void truth_table(benchmark::State& state) {
  testing::Rng rng(1);
  const auto u = testing::numbered_universe(static_cast<std::size_t>(state.range(0)));
  const auto f = testing::random_formula(rng, u, 8);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::truth_table(f, u.vars(), mode(state)));
  label(state);
}

void psdd_joint_table(benchmark::State& state) {
  testing::Rng rng(2);
  const auto m = testing::random_psdd(rng, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::psdd_joint_table(m, mode(state)));
  label(state);
}

void push_forward(benchmark::State& state) {
  testing::Rng rng(3);
  const auto c = testing::random_compilation(rng, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::push_forward(c.sem, mode(state)));
  label(state);
}

void evidence_weights(benchmark::State& state) {
  testing::Rng rng(4);
  const auto c = testing::random_compilation(rng, static_cast<std::size_t>(state.range(0)));
  const Assignment evidence{{c.sem.universe().at(c.root_name), true}};
  for (auto _ : state) benchmark::DoNotOptimize(kernels::evidence_weights(c.sem, evidence, mode(state)));
  label(state);
}

}  // namespace

BENCHMARK(truth_table)->ArgsProduct({{12, 16, 20}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(psdd_joint_table)->ArgsProduct({{10, 12, 14}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(push_forward)->ArgsProduct({{10, 14}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(evidence_weights)->ArgsProduct({{10, 14}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
