#include <benchmark/benchmark.h>

#include "sumrange/family.hpp"
#include "sumrange/family_verify.hpp"
#include "sumrange/lemmas.hpp"
#include "sumrange/schedule.hpp"
#include "sumrange/trace.hpp"

using namespace sumrange;

static void BM_AddKadetsRow(benchmark::State& state)
{
    const Family k = build_kadets(static_cast<int>(state.range(0)));
    std::vector<StepFunction> terms;
    for (const TermId& id : k.ids()) terms.push_back(k.term(id));
    for (auto _ : state) {
        StepFunction acc = StepFunction::zero(k.domain());
        for (const StepFunction& f : terms) acc = acc + f;
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(terms.size()));
}
BENCHMARK(BM_AddKadetsRow)->Arg(4)->Arg(6);

static void BM_SigmaTrace(benchmark::State& state)
{
    const Family k = build_kadets(static_cast<int>(state.range(0)));
    const Schedule s = schedule_sigma(k);
    for (auto _ : state) {
        std::size_t rows = 0;
        run_trace(k, s, *s.target, 1, [&](const TraceRow&) { ++rows; });
        benchmark::DoNotOptimize(rows);
    }
}
BENCHMARK(BM_SigmaTrace)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

static void BM_VerifyKadets(benchmark::State& state)
{
    const Family k = build_kadets(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(verify_kadets(k).passed());
}
BENCHMARK(BM_VerifyKadets)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

static void BM_DivergentMarkers(benchmark::State& state)
{
    const Family t = build_three_kadets(static_cast<int>(state.range(0)));
    const Schedule s = schedule_divergent(t);
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_markers(t, s, *s.target).checkpoints.size());
}
BENCHMARK(BM_DivergentMarkers)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);

static void BM_L1Suite(benchmark::State& state)
{
    for (auto _ : state) benchmark::DoNotOptimize(run_l1_suite(static_cast<std::size_t>(state.range(0)), 7).passed());
}
BENCHMARK(BM_L1Suite)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
