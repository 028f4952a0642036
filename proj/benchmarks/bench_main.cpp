#include <benchmark/benchmark.h>

#include "uplan/catalog.hpp"
#include "uplan/digits.hpp"
#include "uplan/gridworld.hpp"
#include "uplan/learner.hpp"
#include "uplan/pi_base4.hpp"
#include "uplan/scalefree.hpp"

using namespace uplan;

static void BM_ChampernowneDigit(benchmark::State& state) {
  std::uint64_t n = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(champernowne_digit(4, n));
    n = n * 6364136223846793005ull + 1442695040888963407ull;
    n = (n >> 20) + 1;
  }
}
BENCHMARK(BM_ChampernowneDigit);

static void BM_CursorThroughput(benchmark::State& state) {
  const DigitStream stream = state.range(0) == 0 ? DigitStream::champernowne(4) : DigitStream::pseudorandom(7, 4);
  for (auto _ : state) {
    DigitCursor cursor(stream, 1);
    unsigned sum = 0;
    for (int i = 0; i < 1 << 16; ++i) sum += cursor.next();
    benchmark::DoNotOptimize(sum);
  }
  state.SetItemsProcessed(state.iterations() * (1 << 16));
}
BENCHMARK(BM_CursorThroughput)->Arg(0)->Arg(1);

static void BM_ComputePi(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(compute_pi_base4(static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_ComputePi)->Arg(10'000)->Arg(100'000)->Unit(benchmark::kMillisecond);

static void BM_RunPlan(benchmark::State& state) {
  const GridEnv env = comparison_grid();
  const DigitStream stream = DigitStream::pseudorandom(3, 4);
  for (auto _ : state) benchmark::DoNotOptimize(run_plan(env, stream, ActionMap(), 1, 1'000'000));
  state.SetItemsProcessed(state.iterations() * 1'000'000);
}
BENCHMARK(BM_RunPlan)->Unit(benchmark::kMillisecond);

static void BM_ScalefreeSummary(benchmark::State& state) {
  const ContinuousEnv env = random_disc_world(DiscWorldSpec{}, 1);
  const DigitStream stream = DigitStream::pseudorandom(5, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(execute_scalefree(env, env.starts()[0], stream, ActionMap(), Rational(1), 1, 20'000,
                                               TraceDetail::kSummary));
  }
}
BENCHMARK(BM_ScalefreeSummary)->Unit(benchmark::kMillisecond);

static void BM_Learner(benchmark::State& state) {
  const GridEnv env = generate_polyomino(12, 5);
  const DigitStream stream = DigitStream::champernowne(4);
  for (auto _ : state) benchmark::DoNotOptimize(learn_optimal(env, stream, ActionMap(), 1, 1'000'000));
}
BENCHMARK(BM_Learner)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
