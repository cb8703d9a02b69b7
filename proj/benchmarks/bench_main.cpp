#include <benchmark/benchmark.h>

#include "chaosbandit/analysis.hpp"
#include "chaosbandit/bandit.hpp"
#include "chaosbandit/experiment.hpp"
#include "chaosbandit/signal.hpp"
#include "chaosbandit/threshold_tree.hpp"

using namespace chaosbandit;

namespace {

SignalSeries ar_series(std::size_t n) {
  SourceSpec s;
  s.kind = SourceKind::kArSurrogate;
  s.length = n;
  s.seed = 11;
  return make_series(s);
}

}  // namespace

static void BM_DecideUpdate(benchmark::State& state) {
  const int depth = static_cast<int>(state.range(0));
  const auto series = ar_series(1 << 20);
  const auto samples = series.samples();
  ThresholdTree tree(depth);
  const SamplingPlan plan;
  RewardStream rewards(canonical_problem(std::size_t{1} << depth), 0);
  DecisionRecord rec;
  std::size_t pos = 0;
  const std::size_t stride = plan.stride(depth);
  for (auto _ : state) {
    if (pos + stride > samples.size()) pos = 0;
    tree.decide_into(samples, pos, plan, rec);
    rec.reward = rewards.play(rec.machine);
    tree.update(rec);
    pos += stride;
  }
  benchmark::DoNotOptimize(tree.total_plays());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_DecideUpdate)->DenseRange(1, 6);

static void BM_RunExperiment(benchmark::State& state) {
  ExperimentSpec spec;
  spec.problem = canonical_problem(static_cast<std::size_t>(state.range(0)));
  spec.source.kind = SourceKind::kArSurrogate;
  spec.plays = 500;
  spec.repetitions = 200;
  spec.jobs = 1;
  const auto series = experiment_series(spec);
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(spec, series).cdr.back());
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(spec.plays * spec.repetitions));
}
BENCHMARK(BM_RunExperiment)->Arg(2)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_Etmsd(benchmark::State& state) {
  const std::size_t walks = 20, horizon = 100'000;
  const auto ens = build_ensemble(ar_series(walks * horizon), walks, horizon, 3);
  const std::vector<std::size_t> taus{1, 10, 100, 1000, 10'000};
  for (auto _ : state) benchmark::DoNotOptimize(etmsd(ens, taus));
}
BENCHMARK(BM_Etmsd)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
