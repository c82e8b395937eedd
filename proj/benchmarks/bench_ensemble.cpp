// Copyright 2026 The anderson-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "anderson/harness.hpp"

namespace {

using namespace anderson;

void run_trials(benchmark::State& state, EnsembleConfig c) {
  std::uint64_t index = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_trial(c, index++));
  state.SetItemsProcessed(static_cast<std::int64_t>(index));
}

void BM_MinamiTrial(benchmark::State& state) {
  EnsembleConfig c;
  c.sites = static_cast<int>(state.range(0));
  run_trials(state, c);
}
BENCHMARK(BM_MinamiTrial)->Arg(100)->Arg(200)->Unit(benchmark::kMicrosecond);

void BM_ChainTrial(benchmark::State& state) {
  EnsembleConfig c;
  c.kind = ExperimentKind::chain;
  c.sites = static_cast<int>(state.range(0));
  c.half_width = 0.1;
  run_trials(state, c);
}
BENCHMARK(BM_ChainTrial)->Arg(50)->Unit(benchmark::kMicrosecond);

void BM_Lemma2Trial(benchmark::State& state) {
  EnsembleConfig c;
  c.kind = ExperimentKind::lemma2;
  c.sites = 64;
  c.interval = std::pair{-1.0, 1.0};
  run_trials(state, c);
}
BENCHMARK(BM_Lemma2Trial)->Unit(benchmark::kMicrosecond);

}  // namespace
