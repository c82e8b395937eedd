// Copyright 2026 The anderson-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "anderson/eigensolver.hpp"
#include "anderson/minami.hpp"

namespace {

using namespace anderson;

SymmetricMatrix sample(int d, int n) {
  return sample_hamiltonian(BoxGeometry(d, n), PotentialSpec::uniform(-2.0, 2.0), 42, 0);
}

void BM_Eigenvalues1d(benchmark::State& state) {
  const auto h = sample(1, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(symmetric_eigenvalues(h));
}
BENCHMARK(BM_Eigenvalues1d)->Arg(50)->Arg(100)->Arg(200)->Arg(500)->Unit(benchmark::kMicrosecond);

void BM_EigenDecomposition1d(benchmark::State& state) {
  const auto h = sample(1, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(symmetric_eigen(h));
}
BENCHMARK(BM_EigenDecomposition1d)->Arg(50)->Arg(100)->Arg(200)->Arg(500)->Unit(benchmark::kMicrosecond);

void BM_Eigenvalues2d(benchmark::State& state) {
  const auto h = sample(2, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(symmetric_eigenvalues(h));
}
BENCHMARK(BM_Eigenvalues2d)->Arg(8)->Arg(12)->Arg(16)->Unit(benchmark::kMicrosecond);

}  // namespace
