// Copyright 2026 the stdg authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#include <benchmark/benchmark.h>

#include <memory>

#include "stdg/evolution.hpp"
#include "stdg/problems.hpp"

namespace {

// Spatial operator assembly for the interval problem; range = cell count.
void BM_AssembleExample1(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(stdg::example1(n, 2));
  state.SetComplexityN(n);
}
BENCHMARK(BM_AssembleExample1)->Arg(96)->Arg(384)->Arg(1536)->Complexity();

// Spatial operator assembly for the square problem; range = cells per side.
void BM_AssembleExample2(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(stdg::example2(n, 2));
  state.SetComplexityN(n * n);
}
BENCHMARK(BM_AssembleExample2)->Arg(8)->Arg(16)->Arg(32)->Complexity();

// Full march over M slabs of the interval problem, coupled slab solver
// (one factorization of the (q+1)n block system, M back substitutions).
void BM_MarchCoupled1d(benchmark::State& state) {
  const int slabs = static_cast<int>(state.range(0));
  const int q = static_cast<int>(state.range(1));
  const stdg::DiscreteProblem prob = stdg::example1(96, q + 1);
  const stdg::TimeMesh tm = stdg::TimeMesh::uniform(prob.t_end(), slabs);
  for (auto _ : state)
    benchmark::DoNotOptimize(stdg::march(prob.evo(), tm, q, 2.0,
                                         stdg::Variant::weighted,
                                         stdg::SlabSolver::coupled));
}
BENCHMARK(BM_MarchCoupled1d)
    ->Args({96, 1})
    ->Args({384, 1})
    ->Args({96, 2})
    ->Args({384, 2});

// Same march through the diagonalized slab solver (one n x n factorization
// per temporal eigenvalue); this is the path large 2D meshes take.
void BM_MarchDiagonalized1d(benchmark::State& state) {
  const int slabs = static_cast<int>(state.range(0));
  const int q = static_cast<int>(state.range(1));
  const stdg::DiscreteProblem prob = stdg::example1(96, q + 1);
  const stdg::TimeMesh tm = stdg::TimeMesh::uniform(prob.t_end(), slabs);
  for (auto _ : state)
    benchmark::DoNotOptimize(stdg::march(prob.evo(), tm, q, 2.0,
                                         stdg::Variant::weighted,
                                         stdg::SlabSolver::diagonalized));
}
BENCHMARK(BM_MarchDiagonalized1d)
    ->Args({96, 1})
    ->Args({384, 1})
    ->Args({96, 2})
    ->Args({384, 2});

// 2D march at a mesh size where both slab strategies are feasible, to keep
// the automatic-switch tradeoff visible over time.
void BM_March2d(benchmark::State& state) {
  const bool diagonalized = state.range(0) != 0;
  const stdg::DiscreteProblem prob = stdg::example2(16, 2);
  const stdg::TimeMesh tm = stdg::TimeMesh::uniform(prob.t_end(), 8);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        stdg::march(prob.evo(), tm, 1, 1.0, stdg::Variant::transformed,
                    diagonalized ? stdg::SlabSolver::diagonalized
                                 : stdg::SlabSolver::coupled));
}
BENCHMARK(BM_March2d)->Arg(0)->Arg(1);

}  // namespace
