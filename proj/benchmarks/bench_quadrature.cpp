// Copyright 2026 the stdg authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#include <benchmark/benchmark.h>

#include "stdg/quadrature.hpp"

namespace {

// Cold construction cost of a weighted rule (the cache is bypassed by
// sweeping sigma through values that differ beyond the cache resolution).
void BM_BuildWeightedRadau(benchmark::State& state) {
  const int q = static_cast<int>(state.range(0));
  double sigma = 0.1;
  for (auto _ : state) {
    sigma += 1e-9;
    if (sigma > 9.0) sigma = 0.1;
    benchmark::DoNotOptimize(stdg::build_weighted_radau(q, sigma));
  }
}
BENCHMARK(BM_BuildWeightedRadau)->Arg(1)->Arg(2)->Arg(5)->Arg(10);

void BM_CachedRuleLookup(benchmark::State& state) {
  (void)stdg::build_weighted_radau(2, 0.5);
  for (auto _ : state)
    benchmark::DoNotOptimize(stdg::build_weighted_radau(2, 0.5));
}
BENCHMARK(BM_CachedRuleLookup);

void BM_LagrangeEval(benchmark::State& state) {
  const int q = static_cast<int>(state.range(0));
  stdg::LagrangeBasis basis(stdg::build_weighted_radau(q, 0.0));
  std::vector<double> out(q + 1);
  double s = 0.0;
  for (auto _ : state) {
    s += 1e-6;
    if (s > 1.0) s = 0.0;
    basis.values(s, out.data());
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_LagrangeEval)->Arg(1)->Arg(2)->Arg(4);

}  // namespace
