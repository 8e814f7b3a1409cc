/*
 * Copyright 2026 The dflsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "dflsim/aggregation.hpp"
#include "dflsim/attacks.hpp"
#include "dflsim/data.hpp"
#include "dflsim/linalg.hpp"
#include "dflsim/nn.hpp"
#include "dflsim/rng.hpp"

namespace {

using namespace dflsim;

std::vector<ParamVector> columns(std::size_t d, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ParamVector> cols(n, ParamVector(d));
  for (auto& c : cols) {
    for (double& x : c) x = rng.normal();
  }
  return cols;
}

// d matches the default 8-32-16-3 network's parameter count.
constexpr std::size_t kModelParams = (8 * 32 + 32) + (32 * 16 + 16) + (16 * 3 + 3);

void BM_Dmpa(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const AttackContext ctx{UpdateMatrix::from_columns(columns(kModelParams, n, 1)), 10, n, 1};
  for (auto _ : state) benchmark::DoNotOptimize(dmpa(ctx));
}
BENCHMARK(BM_Dmpa)->Arg(2)->Arg(4)->Arg(8);

void BM_MinMax(benchmark::State& state) {
  const AttackContext ctx{UpdateMatrix::from_columns(columns(kModelParams, 4, 2)), 10, 4, 1};
  for (auto _ : state) benchmark::DoNotOptimize(min_max_search(ctx));
}
BENCHMARK(BM_MinMax);

void BM_Jacobi(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto u = UpdateMatrix::from_columns(columns(n + 3, n, 3));
  const Matrix y = correlation_from_covariance(*client_covariance(center(u, column_mean(u)))).values;
  for (auto _ : state) benchmark::DoNotOptimize(principal_eigenpair(y));
}
BENCHMARK(BM_Jacobi)->Arg(4)->Arg(8)->Arg(16);

void BM_Aggregate(benchmark::State& state) {
  const auto kind = static_cast<AggregationKind>(state.range(0));
  const auto v = columns(kModelParams, 10, 4);
  std::vector<Contribution> received;
  for (std::size_t i = 1; i < v.size(); ++i) received.push_back({i, v[i]});
  const AggregationInput in(0, v[0], std::move(received));
  const auto rule = make_aggregation({kind});
  state.SetLabel(std::string(to_string(kind)));
  for (auto _ : state) benchmark::DoNotOptimize(rule->aggregate(in));
}
BENCHMARK(BM_Aggregate)
    ->Arg(static_cast<int>(AggregationKind::kFedAvg))
    ->Arg(static_cast<int>(AggregationKind::kMedian))
    ->Arg(static_cast<int>(AggregationKind::kTrimmedMean))
    ->Arg(static_cast<int>(AggregationKind::kKrum));

void BM_LocalTrain(benchmark::State& state) {
  const Dataset data = synth_blobs(3, 90, 8, 0.5, 5);
  const ModelSpec spec{{8, 32, 16, 3}};
  const auto params = init_params(spec, 6);
  const auto plan = partition_iid(data, 1, 7);
  TrainConfig cfg;
  cfg.local_epochs = 3;
  for (auto _ : state) benchmark::DoNotOptimize(local_train(params, spec, data, plan.shards[0], cfg, 1));
}
BENCHMARK(BM_LocalTrain);

}  // namespace

BENCHMARK_MAIN();
