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

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include <gtest/gtest.h>

#include "dflsim/aggregation.hpp"
#include "dflsim/errors.hpp"
#include "dflsim/rng.hpp"
#include "oracles/aggregation_oracle.hpp"

namespace dflsim {
namespace {

// Owns the vectors behind an AggregationInput. Client ids are 0..m-1 and the
// own model is `own`; received entries are supplied in a shuffled order.
struct View {
  std::vector<ParamVector> vectors;
  std::size_t own = 0;

  AggregationInput input(std::uint64_t shuffle_seed = 0) const {
    std::vector<Contribution> received;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      if (i != own) received.push_back({i, vectors[i]});
    }
    Rng(shuffle_seed).shuffle(received.begin(), received.end());
    return AggregationInput(own, vectors[own], std::move(received));
  }
};

View random_view(std::size_t m, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  View v;
  v.own = rng.below(m);
  v.vectors.assign(m, ParamVector(d));
  for (auto& x : v.vectors) {
    for (double& c : x) c = rng.normal() * 3.0;
  }
  return v;
}

TEST(Input, RejectsMismatchAndDuplicates) {
  const ParamVector a{1.0, 2.0}, b{1.0};
  EXPECT_THROW(AggregationInput(0, a, {{1, b}}), InvalidInputError);
  EXPECT_THROW(AggregationInput(0, a, {{0, a}}), InvalidInputError);
  EXPECT_THROW(AggregationInput(0, a, {{1, a}, {1, a}}), InvalidInputError);
  const AggregationInput in(2, a, {{5, a}, {1, a}});
  EXPECT_EQ(in.members()[0].client_id, 1u);
  EXPECT_EQ(in.members()[1].client_id, 2u);
  EXPECT_EQ(in.members()[2].client_id, 5u);
}

TEST(FedAvg, HandExamples) {
  const ParamVector own{1.0, 1.0}, other{3.0, 3.0};
  EXPECT_EQ(fed_avg(AggregationInput(0, own, {{2, other}})), (ParamVector{2.0, 2.0}));
  EXPECT_EQ(fed_avg(AggregationInput(0, own)), own);
}

TEST(Median, HandExamples) {
  const ParamVector a{1.0}, b{2.0}, c{100.0}, d{3.0};
  EXPECT_EQ(coordinate_median(AggregationInput(0, a, {{1, b}, {2, c}})), ParamVector{2.0});
  EXPECT_EQ(coordinate_median(AggregationInput(0, a, {{1, d}})), ParamVector{2.0});
}

TEST(TrimmedMean, HandExamples) {
  const ParamVector a{0.0}, b{5.0}, c{100.0};
  EXPECT_EQ(trimmed_mean(AggregationInput(0, a, {{1, b}, {2, c}}), 0.34), ParamVector{5.0});
  EXPECT_THROW(trimmed_mean(AggregationInput(0, a, {{1, b}}), 0.5), InvalidInputError);
  EXPECT_THROW(trimmed_mean(AggregationInput(0, a), -0.1), InvalidInputError);
}

TEST(Krum, HandExamples) {
  const ParamVector same{1.0, 2.0};
  const AggregationInput identical(3, same, {{1, same}, {4, same}, {0, same}, {2, same}});
  EXPECT_EQ(krum_select(identical), 0u);  // lowest id wins ties
  EXPECT_EQ(krum(AggregationInput(0, same)), same);
  // m = 3 with f = 1 leaves c = 0 neighbors.
  EXPECT_THROW(krum(AggregationInput(0, same, {{1, same}, {2, same}}), 1), InvalidInputError);
  // Automatic f on m = 2: f = 0, c clamps to 1.
  const ParamVector other{5.0, 5.0};
  EXPECT_EQ(krum(AggregationInput(1, same, {{0, other}})), other);
}

TEST(Aggregation, MatchBruteForceOnSeededInputs) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const std::size_t m = 1 + seed % 9, d = 1 + (seed * 7) % 20;
    const View v = random_view(m, d, seed);
    const auto in = v.input(seed + 1);
    const auto ref = oracle::brute_force(v.vectors);
    const auto mean = fed_avg(in);
    const auto med = coordinate_median(in);
    const auto trim = trimmed_mean(in, 0.2);
    for (std::size_t j = 0; j < d; ++j) {
      ASSERT_NEAR(mean[j], ref.mean(j), 1e-12);
      ASSERT_NEAR(med[j], ref.median(j), 1e-12);
      ASSERT_NEAR(trim[j], ref.trimmed(j, 0.2), 1e-12);
    }
    ASSERT_EQ(krum(in), v.vectors[ref.krum(std::nullopt)]) << "seed " << seed;
    if (m >= 4) {
      ASSERT_EQ(krum(in, 1), v.vectors[ref.krum(1)]) << "seed " << seed;
    }
  }
}

TEST(Aggregation, PermutationInvariant) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const View v = random_view(7, 5, seed);
    for (auto kind : {AggregationKind::kFedAvg, AggregationKind::kMedian, AggregationKind::kTrimmedMean,
                      AggregationKind::kKrum}) {
      AggregationSpec spec;
      spec.kind = kind;
      const auto r = make_aggregation(spec);
      ASSERT_EQ(r->aggregate(v.input(1)), r->aggregate(v.input(99)));
    }
  }
}

TEST(Aggregation, RobustRulesStayInsideInputRange) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const View v = random_view(2 + seed % 8, 6, seed);
    const auto in = v.input();
    const auto med = coordinate_median(in);
    const auto trim = trimmed_mean(in, 0.3);
    for (std::size_t j = 0; j < 6; ++j) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (const auto& x : v.vectors) {
        lo = std::min(lo, x[j]);
        hi = std::max(hi, x[j]);
      }
      ASSERT_GE(med[j], lo);
      ASSERT_LE(med[j], hi);
      ASSERT_GE(trim[j], lo);
      ASSERT_LE(trim[j], hi);
    }
    const auto k = krum(in);
    ASSERT_NE(std::find(v.vectors.begin(), v.vectors.end(), k), v.vectors.end());
  }
}

TEST(Aggregation, ZeroTrimEqualsFedAvgExactly) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const View v = random_view(1 + seed % 9, 4, seed);
    ASSERT_EQ(trimmed_mean(v.input(), 0.0), fed_avg(v.input()));
  }
}

TEST(Aggregation, SingleInputUnchanged) {
  const ParamVector x{0.25, -3.0, 7.5};
  const AggregationInput in(4, x);
  EXPECT_EQ(fed_avg(in), x);
  EXPECT_EQ(coordinate_median(in), x);
  EXPECT_EQ(trimmed_mean(in, 0.4), x);
  EXPECT_EQ(krum(in), x);
}

TEST(Krum, NeverSelectsPlantedOutlier) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    View v;
    v.own = rng.below(5);
    const std::size_t outlier = rng.below(5);
    for (std::size_t i = 0; i < 5; ++i) {
      ParamVector x(6);
      for (double& c : x) c = rng.normal() * 0.1 + (i == outlier ? 100.0 : 0.0);
      v.vectors.push_back(x);
    }
    ASSERT_NE(krum_select(v.input(seed), 1), outlier) << "seed " << seed;
  }
}

TEST(Aggregation, Names) {
  for (auto k : {AggregationKind::kFedAvg, AggregationKind::kKrum, AggregationKind::kTrimmedMean,
                 AggregationKind::kMedian}) {
    EXPECT_EQ(parse_aggregation(to_string(k)), k);
    AggregationSpec spec;
    spec.kind = k;
    EXPECT_EQ(make_aggregation(spec)->name(), to_string(k));
  }
  EXPECT_THROW(parse_aggregation("bulyan"), InvalidInputError);
}

}  // namespace
}  // namespace dflsim
