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
#include <memory>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "dflsim/engine.hpp"
#include "dflsim/errors.hpp"

namespace dflsim {
namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.clients = 6;
  cfg.rounds = 3;
  cfg.hidden_layers = {8};
  cfg.train.batch_size = 16;
  cfg.train.local_epochs = 1;
  cfg.dataset = BlobsSource{3, 40, 20, 5, 0.5, 4};
  cfg.seed = 21;
  return cfg;
}

bool same_records(const ExperimentResult& a, const ExperimentResult& b) {
  if (a.rounds.size() != b.rounds.size()) return false;
  for (std::size_t r = 0; r < a.rounds.size(); ++r) {
    const auto& x = a.rounds[r];
    const auto& y = b.rounds[r];
    if (x.round != y.round || x.mean_benign_f1 != y.mean_benign_f1) return false;
    for (std::size_t k = 0; k < x.per_client.size(); ++k) {
      const auto& p = x.per_client[k];
      const auto& q = y.per_client[k];
      if (p.id != q.id || p.role != q.role || p.loss != q.loss || p.accuracy != q.accuracy ||
          p.macro_f1 != q.macro_f1) {
        return false;
      }
    }
  }
  return a.summary.final_mean_benign_f1 == b.summary.final_mean_benign_f1;
}

TEST(Roles, CountsAndDeterminism) {
  ExperimentConfig cfg;
  cfg.malicious_fraction = 0.0;
  auto roles = assign_roles(cfg);
  EXPECT_EQ(std::count(roles.begin(), roles.end(), Role::kMalicious), 0);
  cfg.malicious_fraction = 0.4;
  roles = assign_roles(cfg);
  EXPECT_EQ(std::count(roles.begin(), roles.end(), Role::kMalicious), 4);
  EXPECT_EQ(assign_roles(cfg), roles);
  cfg.seed = 2;
  bool differs = false;
  for (std::uint64_t s = 2; s < 10 && !differs; ++s) {
    cfg.seed = s;
    differs = assign_roles(cfg) != roles;
  }
  EXPECT_TRUE(differs);
}

TEST(Roles, ExcludeHubOnStar) {
  ExperimentConfig cfg;
  cfg.topology = TopologyKind::kStar;
  cfg.role_policy = RolePolicy::kExcludeHub;
  cfg.malicious_fraction = 0.5;
  for (std::uint64_t s = 0; s < 30; ++s) {
    cfg.seed = s;
    const auto roles = assign_roles(cfg);
    EXPECT_EQ(roles[0], Role::kBenign);
    EXPECT_EQ(std::count(roles.begin(), roles.end(), Role::kMalicious), 5);
  }
}

TEST(Config, Validation) {
  ExperimentConfig cfg;
  cfg.malicious_fraction = 1.0;
  EXPECT_THROW(cfg.validate(), InvalidInputError);
  cfg.malicious_fraction = 0.96;  // rounds to 10 of 10
  EXPECT_THROW(cfg.validate(), InvalidInputError);
  cfg.malicious_fraction = 0.94;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.malicious_count(), 9u);
  cfg.train.batch_size = 0;
  EXPECT_THROW(cfg.validate(), InvalidInputError);
}

TEST(Simulation, FullyFedAvgNoAttackSynchronizes) {
  auto cfg = small_config();
  auto data = std::make_shared<const ExperimentData>(load_experiment_data(cfg.dataset, cfg.seed));
  Simulation sim(cfg, data);
  sim.run_round();
  for (const auto& c : sim.clients()) EXPECT_EQ(c.params, sim.clients()[0].params);
}

TEST(Simulation, OneHopAggregationSizes) {
  auto cfg = small_config();
  cfg.clients = 5;
  auto data = std::make_shared<const ExperimentData>(load_experiment_data(cfg.dataset, cfg.seed));
  for (auto kind : {TopologyKind::kFully, TopologyKind::kRing, TopologyKind::kStar}) {
    cfg.topology = kind;
    cfg.malicious_fraction = 0.4;
    cfg.attack.kind = AttackKind::kDmpa;
    Simulation sim(cfg, data);
    for (int r = 0; r < 2; ++r) {
      sim.run_round();
      for (std::size_t k = 0; k < 5; ++k) {
        EXPECT_EQ(sim.last_aggregation_sizes()[k], 1 + sim.graph().degree(k));
      }
    }
    if (kind == TopologyKind::kRing) {
      EXPECT_EQ(sim.last_aggregation_sizes()[0], 3u);
    }
  }
}

TEST(Simulation, MaliciousBroadcastIsThePoison) {
  auto cfg = small_config();
  cfg.malicious_fraction = 0.5;
  cfg.attack.kind = AttackKind::kLie;
  auto data = std::make_shared<const ExperimentData>(load_experiment_data(cfg.dataset, cfg.seed));
  Simulation sim(cfg, data);
  sim.run_round();
  std::vector<std::size_t> bad;
  for (const auto& c : sim.clients()) {
    if (c.role == Role::kMalicious) bad.push_back(c.id);
  }
  ASSERT_EQ(bad.size(), 3u);
  for (std::size_t k : bad) EXPECT_EQ(sim.last_broadcasts()[k], sim.last_broadcasts()[bad[0]]);
}

TEST(Simulation, ZeroLearningRateConservesParameters) {
  auto cfg = small_config();
  cfg.train.learning_rate = 0.0;
  auto data = std::make_shared<const ExperimentData>(load_experiment_data(cfg.dataset, cfg.seed));
  for (auto kind : {TopologyKind::kFully, TopologyKind::kRing, TopologyKind::kStar}) {
    cfg.topology = kind;
    Simulation sim(cfg, data);
    const auto initial = sim.clients()[0].params;
    for (int r = 0; r < 3; ++r) sim.run_round();
    for (const auto& c : sim.clients()) EXPECT_EQ(c.params, initial);
  }
}

TEST(Experiment, ZeroRoundsGiveInitialSummary) {
  auto cfg = small_config();
  cfg.rounds = 0;
  const auto r = run_experiment(cfg);
  EXPECT_TRUE(r.rounds.empty());
  EXPECT_EQ(r.summary.final_mean_benign_f1, r.summary.initial_mean_benign_f1);
}

TEST(Experiment, DeterministicAcrossRunsAndThreads) {
  auto cfg = small_config();
  cfg.malicious_fraction = 0.34;
  cfg.attack.kind = AttackKind::kDmpa;
  cfg.topology = TopologyKind::kRing;
  const auto a = run_experiment(cfg);
  EXPECT_TRUE(same_records(a, run_experiment(cfg)));
  cfg.threads = 4;
  EXPECT_TRUE(same_records(a, run_experiment(cfg)));
}

TEST(Experiment, AttacksAreInertWithoutMaliciousClients) {
  auto cfg = small_config();
  const auto base = run_experiment(cfg);
  for (auto kind : {AttackKind::kDmpa, AttackKind::kLie, AttackKind::kMinMax, AttackKind::kMinSum}) {
    cfg.attack.kind = kind;
    EXPECT_TRUE(same_records(base, run_experiment(cfg)));
  }
}

TEST(Experiment, MeanBenignF1AveragesBenignOnly) {
  auto cfg = small_config();
  cfg.malicious_fraction = 0.5;
  cfg.attack.kind = AttackKind::kDmpa;
  cfg.topology = TopologyKind::kRing;
  const auto r = run_experiment(cfg);
  for (const auto& rec : r.rounds) {
    double s = 0.0;
    int n = 0;
    for (const auto& c : rec.per_client) {
      if (c.role == Role::kBenign) {
        s += c.macro_f1;
        ++n;
      }
    }
    EXPECT_DOUBLE_EQ(rec.mean_benign_f1, s / n);
  }
  EXPECT_EQ(r.summary.malicious_ids.size(), 3u);
}

TEST(Experiment, PoisonedStateAndPerClientInitAreSelectable) {
  auto cfg = small_config();
  cfg.malicious_fraction = 0.5;
  cfg.attack.kind = AttackKind::kDmpa;
  const auto honest = run_experiment(cfg);
  cfg.malicious_state = MaliciousState::kPoisoned;
  EXPECT_FALSE(same_records(honest, run_experiment(cfg)));
  cfg.malicious_state = MaliciousState::kHonest;
  cfg.init = InitPolicy::kPerClient;
  auto data = std::make_shared<const ExperimentData>(load_experiment_data(cfg.dataset, cfg.seed));
  Simulation sim(cfg, data);
  EXPECT_NE(sim.clients()[0].params, sim.clients()[1].params);
}

TEST(Experiment, ErrorsNameTheRound) {
  auto cfg = small_config();
  cfg.malicious_fraction = 0.5;
  cfg.attack.kind = AttackKind::kDmpa;
  cfg.train.learning_rate = 1e308;  // parameters overflow during the first round
  try {
    run_experiment(cfg);
    FAIL() << "expected a RunError";
  } catch (const RunError& e) {
    EXPECT_NE(std::string(e.what()).find("round 1"), std::string::npos) << e.what();
  }
}

TEST(Experiment, RejectsTooFewExamples) {
  auto cfg = small_config();
  auto data = std::make_shared<ExperimentData>(load_experiment_data(cfg.dataset, cfg.seed));
  data->train.labels.resize(3);
  data->train.features.resize(3 * data->train.feature_dim);
  EXPECT_THROW(Simulation(cfg, data), InvalidInputError);
}

}  // namespace
}  // namespace dflsim
