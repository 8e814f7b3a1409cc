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

#ifndef DFLSIM_ENGINE_HPP_
#define DFLSIM_ENGINE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "dflsim/aggregation.hpp"
#include "dflsim/attacks.hpp"
#include "dflsim/data.hpp"
#include "dflsim/nn.hpp"
#include "dflsim/topology.hpp"

namespace dflsim {

struct BlobsSource {
  std::size_t classes = 3;
  std::size_t train_per_class = 300;
  std::size_t test_per_class = 100;
  std::size_t feature_dim = 8;
  double spread = 0.5;
  std::optional<std::uint64_t> seed;  // defaults to the experiment seed
};

struct IdxSource {
  std::filesystem::path train_images;
  std::filesystem::path train_labels;
  std::filesystem::path test_images;
  std::filesystem::path test_labels;
  std::optional<std::size_t> train_limit;  // keep the first N examples
  std::optional<std::size_t> test_limit;
  std::size_t classes = 0;                 // 0: infer from labels
};

using DatasetSource = std::variant<BlobsSource, IdxSource>;

struct ExperimentData {
  Dataset train;
  Dataset test;
};

ExperimentData load_experiment_data(const DatasetSource& source, std::uint64_t default_seed);

enum class Role { kBenign, kMalicious };
std::string_view to_string(Role role) noexcept;

enum class RolePolicy { kRandom, kExcludeHub };
enum class InitPolicy { kShared, kPerClient };
enum class MaliciousState { kHonest, kPoisoned };
enum class F1Average { kMacro, kWeighted };

struct ExperimentConfig {
  TopologyKind topology = TopologyKind::kFully;
  std::size_t clients = 10;
  double malicious_fraction = 0.0;
  RolePolicy role_policy = RolePolicy::kRandom;
  AttackSpec attack;
  AggregationSpec aggregation;
  std::size_t rounds = 10;
  TrainConfig train;  // train.seed is ignored; per-client streams are derived
  std::vector<std::size_t> hidden_layers = {32, 16};
  DatasetSource dataset = BlobsSource{};
  std::uint64_t seed = 1;
  InitPolicy init = InitPolicy::kShared;
  MaliciousState malicious_state = MaliciousState::kHonest;
  F1Average f1_average = F1Average::kMacro;
  std::size_t threads = 1;

  // round(clients * malicious_fraction).
  std::size_t malicious_count() const;
  ModelSpec model_spec(std::size_t input_dim, std::size_t classes) const;
  // Throws InvalidInputError on inconsistent settings.
  void validate() const;
};

// Seeded sampling without replacement; with kExcludeHub on a star the hub
// (client 0) is always benign.
std::vector<Role> assign_roles(const ExperimentConfig& cfg);

struct ClientState {
  std::size_t id = 0;
  Role role = Role::kBenign;
  ParamVector params;
  std::vector<std::size_t> shard;
  std::uint64_t seed_root = 0;  // derive_seed({seed, id}); rounds mix in on top
};

struct ClientRecord {
  std::size_t id = 0;
  Role role = Role::kBenign;
  double loss = 0.0;
  double accuracy = 0.0;
  double macro_f1 = 0.0;  // weighted F1 when f1_average is kWeighted
};

struct RoundRecord {
  std::size_t round = 0;
  std::vector<ClientRecord> per_client;
  double mean_benign_f1 = 0.0;
};

struct ExperimentSummary {
  double initial_mean_benign_f1 = 0.0;
  double final_mean_benign_f1 = 0.0;
  std::vector<std::size_t> malicious_ids;
};

struct ExperimentResult {
  std::vector<RoundRecord> rounds;
  ExperimentSummary summary;
};

// Synchronous DFL rounds: train, craft poison, one-hop exchange, aggregate,
// evaluate. Every phase completes for all clients before the next starts.
class Simulation {
 public:
  Simulation(ExperimentConfig cfg, std::shared_ptr<const ExperimentData> data);

  const ExperimentConfig& config() const noexcept { return cfg_; }
  const ModelSpec& model() const noexcept { return spec_; }
  const TopologyGraph& graph() const noexcept { return graph_; }
  const std::vector<ClientState>& clients() const noexcept { return clients_; }
  std::size_t rounds_completed() const noexcept { return rounds_completed_; }
  // Number of models each client aggregated in the last round.
  const std::vector<std::size_t>& last_aggregation_sizes() const noexcept { return agg_sizes_; }
  // Broadcast vectors of the last round, indexed by client id.
  const std::vector<ParamVector>& last_broadcasts() const noexcept { return broadcasts_; }

  RoundRecord evaluate(std::size_t round) const;
  RoundRecord run_round();

 private:
  ExperimentConfig cfg_;
  std::shared_ptr<const ExperimentData> data_;
  ModelSpec spec_;
  TopologyGraph graph_;
  std::unique_ptr<AttackStrategy> attack_;
  std::unique_ptr<AggregationRule> rule_;
  std::vector<ClientState> clients_;
  std::vector<std::size_t> malicious_ids_;
  std::vector<std::size_t> agg_sizes_;
  std::vector<ParamVector> broadcasts_;
  std::size_t rounds_completed_ = 0;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg, std::shared_ptr<const ExperimentData> data);
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace dflsim

#endif  // DFLSIM_ENGINE_HPP_
