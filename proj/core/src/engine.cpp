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

#include "dflsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dflsim/errors.hpp"
#include "dflsim/rng.hpp"
#include "parallel.hpp"

namespace dflsim {

namespace {

constexpr std::uint64_t kRoleStream = 0x201E5ULL;
constexpr std::uint64_t kPartitionStream = 0x9A27ULL;
constexpr std::uint64_t kInitStream = 0x1217ULL;

Dataset take_prefix(Dataset d, std::optional<std::size_t> limit) {
  if (!limit || *limit >= d.size()) return d;
  d.labels.resize(*limit);
  d.features.resize(*limit * d.feature_dim);
  return d;
}

}  // namespace

ExperimentData load_experiment_data(const DatasetSource& source, std::uint64_t default_seed) {
  if (const auto* blobs = std::get_if<BlobsSource>(&source)) {
    auto split = synth_blobs_split(blobs->classes, blobs->train_per_class, blobs->test_per_class,
                                   blobs->feature_dim, blobs->spread,
                                   blobs->seed.value_or(default_seed));
    return {std::move(split.train), std::move(split.test)};
  }
  const auto& idx = std::get<IdxSource>(source);
  Dataset train = take_prefix(load_idx(idx.train_images, idx.train_labels, idx.classes), idx.train_limit);
  Dataset test = take_prefix(load_idx(idx.test_images, idx.test_labels, idx.classes), idx.test_limit);
  const std::size_t classes = std::max(train.classes, test.classes);
  train.classes = test.classes = classes;
  if (train.feature_dim != test.feature_dim) {
    throw ConsistencyError("train and test images have different sizes");
  }
  return {std::move(train), std::move(test)};
}

std::string_view to_string(Role role) noexcept {
  return role == Role::kMalicious ? "malicious" : "benign";
}

std::size_t ExperimentConfig::malicious_count() const {
  return static_cast<std::size_t>(std::lround(static_cast<double>(clients) * malicious_fraction));
}

ModelSpec ExperimentConfig::model_spec(std::size_t input_dim, std::size_t classes) const {
  ModelSpec spec;
  spec.layer_sizes.push_back(input_dim);
  spec.layer_sizes.insert(spec.layer_sizes.end(), hidden_layers.begin(), hidden_layers.end());
  spec.layer_sizes.push_back(classes);
  spec.validate();
  return spec;
}

void ExperimentConfig::validate() const {
  if (!(malicious_fraction >= 0.0 && malicious_fraction < 1.0)) {
    throw InvalidInputError("malicious_fraction must lie in [0, 1)");
  }
  if (malicious_count() >= clients) {
    throw InvalidInputError("malicious count " + std::to_string(malicious_count()) +
                            " leaves no benign client among " + std::to_string(clients));
  }
  if (role_policy == RolePolicy::kExcludeHub && topology == TopologyKind::kStar &&
      malicious_count() + 1 > clients) {
    throw InvalidInputError("exclude_hub needs at least one non-hub slot per malicious client");
  }
  if (!(train.learning_rate >= 0.0) || train.batch_size == 0 || train.local_epochs == 0) {
    throw InvalidInputError("train: learning_rate >= 0, batch_size > 0 and local_epochs > 0 required");
  }
  for (std::size_t h : hidden_layers) {
    if (h == 0) throw InvalidInputError("hidden layer sizes must be positive");
  }
}

std::vector<Role> assign_roles(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t m = cfg.malicious_count();
  const bool skip_hub = cfg.role_policy == RolePolicy::kExcludeHub && cfg.topology == TopologyKind::kStar;
  std::vector<std::size_t> pool(cfg.clients - (skip_hub ? 1 : 0));
  std::iota(pool.begin(), pool.end(), skip_hub ? 1 : 0);
  Rng rng(derive_seed({cfg.seed, kRoleStream}));
  rng.shuffle(pool.begin(), pool.end());
  std::vector<Role> roles(cfg.clients, Role::kBenign);
  for (std::size_t i = 0; i < m; ++i) roles[pool[i]] = Role::kMalicious;
  return roles;
}

Simulation::Simulation(ExperimentConfig cfg, std::shared_ptr<const ExperimentData> data)
    : cfg_(std::move(cfg)),
      data_(std::move(data)),
      spec_(cfg_.model_spec(data_->train.feature_dim, data_->train.classes)),
      graph_(TopologyGraph::build(cfg_.topology, cfg_.clients)),
      attack_(make_attack(cfg_.attack)),
      rule_(make_aggregation(cfg_.aggregation)) {
  cfg_.validate();
  data_->train.validate();
  data_->test.validate();
  if (data_->test.feature_dim != spec_.input_dim()) {
    throw InvalidInputError("test set feature dimension differs from the training set");
  }

  const auto roles = assign_roles(cfg_);
  const PartitionPlan plan =
      partition_iid(data_->train, cfg_.clients, derive_seed({cfg_.seed, kPartitionStream}));
  const ParamVector shared_init = init_params(spec_, derive_seed({cfg_.seed, kInitStream}));

  clients_.resize(cfg_.clients);
  for (std::size_t k = 0; k < cfg_.clients; ++k) {
    ClientState& c = clients_[k];
    c.id = k;
    c.role = roles[k];
    c.shard = plan.shards[k];
    // The client id is the root of its random stream.
    c.seed_root = derive_seed({cfg_.seed, k});
    c.params = cfg_.init == InitPolicy::kShared ? shared_init : init_params(spec_, c.seed_root);
    if (c.role == Role::kMalicious) malicious_ids_.push_back(k);
  }
}

RoundRecord Simulation::evaluate(std::size_t round) const {
  RoundRecord rec;
  rec.round = round;
  rec.per_client.resize(clients_.size());
  internal::parallel_for(clients_.size(), cfg_.threads, [&](std::size_t k) {
    const Metrics m = dflsim::evaluate(clients_[k].params, spec_, data_->test);
    rec.per_client[k] = {k, clients_[k].role, m.loss, m.accuracy,
                         cfg_.f1_average == F1Average::kMacro ? m.macro_f1 : m.weighted_f1};
  });
  double sum = 0.0;
  std::size_t benign = 0;
  for (const auto& c : rec.per_client) {
    if (c.role == Role::kBenign) {
      sum += c.macro_f1;
      ++benign;
    }
  }
  rec.mean_benign_f1 = benign > 0 ? sum / static_cast<double>(benign) : 0.0;
  return rec;
}

RoundRecord Simulation::run_round() {
  const std::size_t round = rounds_completed_ + 1;
  const std::size_t n = clients_.size();
  const auto fail = [&](std::size_t k, const std::exception& e) {
    return RunError("round " + std::to_string(round) + ", client " + std::to_string(k) + ": " + e.what());
  };
  const auto guarded = [&](auto&& body) {
    return [&, body](std::size_t k) {
      try {
        body(k);
      } catch (const RunError&) {
        throw;
      } catch (const std::exception& e) {
        throw fail(k, e);
      }
    };
  };

  // Local training.
  std::vector<ParamVector> trained(n);
  internal::parallel_for(n, cfg_.threads, guarded([&](std::size_t k) {
    TrainConfig tc = cfg_.train;
    tc.seed = clients_[k].seed_root;
    trained[k] = local_train(clients_[k].params, spec_, data_->train, clients_[k].shard, tc, round);
  }));

  // Poison crafting. The context is built from malicious columns only.
  broadcasts_ = trained;
  if (!malicious_ids_.empty() && cfg_.attack.kind != AttackKind::kNone) {
    std::vector<std::span<const double>> columns;
    for (std::size_t k : malicious_ids_) columns.emplace_back(trained[k]);
    if (columns.size() != cfg_.malicious_count()) {
      throw RunError("round " + std::to_string(round) + ": attack context has " +
                     std::to_string(columns.size()) + " columns, expected " +
                     std::to_string(cfg_.malicious_count()));
    }
    std::vector<ParamVector> crafted;
    try {
      const AttackContext ctx{UpdateMatrix::from_columns(columns), n, malicious_ids_.size(), round};
      crafted = attack_->craft(ctx);
    } catch (const std::exception& e) {
      throw RunError("round " + std::to_string(round) + ", attack " + std::string(attack_->name()) +
                     ": " + e.what());
    }
    if (crafted.size() != malicious_ids_.size()) {
      throw RunError("round " + std::to_string(round) + ": attack returned " +
                     std::to_string(crafted.size()) + " vectors");
    }
    for (std::size_t i = 0; i < malicious_ids_.size(); ++i) {
      broadcasts_[malicious_ids_[i]] = std::move(crafted[i]);
    }
  }

  // One-hop exchange and aggregation.
  std::vector<ParamVector> next(n);
  agg_sizes_.assign(n, 0);
  internal::parallel_for(n, cfg_.threads, guarded([&](std::size_t k) {
    const bool use_poison =
        clients_[k].role == Role::kMalicious && cfg_.malicious_state == MaliciousState::kPoisoned;
    const ParamVector& own = use_poison ? broadcasts_[k] : trained[k];
    std::vector<Contribution> received;
    for (std::size_t j : graph_.neighbors(k)) received.push_back({j, broadcasts_[j]});
    const AggregationInput input(k, own, std::move(received));
    agg_sizes_[k] = input.size();
    next[k] = rule_->aggregate(input);
  }));
  for (std::size_t k = 0; k < n; ++k) clients_[k].params = std::move(next[k]);

  rounds_completed_ = round;
  return evaluate(round);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, std::shared_ptr<const ExperimentData> data) {
  Simulation sim(cfg, std::move(data));
  ExperimentResult result;
  result.summary.initial_mean_benign_f1 = sim.evaluate(0).mean_benign_f1;
  result.summary.final_mean_benign_f1 = result.summary.initial_mean_benign_f1;
  for (const auto& c : sim.clients()) {
    if (c.role == Role::kMalicious) result.summary.malicious_ids.push_back(c.id);
  }
  for (std::size_t r = 0; r < cfg.rounds; ++r) {
    result.rounds.push_back(sim.run_round());
    result.summary.final_mean_benign_f1 = result.rounds.back().mean_benign_f1;
  }
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  auto data = std::make_shared<const ExperimentData>(load_experiment_data(cfg.dataset, cfg.seed));
  return run_experiment(cfg, std::move(data));
}

}  // namespace dflsim
