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

#ifndef DFLSIM_ATTACKS_HPP_
#define DFLSIM_ATTACKS_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "dflsim/linalg.hpp"

namespace dflsim {

// Everything an attack is allowed to see: the colluding clients' own trained
// models (columns in ascending client id) and population counts. There is no
// field through which a benign model could reach an attack.
struct AttackContext {
  UpdateMatrix malicious_updates;
  std::size_t total_clients = 0;
  std::size_t malicious_count = 0;
  std::size_t round = 0;

  // Throws InvalidInputError unless 1 <= n == malicious_count.
  void validate() const;
};

// The vector every malicious client broadcasts this round.
struct PoisonedUpdate {
  ParamVector vector;
};

inline constexpr unsigned kDefaultTopKPercent = 10;

// Mask of the floor(size * percent / 100) largest entries of `values`;
// ties go to the lower index.
std::vector<std::uint8_t> select_top_k_mask(std::span<const double> values, unsigned percent);

// Angle-bias attack. Negates the colluding models, adds their rank-one
// projection onto the principal eigenvector of the client correlation
// matrix, averages the result and refills each client's top-k coordinates
// (by squared magnitude of its own model) from its modified column.
PoisonedUpdate dmpa(const AttackContext& ctx, unsigned top_k_percent = kDefaultTopKPercent);

// Variant: one poisoned vector per malicious client, each masked only by its
// own top-k coordinates.
std::vector<ParamVector> dmpa_per_client(const AttackContext& ctx,
                                         unsigned top_k_percent = kDefaultTopKPercent);

struct LieShift {
  double z = 0.0;
  bool clamped = false;  // argument left (0, 1); z fell back to kLieFallbackZ
};

inline constexpr double kLieFallbackZ = 0.5;

// z = inverse_normal_cdf((K - m - s) / (K - m)) with s = floor(K / 2 + 1) - m.
LieShift lie_z(std::size_t total_clients, std::size_t malicious_count);

// mean - z * stddev over the malicious columns (population stddev).
PoisonedUpdate lie(const AttackContext& ctx);

struct PerturbationResult {
  ParamVector vector;
  ParamVector direction;  // unit perturbation direction p
  double gamma = 0.0;
  double bound = 0.0;     // B
  double gamma_max = 0.0;
};

inline constexpr std::size_t kPerturbationSearchSteps = 50;

// mean + gamma * p with p = -mean / |mean| and gamma maximal such that every
// malicious model stays within the largest pairwise malicious distance.
PerturbationResult min_max_search(const AttackContext& ctx);
// Same direction; the sum of squared distances to the malicious models is
// bounded by the largest such sum from any one malicious model.
PerturbationResult min_sum_search(const AttackContext& ctx);

inline PoisonedUpdate min_max(const AttackContext& ctx) { return {min_max_search(ctx).vector}; }
inline PoisonedUpdate min_sum(const AttackContext& ctx) { return {min_sum_search(ctx).vector}; }

// Every malicious client keeps broadcasting its own trained model.
std::vector<ParamVector> no_attack(const AttackContext& ctx);

enum class AttackKind { kNone, kDmpa, kLie, kMinMax, kMinSum };

std::string_view to_string(AttackKind kind) noexcept;
// Accepts none (alias no_attack), dmpa, lie, min_max, min_sum.
AttackKind parse_attack(std::string_view name);

struct AttackSpec {
  AttackKind kind = AttackKind::kNone;
  unsigned top_k_percent = kDefaultTopKPercent;
  bool per_client = false;  // dmpa only
};

class AttackStrategy {
 public:
  virtual ~AttackStrategy() = default;
  virtual std::string_view name() const noexcept = 0;
  // One broadcast vector per malicious client, in column order.
  virtual std::vector<ParamVector> craft(const AttackContext& ctx) const = 0;
};

std::unique_ptr<AttackStrategy> make_attack(const AttackSpec& spec);

}  // namespace dflsim

#endif  // DFLSIM_ATTACKS_HPP_
