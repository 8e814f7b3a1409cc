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

#ifndef DFLSIM_AGGREGATION_HPP_
#define DFLSIM_AGGREGATION_HPP_

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dflsim/linalg.hpp"

namespace dflsim {

struct Contribution {
  std::size_t client_id = 0;
  std::span<const double> params;
};

// A client's local view for one aggregation: its own model plus the models
// received from its neighbors. Members are kept sorted by client id, so the
// order in which `received` is supplied never matters.
class AggregationInput {
 public:
  // Throws InvalidInputError on length mismatch or duplicate ids.
  AggregationInput(std::size_t own_id, std::span<const double> own,
                   std::vector<Contribution> received = {});

  std::size_t own_id() const noexcept { return own_id_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return members_.size(); }
  const std::vector<Contribution>& members() const noexcept { return members_; }

 private:
  std::size_t own_id_;
  std::size_t dim_;
  std::vector<Contribution> members_;
};

// Unweighted coordinate-wise mean.
ParamVector fed_avg(const AggregationInput& input);

// Coordinate-wise median; even counts average the two central values.
ParamVector coordinate_median(const AggregationInput& input);

// Coordinate-wise mean after dropping floor(trim_ratio * m) values from each
// end. trim_ratio in [0, 0.5).
ParamVector trimmed_mean(const AggregationInput& input, double trim_ratio);

// Krum selection. With `f` unset the tolerance is floor((m - 3) / 2) clamped
// at 0 and the neighbor count m - f - 2 is clamped at 1; an explicit f that
// leaves fewer than one neighbor is rejected.
ParamVector krum(const AggregationInput& input, std::optional<std::size_t> f = std::nullopt);

// Index into input.members() of the vector Krum selects.
std::size_t krum_select(const AggregationInput& input, std::optional<std::size_t> f = std::nullopt);

inline constexpr double kDefaultTrimRatio = 0.2;

enum class AggregationKind { kFedAvg, kKrum, kTrimmedMean, kMedian };

std::string_view to_string(AggregationKind kind) noexcept;
// Accepts fed_avg, krum, trimmed_mean, median.
AggregationKind parse_aggregation(std::string_view name);

struct AggregationSpec {
  AggregationKind kind = AggregationKind::kFedAvg;
  std::optional<std::size_t> krum_f;
  double trim_ratio = kDefaultTrimRatio;
};

class AggregationRule {
 public:
  virtual ~AggregationRule() = default;
  virtual std::string_view name() const noexcept = 0;
  virtual ParamVector aggregate(const AggregationInput& input) const = 0;
};

std::unique_ptr<AggregationRule> make_aggregation(const AggregationSpec& spec);

}  // namespace dflsim

#endif  // DFLSIM_AGGREGATION_HPP_
