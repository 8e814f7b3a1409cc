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

#include "dflsim/aggregation.hpp"

#include <algorithm>
#include <span>
#include <cmath>
#include <limits>
#include <string>

#include "dflsim/errors.hpp"

namespace dflsim {

AggregationInput::AggregationInput(std::size_t own_id, std::span<const double> own,
                                   std::vector<Contribution> received)
    : own_id_(own_id), dim_(own.size()), members_(std::move(received)) {
  if (own.empty()) throw InvalidInputError("AggregationInput: empty own model");
  members_.push_back({own_id, own});
  std::sort(members_.begin(), members_.end(),
            [](const Contribution& a, const Contribution& b) { return a.client_id < b.client_id; });
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (members_[i].params.size() != dim_) {
      throw InvalidInputError("AggregationInput: model from client " +
                              std::to_string(members_[i].client_id) + " has length " +
                              std::to_string(members_[i].params.size()) + ", expected " +
                              std::to_string(dim_));
    }
    if (i > 0 && members_[i].client_id == members_[i - 1].client_id) {
      throw InvalidInputError("AggregationInput: duplicate client id " +
                              std::to_string(members_[i].client_id));
    }
  }
}

// Both means are accumulated as offsets from a reference value, so that
// averaging identical inputs returns them bit for bit.
ParamVector fed_avg(const AggregationInput& input) {
  const auto& members = input.members();
  const std::span<const double> ref = members.front().params;
  ParamVector delta(input.dim(), 0.0);
  for (std::size_t i = 1; i < members.size(); ++i) {
    for (std::size_t j = 0; j < delta.size(); ++j) delta[j] += members[i].params[j] - ref[j];
  }
  const auto n = static_cast<double>(members.size());
  ParamVector out(ref.begin(), ref.end());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] += delta[j] / n;
  return out;
}

ParamVector coordinate_median(const AggregationInput& input) {
  const std::size_t m = input.size();
  ParamVector out(input.dim());
  std::vector<double> column(m);
  for (std::size_t j = 0; j < out.size(); ++j) {
    for (std::size_t i = 0; i < m; ++i) column[i] = input.members()[i].params[j];
    std::sort(column.begin(), column.end());
    out[j] = (m % 2 == 1) ? column[m / 2] : 0.5 * (column[m / 2 - 1] + column[m / 2]);
  }
  return out;
}

ParamVector trimmed_mean(const AggregationInput& input, double trim_ratio) {
  if (!(trim_ratio >= 0.0 && trim_ratio < 0.5)) {
    throw InvalidInputError("trimmed_mean: trim ratio must lie in [0, 0.5)");
  }
  const std::size_t m = input.size();
  // The small slack keeps products like 0.2 * 10 from flooring to 1.
  const auto t = static_cast<std::size_t>(std::floor(trim_ratio * static_cast<double>(m) + 1e-9));
  if (m < 2 * t + 1) {
    throw InvalidInputError("trimmed_mean: trimming " + std::to_string(t) + " from each end of " +
                            std::to_string(m) + " values leaves nothing");
  }
  if (t == 0) return fed_avg(input);

  ParamVector out(input.dim());
  std::vector<double> column(m);
  const auto kept = static_cast<double>(m - 2 * t);
  for (std::size_t j = 0; j < out.size(); ++j) {
    for (std::size_t i = 0; i < m; ++i) column[i] = input.members()[i].params[j];
    std::sort(column.begin(), column.end());
    double s = 0.0;
    for (std::size_t i = t + 1; i < m - t; ++i) s += column[i] - column[t];
    out[j] = column[t] + s / kept;
  }
  return out;
}

std::size_t krum_select(const AggregationInput& input, std::optional<std::size_t> f) {
  const std::size_t m = input.size();
  if (m == 1) return 0;

  std::size_t neighbors = 0;
  if (f) {
    if (m < *f + 3) {
      throw InvalidInputError("krum: f = " + std::to_string(*f) + " leaves no neighbors among " +
                              std::to_string(m) + " models");
    }
    neighbors = m - *f - 2;
  } else {
    const std::size_t auto_f = m >= 3 ? (m - 3) / 2 : 0;
    neighbors = m >= auto_f + 3 ? m - auto_f - 2 : 1;
  }

  const auto& members = input.members();
  std::vector<std::vector<double>> dist(m, std::vector<double>(m, 0.0));
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      dist[a][b] = dist[b][a] = squared_distance(members[a].params, members[b].params);
    }
  }

  std::size_t best = 0;
  double best_score = std::numeric_limits<double>::infinity();
  std::vector<double> others;
  for (std::size_t a = 0; a < m; ++a) {
    others.clear();
    for (std::size_t b = 0; b < m; ++b) {
      if (b != a) others.push_back(dist[a][b]);
    }
    std::sort(others.begin(), others.end());
    double score = 0.0;
    for (std::size_t k = 0; k < neighbors; ++k) score += others[k];
    // Strict comparison: members are in id order, so ties keep the lowest id.
    if (score < best_score) {
      best_score = score;
      best = a;
    }
  }
  return best;
}

ParamVector krum(const AggregationInput& input, std::optional<std::size_t> f) {
  const auto chosen = input.members()[krum_select(input, f)].params;
  return ParamVector(chosen.begin(), chosen.end());
}

std::string_view to_string(AggregationKind kind) noexcept {
  switch (kind) {
    case AggregationKind::kFedAvg:
      return "fed_avg";
    case AggregationKind::kKrum:
      return "krum";
    case AggregationKind::kTrimmedMean:
      return "trimmed_mean";
    case AggregationKind::kMedian:
      return "median";
  }
  return "unknown";
}

AggregationKind parse_aggregation(std::string_view name) {
  for (auto kind : {AggregationKind::kFedAvg, AggregationKind::kKrum, AggregationKind::kTrimmedMean,
                    AggregationKind::kMedian}) {
    if (name == to_string(kind)) return kind;
  }
  throw InvalidInputError("unknown aggregation '" + std::string(name) +
                          "' (valid: fed_avg, krum, trimmed_mean, median)");
}

namespace {

class FedAvgRule final : public AggregationRule {
 public:
  std::string_view name() const noexcept override { return "fed_avg"; }
  ParamVector aggregate(const AggregationInput& input) const override { return fed_avg(input); }
};

class MedianRule final : public AggregationRule {
 public:
  std::string_view name() const noexcept override { return "median"; }
  ParamVector aggregate(const AggregationInput& input) const override {
    return coordinate_median(input);
  }
};

class TrimmedMeanRule final : public AggregationRule {
 public:
  explicit TrimmedMeanRule(double ratio) : ratio_(ratio) {}
  std::string_view name() const noexcept override { return "trimmed_mean"; }
  ParamVector aggregate(const AggregationInput& input) const override {
    return trimmed_mean(input, ratio_);
  }

 private:
  double ratio_;
};

class KrumRule final : public AggregationRule {
 public:
  explicit KrumRule(std::optional<std::size_t> f) : f_(f) {}
  std::string_view name() const noexcept override { return "krum"; }
  ParamVector aggregate(const AggregationInput& input) const override { return krum(input, f_); }

 private:
  std::optional<std::size_t> f_;
};

}  // namespace

std::unique_ptr<AggregationRule> make_aggregation(const AggregationSpec& spec) {
  switch (spec.kind) {
    case AggregationKind::kFedAvg:
      return std::make_unique<FedAvgRule>();
    case AggregationKind::kKrum:
      return std::make_unique<KrumRule>(spec.krum_f);
    case AggregationKind::kTrimmedMean:
      if (!(spec.trim_ratio >= 0.0 && spec.trim_ratio < 0.5)) {
        throw InvalidInputError("trimmed_mean: trim ratio must lie in [0, 0.5)");
      }
      return std::make_unique<TrimmedMeanRule>(spec.trim_ratio);
    case AggregationKind::kMedian:
      return std::make_unique<MedianRule>();
  }
  throw InvalidInputError("unknown aggregation kind");
}

}  // namespace dflsim
