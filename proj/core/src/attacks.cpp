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

#include "dflsim/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include <boost/math/distributions/normal.hpp>
#include <spdlog/spdlog.h>

#include "dflsim/errors.hpp"

namespace dflsim {

void AttackContext::validate() const {
  if (malicious_updates.empty()) throw InvalidInputError("attack: no malicious updates");
  if (malicious_updates.cols() != malicious_count) {
    throw InvalidInputError("attack: " + std::to_string(malicious_updates.cols()) +
                            " update columns for " + std::to_string(malicious_count) +
                            " malicious clients");
  }
}

std::vector<std::uint8_t> select_top_k_mask(std::span<const double> values, unsigned percent) {
  const std::size_t k = values.size() * percent / 100;
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  std::vector<std::uint8_t> mask(values.size(), 0);
  for (std::size_t r = 0; r < std::min(k, order.size()); ++r) mask[order[r]] = 1;
  return mask;
}

namespace {

// U_new = -U + P, where P projects U onto the principal client direction.
UpdateMatrix modified_updates(const UpdateMatrix& u) {
  UpdateMatrix projection(u.rows(), u.cols());
  if (u.cols() >= 2) {
    const UpdateMatrix centered = center(u, column_mean(u));
    const CorrelationMatrix y = correlation_from_covariance(*client_covariance(centered));
    const EigenPair principal = principal_eigenpair(y);
    projection = project_onto_client_direction(u, principal.vector);
  }
  UpdateMatrix out(u.rows(), u.cols());
  for (std::size_t i = 0; i < u.cols(); ++i) {
    const auto src = u.column(i);
    const auto p = projection.column(i);
    auto dst = out.column(i);
    for (std::size_t j = 0; j < u.rows(); ++j) dst[j] = -src[j] + p[j];
  }
  return out;
}

std::vector<double> squares(std::span<const double> v) {
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](double x) { return x * x; });
  return out;
}

void refill(ParamVector& target, std::span<const double> source, std::span<const std::uint8_t> mask) {
  for (std::size_t j = 0; j < target.size(); ++j) {
    if (mask[j]) target[j] = source[j];
  }
}

void check_percent(unsigned percent) {
  if (percent > 100) throw InvalidInputError("dmpa: top-k percent must be within [0, 100]");
}

}  // namespace

PoisonedUpdate dmpa(const AttackContext& ctx, unsigned top_k_percent) {
  ctx.validate();
  check_percent(top_k_percent);
  const UpdateMatrix& u = ctx.malicious_updates;
  const UpdateMatrix u_new = modified_updates(u);
  ParamVector poisoned = column_mean(u_new);
  for (std::size_t i = 0; i < u.cols(); ++i) {
    const auto mask = select_top_k_mask(squares(u.column(i)), top_k_percent);
    refill(poisoned, u_new.column(i), mask);
  }
  return {std::move(poisoned)};
}

std::vector<ParamVector> dmpa_per_client(const AttackContext& ctx, unsigned top_k_percent) {
  ctx.validate();
  check_percent(top_k_percent);
  const UpdateMatrix& u = ctx.malicious_updates;
  const UpdateMatrix u_new = modified_updates(u);
  const ParamVector mean = column_mean(u_new);
  std::vector<ParamVector> out;
  for (std::size_t i = 0; i < u.cols(); ++i) {
    ParamVector v = mean;
    refill(v, u_new.column(i), select_top_k_mask(squares(u.column(i)), top_k_percent));
    out.push_back(std::move(v));
  }
  return out;
}

LieShift lie_z(std::size_t total_clients, std::size_t malicious_count) {
  if (total_clients <= malicious_count) {
    throw InvalidInputError("lie: need more clients (" + std::to_string(total_clients) +
                            ") than malicious clients (" + std::to_string(malicious_count) + ")");
  }
  const auto k = static_cast<long long>(total_clients);
  const auto m = static_cast<long long>(malicious_count);
  const long long s = k / 2 + 1 - m;
  const double arg = static_cast<double>(k - m - s) / static_cast<double>(k - m);
  if (!(arg > 0.0 && arg < 1.0)) {
    spdlog::warn("lie: quantile argument {} outside (0, 1) for K={}, m={}; using z={}", arg, k, m,
                 kLieFallbackZ);
    return {kLieFallbackZ, true};
  }
  return {boost::math::quantile(boost::math::normal_distribution<double>(), arg), false};
}

namespace {

ParamVector population_stddev(const UpdateMatrix& u, std::span<const double> mean) {
  ParamVector sd(u.rows(), 0.0);
  for (std::size_t i = 0; i < u.cols(); ++i) {
    const auto col = u.column(i);
    for (std::size_t j = 0; j < u.rows(); ++j) {
      const double diff = col[j] - mean[j];
      sd[j] += diff * diff;
    }
  }
  for (double& x : sd) x = std::sqrt(x / static_cast<double>(u.cols()));
  return sd;
}

}  // namespace

PoisonedUpdate lie(const AttackContext& ctx) {
  ctx.validate();
  const LieShift shift = lie_z(ctx.total_clients, ctx.malicious_count);
  const ParamVector mean = column_mean(ctx.malicious_updates);
  const ParamVector sd = population_stddev(ctx.malicious_updates, mean);
  ParamVector out(mean.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = mean[j] - shift.z * sd[j];
  return {std::move(out)};
}

namespace {

constexpr double kDirectionEpsilon = 1e-12;

ParamVector inverse_mean_direction(const UpdateMatrix& u, std::span<const double> mean) {
  ParamVector p(mean.size(), 0.0);
  const double nrm = norm2(mean);
  if (nrm >= kDirectionEpsilon) {
    for (std::size_t j = 0; j < p.size(); ++j) p[j] = -mean[j] / nrm;
    return p;
  }
  const ParamVector sd = population_stddev(u, mean);
  const auto lead = static_cast<std::size_t>(std::max_element(sd.begin(), sd.end()) - sd.begin());
  p[lead] = 1.0;
  return p;
}

// Largest gamma in [0, gamma_max] with feasible(mean + gamma * p), by bisection.
// gamma = 0 is always feasible for both envelopes.
double search_gamma(std::span<const double> mean, std::span<const double> p, double gamma_max,
                    const std::function<bool(std::span<const double>)>& feasible) {
  ParamVector x(mean.size());
  const auto at = [&](double gamma) -> std::span<const double> {
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = mean[j] + gamma * p[j];
    return x;
  };
  if (gamma_max <= 0.0) return 0.0;
  if (feasible(at(gamma_max))) return gamma_max;
  double lo = 0.0;
  double hi = gamma_max;
  for (std::size_t step = 0; step < kPerturbationSearchSteps; ++step) {
    const double mid = 0.5 * (lo + hi);
    (feasible(at(mid)) ? lo : hi) = mid;
  }
  return lo;
}

PerturbationResult perturb(const AttackContext& ctx, bool sum_envelope) {
  ctx.validate();
  const UpdateMatrix& u = ctx.malicious_updates;
  const std::size_t n = u.cols();
  PerturbationResult r;
  if (n == 1) {
    spdlog::debug("{}: single malicious client, broadcasting the negated model",
                  sum_envelope ? "min_sum" : "min_max");
    r.vector.assign(u.column(0).begin(), u.column(0).end());
    for (double& x : r.vector) x = -x;
    return r;
  }

  const ParamVector mean = column_mean(u);
  r.direction = inverse_mean_direction(u, mean);

  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      dist[a][b] = dist[b][a] = squared_distance(u.column(a), u.column(b));
    }
  }

  std::function<bool(std::span<const double>)> feasible;
  if (sum_envelope) {
    for (std::size_t a = 0; a < n; ++a) {
      r.bound = std::max(r.bound, std::accumulate(dist[a].begin(), dist[a].end(), 0.0));
    }
    r.gamma_max = 100.0 * std::sqrt(r.bound);
    feasible = [&](std::span<const double> x) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += squared_distance(x, u.column(i));
      return s <= r.bound;
    };
  } else {
    double max_sq = 0.0;
    for (const auto& row : dist) max_sq = std::max(max_sq, *std::max_element(row.begin(), row.end()));
    r.bound = std::sqrt(max_sq);
    r.gamma_max = 100.0 * r.bound;
    feasible = [&](std::span<const double> x) {
      for (std::size_t i = 0; i < n; ++i) {
        if (std::sqrt(squared_distance(x, u.column(i))) > r.bound) return false;
      }
      return true;
    };
  }

  r.gamma = search_gamma(mean, r.direction, r.gamma_max, feasible);
  r.vector.resize(mean.size());
  for (std::size_t j = 0; j < mean.size(); ++j) r.vector[j] = mean[j] + r.gamma * r.direction[j];
  return r;
}

}  // namespace

PerturbationResult min_max_search(const AttackContext& ctx) { return perturb(ctx, false); }
PerturbationResult min_sum_search(const AttackContext& ctx) { return perturb(ctx, true); }

std::vector<ParamVector> no_attack(const AttackContext& ctx) {
  ctx.validate();
  std::vector<ParamVector> out;
  for (std::size_t i = 0; i < ctx.malicious_updates.cols(); ++i) {
    const auto col = ctx.malicious_updates.column(i);
    out.emplace_back(col.begin(), col.end());
  }
  return out;
}

std::string_view to_string(AttackKind kind) noexcept {
  switch (kind) {
    case AttackKind::kNone:
      return "none";
    case AttackKind::kDmpa:
      return "dmpa";
    case AttackKind::kLie:
      return "lie";
    case AttackKind::kMinMax:
      return "min_max";
    case AttackKind::kMinSum:
      return "min_sum";
  }
  return "unknown";
}

AttackKind parse_attack(std::string_view name) {
  if (name == "no_attack") return AttackKind::kNone;
  for (auto kind : {AttackKind::kNone, AttackKind::kDmpa, AttackKind::kLie, AttackKind::kMinMax,
                    AttackKind::kMinSum}) {
    if (name == to_string(kind)) return kind;
  }
  throw InvalidInputError("unknown attack '" + std::string(name) +
                          "' (valid: none, dmpa, lie, min_max, min_sum)");
}

namespace {

std::vector<ParamVector> shared(const PoisonedUpdate& p, std::size_t n) {
  return std::vector<ParamVector>(n, p.vector);
}

class NoAttack final : public AttackStrategy {
 public:
  std::string_view name() const noexcept override { return "none"; }
  std::vector<ParamVector> craft(const AttackContext& ctx) const override { return no_attack(ctx); }
};

class DmpaAttack final : public AttackStrategy {
 public:
  DmpaAttack(unsigned percent, bool per_client) : percent_(percent), per_client_(per_client) {}
  std::string_view name() const noexcept override { return "dmpa"; }
  std::vector<ParamVector> craft(const AttackContext& ctx) const override {
    if (per_client_) return dmpa_per_client(ctx, percent_);
    return shared(dmpa(ctx, percent_), ctx.malicious_count);
  }

 private:
  unsigned percent_;
  bool per_client_;
};

class LieAttack final : public AttackStrategy {
 public:
  std::string_view name() const noexcept override { return "lie"; }
  std::vector<ParamVector> craft(const AttackContext& ctx) const override {
    return shared(lie(ctx), ctx.malicious_count);
  }
};

class MinMaxAttack final : public AttackStrategy {
 public:
  std::string_view name() const noexcept override { return "min_max"; }
  std::vector<ParamVector> craft(const AttackContext& ctx) const override {
    return shared(min_max(ctx), ctx.malicious_count);
  }
};

class MinSumAttack final : public AttackStrategy {
 public:
  std::string_view name() const noexcept override { return "min_sum"; }
  std::vector<ParamVector> craft(const AttackContext& ctx) const override {
    return shared(min_sum(ctx), ctx.malicious_count);
  }
};

}  // namespace

std::unique_ptr<AttackStrategy> make_attack(const AttackSpec& spec) {
  switch (spec.kind) {
    case AttackKind::kNone:
      return std::make_unique<NoAttack>();
    case AttackKind::kDmpa:
      check_percent(spec.top_k_percent);
      return std::make_unique<DmpaAttack>(spec.top_k_percent, spec.per_client);
    case AttackKind::kLie:
      return std::make_unique<LieAttack>();
    case AttackKind::kMinMax:
      return std::make_unique<MinMaxAttack>();
    case AttackKind::kMinSum:
      return std::make_unique<MinSumAttack>();
  }
  throw InvalidInputError("unknown attack kind");
}

}  // namespace dflsim
