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

#ifndef DFLSIM_CONFIG_HPP_
#define DFLSIM_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dflsim/engine.hpp"

namespace dflsim {

enum class OutputFormat { kCsv, kJson };

struct OutputOptions {
  std::filesystem::path dir = "results";
  OutputFormat format = OutputFormat::kCsv;
  bool charts = false;
  bool fail_fast = false;
  bool parallel = false;
};

// Axes crossed into the run plan. An empty axis means "the base value".
struct Sweep {
  std::vector<TopologyKind> topologies;
  std::vector<AggregationSpec> aggregations;
  std::vector<AttackSpec> attacks;
  std::vector<double> malicious_fractions;
  std::size_t replicates = 1;
};

struct ConfigFile {
  std::string name;
  ExperimentConfig base;
  Sweep sweep;
  OutputOptions output;
};

// Parses and validates a JSON config document. Unknown keys, wrong types
// and unknown enum values raise ConfigError with a JSON-pointer location.
// Relative dataset paths resolve against `base_dir`.
ConfigFile parse_config_text(const std::string& text, const std::filesystem::path& base_dir = {});
ConfigFile parse_config(const std::filesystem::path& path);

struct RunKey {
  TopologyKind topology = TopologyKind::kFully;
  std::string aggregation;
  std::string attack;
  double fraction = 0.0;
  std::size_t replicate = 0;
};

struct PlannedRun {
  std::size_t index = 0;
  RunKey key;
  ExperimentConfig config;
};

// Cross product topology x aggregation x attack x fraction x replicate, in
// that nesting order. Each run's seed is derive_seed({seed, replicate}), so
// runs that differ only in attack or aggregation share data, partition,
// roles and initialization. Blob datasets keep the campaign seed.
std::vector<PlannedRun> plan_runs(const ConfigFile& cfg);

// Canonical JSON text of a resolved experiment / config file (for provenance).
std::string to_json_text(const ExperimentConfig& cfg);
std::string to_json_text(const ConfigFile& cfg);

std::string_view to_string(OutputFormat format) noexcept;

}  // namespace dflsim

#endif  // DFLSIM_CONFIG_HPP_
