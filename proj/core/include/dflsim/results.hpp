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


#ifndef DFLSIM_RESULTS_HPP_
#define DFLSIM_RESULTS_HPP_

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "dflsim/config.hpp"
#include "dflsim/engine.hpp"

namespace dflsim {

inline constexpr int kResultsSchemaVersion = 1;

std::string_view tool_version() noexcept;

struct RunOutcome {
  PlannedRun run;
  std::optional<ExperimentResult> result;  // empty when the run failed
  std::string error;
};

struct ResultsBundle {
  int schema_version = kResultsSchemaVersion;
  std::string version{tool_version()};
  std::string config_json;  // resolved campaign config
  std::string created_at;   // the only non-deterministic field
  std::vector<RunOutcome> runs;
};

struct SummaryRow {
  RunKey key;
  bool ok = false;
  double initial_mean_benign_f1 = 0.0;
  double final_mean_benign_f1 = 0.0;
  std::string error;
};

std::vector<SummaryRow> summary_rows(const ResultsBundle& bundle);

// Long-format CSV. Per completed run: one row per (round, client) for rounds
// 1..R, then a row with round "final" and role "summary". Numbers use six
// significant digits. Provenance goes in leading '#' comment lines.
void write_csv_preamble(std::ostream& out, const ResultsBundle& bundle);
void write_csv_run(std::ostream& out, const RunOutcome& run);
std::string to_csv(const ResultsBundle& bundle);

std::string to_summary_csv(const ResultsBundle& bundle);

// Full-precision JSON mirror of the bundle, and its inverse.
std::string to_json(const ResultsBundle& bundle);
ResultsBundle bundle_from_json(const std::string& text);

// Strips the timestamp so two bundles' JSON can be compared byte-for-byte.
std::string without_timestamp(const std::string& json_text);

std::string utc_timestamp();

}  // namespace dflsim

#endif  // DFLSIM_RESULTS_HPP_
