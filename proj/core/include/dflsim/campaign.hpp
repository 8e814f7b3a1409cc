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


#ifndef DFLSIM_CAMPAIGN_HPP_
#define DFLSIM_CAMPAIGN_HPP_

#include <cstddef>
#include <functional>

#include "dflsim/config.hpp"
#include "dflsim/results.hpp"

namespace dflsim {

struct CampaignHooks {
  // Called in run-index order after each run's outputs are persisted.
  std::function<void(const RunOutcome& outcome, std::size_t done, std::size_t total)> on_run_done;
};

// Executes every planned run. When cfg.output.dir is non-empty, results are
// persisted after each run (CSV appended, JSON and summary rewritten), so an
// interrupted campaign keeps its completed runs. Per-run failures are recorded
// and the campaign continues unless output.fail_fast is set, in which case a
// RunError is thrown after persisting. Unwritable outputs raise IoError.
ResultsBundle run_campaign(const ConfigFile& cfg, const CampaignHooks& hooks = {});

// Writes the bundle's primary file, summary.csv and (optionally) charts.
void emit_outputs(const ResultsBundle& bundle, const OutputOptions& output);

}  // namespace dflsim

#endif  // DFLSIM_CAMPAIGN_HPP_
