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

#include "dflsim/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

#include <spdlog/spdlog.h>

#include "dflsim/chart.hpp"
#include "dflsim/errors.hpp"
#include "parallel.hpp"

namespace dflsim {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& content) {
  // Write-then-rename keeps the previous version intact if we die mid-write.
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot replace " + path.string() + ": " + ec.message());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

std::string primary_filename(OutputFormat format) {
  return format == OutputFormat::kCsv ? "results.csv" : "results.json";
}

void write_charts(const ResultsBundle& bundle, const fs::path& dir) {
  for (const auto& f : campaign_charts(bundle)) write_file(dir / f.filename, render_svg(f.chart));
}

// Persists runs as they complete, in index order.
class Writer {
 public:
  Writer(const ResultsBundle& bundle, const OutputOptions& output) : bundle_(bundle), output_(output) {
    if (output_.dir.empty()) return;
    ensure_dir(output_.dir);
    if (output_.format == OutputFormat::kCsv) {
      csv_.open(output_.dir / primary_filename(output_.format), std::ios::binary | std::ios::trunc);
      if (!csv_) throw IoError("cannot write " + (output_.dir / "results.csv").string());
      write_csv_preamble(csv_, bundle_);
      csv_.flush();
    }
    rewrite();
  }

  void append(const RunOutcome& run) {
    if (output_.dir.empty()) return;
    if (output_.format == OutputFormat::kCsv) {
      write_csv_run(csv_, run);
      csv_.flush();
      if (!csv_) throw IoError("write failed for " + (output_.dir / "results.csv").string());
    }
    rewrite();
  }

  void finish() {
    if (output_.dir.empty()) return;
    if (output_.charts) write_charts(bundle_, output_.dir);
  }

 private:
  void rewrite() {
    if (output_.format == OutputFormat::kJson) write_file(output_.dir / "results.json", to_json(bundle_));
    write_file(output_.dir / "summary.csv", to_summary_csv(bundle_));
  }

  const ResultsBundle& bundle_;
  const OutputOptions& output_;
  std::ofstream csv_;
};

class DataCache {
 public:
  std::shared_ptr<const ExperimentData> get(const ExperimentConfig& cfg) {
    // The blobs seed falls back to the run seed, so it is part of the key.
    std::string key = to_json_text(cfg);
    if (const auto* b = std::get_if<BlobsSource>(&cfg.dataset)) {
      key = "blobs:" + std::to_string(b->seed.value_or(cfg.seed)) + ":" + std::to_string(b->classes) + ":" +
            std::to_string(b->train_per_class) + ":" + std::to_string(b->test_per_class) + ":" +
            std::to_string(b->feature_dim) + ":" + std::to_string(b->spread);
    } else {
      const auto& s = std::get<IdxSource>(cfg.dataset);
      key = "idx:" + s.train_images.string() + "|" + s.train_labels.string() + "|" + s.test_images.string() + "|" +
            s.test_labels.string() + "|" + std::to_string(s.train_limit.value_or(0)) + "|" +
            std::to_string(s.test_limit.value_or(0)) + "|" + std::to_string(s.classes);
    }
    std::lock_guard lock(mu_);
    auto& slot = cache_[key];
    if (!slot) slot = std::make_shared<const ExperimentData>(load_experiment_data(cfg.dataset, cfg.seed));
    return slot;
  }

 private:
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<const ExperimentData>> cache_;
};

std::string describe(const RunKey& k) {
  return std::string(to_string(k.topology)) + "/" + k.aggregation + "/" + k.attack +
         "/fraction=" + std::to_string(k.fraction) + "/replicate=" + std::to_string(k.replicate);
}

}  // namespace

ResultsBundle run_campaign(const ConfigFile& cfg, const CampaignHooks& hooks) {
  const auto plan = plan_runs(cfg);
  ResultsBundle bundle;
  bundle.config_json = to_json_text(cfg);
  bundle.created_at = utc_timestamp();
  Writer writer(bundle, cfg.output);
  DataCache cache;

  std::vector<std::optional<RunOutcome>> done(plan.size());
  std::mutex mu;
  std::size_t next_to_emit = 0;
  std::atomic<bool> stop{false};
  std::optional<RunError> abort;

  const auto execute = [&](std::size_t i) {
    if (stop.load()) return;
    RunOutcome outcome;
    outcome.run = plan[i];
    spdlog::info("run {}/{}: {}", i + 1, plan.size(), describe(plan[i].key));
    try {
      outcome.result = run_experiment(plan[i].config, cache.get(plan[i].config));
    } catch (const std::exception& e) {
      outcome.error = e.what();
      spdlog::error("run {} failed: {}", i, outcome.error);
    }

    std::lock_guard lock(mu);
    done[i] = std::move(outcome);
    while (!abort && next_to_emit < plan.size() && done[next_to_emit]) {
      RunOutcome& ready = *done[next_to_emit];
      bundle.runs.push_back(ready);
      writer.append(bundle.runs.back());
      if (hooks.on_run_done) hooks.on_run_done(bundle.runs.back(), bundle.runs.size(), plan.size());
      if (!ready.result && cfg.output.fail_fast && !abort) {
        abort.emplace("run " + std::to_string(next_to_emit) + " (" + describe(ready.run.key) +
                      ") failed: " + ready.error);
        stop.store(true);
      }
      ++next_to_emit;
    }
  };

  const std::size_t workers =
      cfg.output.parallel ? std::max<std::size_t>(1, std::thread::hardware_concurrency()) : 1;
  internal::parallel_for(plan.size(), workers, execute);

  if (abort) throw *abort;
  writer.finish();
  return bundle;
}

void emit_outputs(const ResultsBundle& bundle, const OutputOptions& output) {
  if (bundle.runs.empty()) throw InvalidInputError("nothing to emit: the results bundle is empty");
  ensure_dir(output.dir);
  write_file(output.dir / primary_filename(output.format),
             output.format == OutputFormat::kCsv ? to_csv(bundle) : to_json(bundle));
  write_file(output.dir / "summary.csv", to_summary_csv(bundle));
  if (output.charts) write_charts(bundle, output.dir);
}

}  // namespace dflsim
