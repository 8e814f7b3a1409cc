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

// dflsim command line: run campaigns, validate configs, generate data.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "dflsim/campaign.hpp"
#include "dflsim/config.hpp"
#include "dflsim/data.hpp"
#include "dflsim/errors.hpp"
#include "dflsim/results.hpp"

namespace {

namespace fs = std::filesystem;

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kConfigError = 2,
  kRunFailure = 3,
  kIoError = 4,
};

struct RunArgs {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::string> format;
  bool charts = false;
  std::optional<std::uint64_t> seed;
  bool fail_fast = false;
  bool parallel = false;
};

struct GenArgs {
  std::string kind;
  std::string out = "data";
  std::uint64_t seed = 1;
  std::size_t classes = 3;
  std::size_t train_per_class = 300;
  std::size_t test_per_class = 100;
  std::size_t feature_dim = 8;
  double spread = 0.5;
};

void print_summary(const dflsim::ResultsBundle& bundle) {
  std::printf("%-6s %-13s %-8s %8s %4s %10s\n", "topo", "aggregation", "attack", "fraction", "rep", "final_f1");
  for (const auto& row : dflsim::summary_rows(bundle)) {
    const auto topo = dflsim::to_string(row.key.topology);
    if (row.ok) {
      std::printf("%-6.*s %-13s %-8s %8.3f %4zu %10.6f\n", static_cast<int>(topo.size()), topo.data(),
                  row.key.aggregation.c_str(), row.key.attack.c_str(), row.key.fraction, row.key.replicate,
                  row.final_mean_benign_f1);
    } else {
      std::printf("%-6.*s %-13s %-8s %8.3f %4zu %10s\n", static_cast<int>(topo.size()), topo.data(),
                  row.key.aggregation.c_str(), row.key.attack.c_str(), row.key.fraction, row.key.replicate,
                  "FAILED");
    }
  }
}

int cmd_run(const RunArgs& a) {
  auto cfg = dflsim::parse_config(a.config);
  if (a.out) cfg.output.dir = *a.out;
  if (a.format) cfg.output.format = *a.format == "json" ? dflsim::OutputFormat::kJson : dflsim::OutputFormat::kCsv;
  if (a.charts) cfg.output.charts = true;
  if (a.seed) cfg.base.seed = *a.seed;
  if (a.fail_fast) cfg.output.fail_fast = true;
  if (a.parallel) cfg.output.parallel = true;

  dflsim::CampaignHooks hooks;
  hooks.on_run_done = [](const dflsim::RunOutcome& o, std::size_t done, std::size_t total) {
    if (o.result) {
      std::fprintf(stderr, "[%zu/%zu] final mean benign F1 %.6f\n", done, total,
                   o.result->summary.final_mean_benign_f1);
    } else {
      std::fprintf(stderr, "[%zu/%zu] FAILED: %s\n", done, total, o.error.c_str());
    }
  };
  const auto bundle = dflsim::run_campaign(cfg, hooks);
  print_summary(bundle);
  std::printf("results written to %s\n", cfg.output.dir.string().c_str());
  for (const auto& r : bundle.runs) {
    if (!r.result) return kRunFailure;
  }
  return kOk;
}

int cmd_validate(const std::string& path) {
  const auto cfg = dflsim::parse_config(path);
  const auto plan = dflsim::plan_runs(cfg);
  std::printf("%s: ok, %zu planned run%s\n", path.c_str(), plan.size(), plan.size() == 1 ? "" : "s");
  std::printf("%s\n", dflsim::to_json_text(cfg).c_str());
  return kOk;
}

void write_blobs_csv(const dflsim::Dataset& d, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw dflsim::IoError("cannot write " + path.string());
  out << "label";
  for (std::size_t j = 0; j < d.feature_dim; ++j) out << ",x" << j;
  out << "\n";
  char buf[32];
  for (std::size_t i = 0; i < d.size(); ++i) {
    out << d.labels[i];
    for (double v : d.row(i)) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << ',' << buf;
    }
    out << "\n";
  }
  if (!out) throw dflsim::IoError("write failed for " + path.string());
}

// Maps features into [0, 1] using the training range so they survive IDX quantization.
void rescale(dflsim::Dataset& d, double lo, double hi) {
  for (double& v : d.features) v = hi > lo ? (v - lo) / (hi - lo) : 0.0;
  for (double& v : d.features) v = std::min(1.0, std::max(0.0, v));
}

int cmd_gen_data(const GenArgs& a) {
  const fs::path dir(a.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw dflsim::IoError("cannot create " + dir.string());
  auto split = dflsim::synth_blobs_split(a.classes, a.train_per_class, a.test_per_class, a.feature_dim, a.spread,
                                         a.seed);
  if (a.kind == "blobs") {
    write_blobs_csv(split.train, dir / "train.csv");
    write_blobs_csv(split.test, dir / "test.csv");
    std::printf("wrote %zu train and %zu test examples to %s\n", split.train.size(), split.test.size(),
                dir.string().c_str());
    return kOk;
  }

  const auto [lo, hi] = std::minmax_element(split.train.features.begin(), split.train.features.end());
  const double flo = *lo, fhi = *hi;
  rescale(split.train, flo, fhi);
  rescale(split.test, flo, fhi);
  const std::pair<const char*, const dflsim::Dataset*> parts[] = {{"train", &split.train}, {"test", &split.test}};
  double worst = 0.0;
  for (const auto& [name, data] : parts) {
    const fs::path images = dir / (std::string(name) + "-images-idx3-ubyte");
    const fs::path labels = dir / (std::string(name) + "-labels-idx1-ubyte");
    dflsim::write_idx(*data, 1, data->feature_dim, images, labels);
    const auto back = dflsim::load_idx(images, labels, data->classes);
    if (back.labels != data->labels || back.features.size() != data->features.size()) {
      std::fprintf(stderr, "round trip mismatch in %s\n", name);
      return kRunFailure;
    }
    for (std::size_t i = 0; i < back.features.size(); ++i) {
      worst = std::max(worst, std::abs(back.features[i] - data->features[i]));
    }
  }
  // Quantization to round(255 x) bounds the error by half a level.
  const bool ok = worst <= 0.5 / 255.0 + 1e-12;
  std::printf("wrote IDX train/test pairs to %s; max round-trip error %.3g (%s)\n", dir.string().c_str(), worst,
              ok ? "ok" : "exceeds half a quantization level");
  return ok ? kOk : kRunFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized federated learning poisoning simulator"};
  app.set_version_flag("--version", std::string(dflsim::tool_version()));
  app.require_subcommand(1);
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Execute every run of a config's sweep");
  run_cmd->add_option("--config", run.config, "Config file (JSON)")->required();
  run_cmd->add_option("--out", run.out, "Output directory (overrides output.dir)");
  run_cmd->add_option("--format", run.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  run_cmd->add_flag("--charts", run.charts, "Also write SVG charts");
  run_cmd->add_option("--seed", run.seed, "Global seed (overrides seed)");
  run_cmd->add_flag("--fail-fast", run.fail_fast, "Stop at the first failed run");
  run_cmd->add_flag("--parallel", run.parallel, "Run independent experiments concurrently");

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "Check a config and print its resolved form");
  validate_cmd->add_option("--config", validate_path, "Config file (JSON)")->required();

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Write a synthetic blobs dataset");
  gen_cmd->add_option("--kind", gen.kind, "blobs (CSV) or idx-roundtrip (IDX files, verified by reloading)")
      ->required()
      ->check(CLI::IsMember({"blobs", "idx-roundtrip"}));
  gen_cmd->add_option("--out", gen.out, "Output directory")->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed)->capture_default_str();
  gen_cmd->add_option("--classes", gen.classes)->capture_default_str()->check(CLI::Range(2, 255));
  gen_cmd->add_option("--train-per-class", gen.train_per_class)->capture_default_str();
  gen_cmd->add_option("--test-per-class", gen.test_per_class)->capture_default_str();
  gen_cmd->add_option("--feature-dim", gen.feature_dim)->capture_default_str();
  gen_cmd->add_option("--spread", gen.spread)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*run_cmd) return cmd_run(run);
    if (*validate_cmd) return cmd_validate(validate_path);
    if (*gen_cmd) return cmd_gen_data(gen);
  } catch (const dflsim::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const dflsim::IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kIoError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "run failed: %s\n", e.what());
    return kRunFailure;
  }
  return kUsage;
}
