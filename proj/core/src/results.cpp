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

#include "dflsim/results.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "dflsim/errors.hpp"

#ifndef DFLSIM_VERSION
#define DFLSIM_VERSION "0.0.0"
#endif

namespace dflsim {

using nlohmann::json;

namespace {

constexpr const char* kCsvColumns =
    "topology,aggregation,attack,fraction,round,client_id,role,loss,accuracy,macro_f1,mean_benign_f1,"
    "replicate";

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string quoted(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Comment lines must stay single-line.
std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

std::string key_prefix(const RunKey& key) {
  return std::string(to_string(key.topology)) + "," + key.aggregation + "," + key.attack + "," + num(key.fraction);
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_or_nan(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace

std::string_view tool_version() noexcept { return DFLSIM_VERSION; }

std::vector<SummaryRow> summary_rows(const ResultsBundle& bundle) {
  std::vector<SummaryRow> rows;
  rows.reserve(bundle.runs.size());
  for (const auto& r : bundle.runs) {
    SummaryRow row;
    row.key = r.run.key;
    row.ok = r.result.has_value();
    row.error = r.error;
    if (r.result) {
      row.initial_mean_benign_f1 = r.result->summary.initial_mean_benign_f1;
      row.final_mean_benign_f1 = r.result->summary.final_mean_benign_f1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_csv_preamble(std::ostream& out, const ResultsBundle& bundle) {
  out << "# dflsim " << bundle.version << "\n";
  out << "# schema_version " << bundle.schema_version << "\n";
  out << "# config " << one_line(bundle.config_json) << "\n";
  out << kCsvColumns << "\n";
}

void write_csv_run(std::ostream& out, const RunOutcome& run) {
  const std::string prefix = key_prefix(run.run.key);
  const std::string rep = std::to_string(run.run.key.replicate);
  if (!run.result) {
    out << "# run " << run.run.index << " failed: " << one_line(run.error) << "\n";
    return;
  }
  for (const auto& rec : run.result->rounds) {
    const std::string mean = num(rec.mean_benign_f1);
    for (const auto& c : rec.per_client) {
      out << prefix << ',' << rec.round << ',' << c.id << ',' << to_string(c.role) << ',' << num(c.loss) << ','
          << num(c.accuracy) << ',' << num(c.macro_f1) << ',' << mean << ',' << rep << '\n';
    }
  }
  out << prefix << ",final,,summary,,,," << num(run.result->summary.final_mean_benign_f1) << ',' << rep << '\n';
}

std::string to_csv(const ResultsBundle& bundle) {
  std::ostringstream out;
  write_csv_preamble(out, bundle);
  for (const auto& r : bundle.runs) write_csv_run(out, r);
  return out.str();
}

std::string to_summary_csv(const ResultsBundle& bundle) {
  std::ostringstream out;
  out << "# dflsim " << bundle.version << "\n";
  out << "# config " << one_line(bundle.config_json) << "\n";
  out << "topology,aggregation,attack,fraction,replicate,status,initial_mean_benign_f1,final_mean_benign_f1,"
         "error\n";
  for (const auto& row : summary_rows(bundle)) {
    out << key_prefix(row.key) << ',' << row.key.replicate << ',' << (row.ok ? "ok" : "failed") << ',';
    if (row.ok) out << num(row.initial_mean_benign_f1) << ',' << num(row.final_mean_benign_f1);
    else out << ',';
    out << ',' << quoted(one_line(row.error)) << '\n';
  }
  return out.str();
}

std::string to_json(const ResultsBundle& bundle) {
  json runs = json::array();
  for (const auto& r : bundle.runs) {
    const auto& k = r.run.key;
    json run = {
        {"index", r.run.index},
        {"key",
         {{"topology", to_string(k.topology)},
          {"aggregation", k.aggregation},
          {"attack", k.attack},
          {"fraction", k.fraction},
          {"replicate", k.replicate}}},
        {"config", json::parse(to_json_text(r.run.config))},
        {"status", r.result ? "ok" : "failed"},
    };
    if (!r.result) {
      run["error"] = r.error;
    } else {
      const auto& s = r.result->summary;
      run["summary"] = {{"initial_mean_benign_f1", finite_or_null(s.initial_mean_benign_f1)},
                        {"final_mean_benign_f1", finite_or_null(s.final_mean_benign_f1)},
                        {"malicious_ids", s.malicious_ids}};
      json rounds = json::array();
      for (const auto& rec : r.result->rounds) {
        json clients = json::array();
        for (const auto& c : rec.per_client) {
          clients.push_back({{"client_id", c.id},
                             {"role", to_string(c.role)},
                             {"loss", finite_or_null(c.loss)},
                             {"accuracy", finite_or_null(c.accuracy)},
                             {"macro_f1", finite_or_null(c.macro_f1)}});
        }
        rounds.push_back(
            {{"round", rec.round}, {"mean_benign_f1", finite_or_null(rec.mean_benign_f1)}, {"clients", clients}});
      }
      run["rounds"] = rounds;
    }
    runs.push_back(std::move(run));
  }
  json doc = {
      {"schema_version", bundle.schema_version},
      {"tool", "dflsim"},
      {"version", bundle.version},
      {"metadata", {{"created_at", bundle.created_at}}},
      {"config", bundle.config_json.empty() ? json::object() : json::parse(bundle.config_json)},
      {"runs", runs},
  };
  return doc.dump(1) + "\n";
}

ResultsBundle bundle_from_json(const std::string& text) {
  ResultsBundle b;
  try {
    const json doc = json::parse(text);
    b.schema_version = doc.at("schema_version").get<int>();
    if (b.schema_version != kResultsSchemaVersion) {
      throw FormatError("unsupported results schema version " + std::to_string(b.schema_version));
    }
    b.version = doc.at("version").get<std::string>();
    b.created_at = doc.at("metadata").at("created_at").get<std::string>();
    b.config_json = doc.at("config").dump();
    for (const auto& run : doc.at("runs")) {
      RunOutcome r;
      r.run.index = run.at("index").get<std::size_t>();
      const auto& k = run.at("key");
      r.run.key.topology = parse_topology(k.at("topology").get<std::string>());
      r.run.key.aggregation = k.at("aggregation").get<std::string>();
      r.run.key.attack = k.at("attack").get<std::string>();
      r.run.key.fraction = k.at("fraction").get<double>();
      r.run.key.replicate = k.at("replicate").get<std::size_t>();
      r.run.config = parse_config_text(run.at("config").dump()).base;
      if (run.at("status").get<std::string>() != "ok") {
        r.error = run.value("error", std::string());
        b.runs.push_back(std::move(r));
        continue;
      }
      ExperimentResult res;
      const auto& s = run.at("summary");
      res.summary.initial_mean_benign_f1 = number_or_nan(s.at("initial_mean_benign_f1"));
      res.summary.final_mean_benign_f1 = number_or_nan(s.at("final_mean_benign_f1"));
      res.summary.malicious_ids = s.at("malicious_ids").get<std::vector<std::size_t>>();
      for (const auto& rj : run.at("rounds")) {
        RoundRecord rec;
        rec.round = rj.at("round").get<std::size_t>();
        rec.mean_benign_f1 = number_or_nan(rj.at("mean_benign_f1"));
        for (const auto& cj : rj.at("clients")) {
          ClientRecord c;
          c.id = cj.at("client_id").get<std::size_t>();
          c.role = cj.at("role").get<std::string>() == "malicious" ? Role::kMalicious : Role::kBenign;
          c.loss = number_or_nan(cj.at("loss"));
          c.accuracy = number_or_nan(cj.at("accuracy"));
          c.macro_f1 = number_or_nan(cj.at("macro_f1"));
          rec.per_client.push_back(c);
        }
        res.rounds.push_back(std::move(rec));
      }
      r.result = std::move(res);
      b.runs.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed results document: ") + e.what());
  } catch (const InvalidInputError& e) {
    throw FormatError(std::string("malformed results document: ") + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(std::string("malformed run config in results document: ") + e.what());
  }
  return b;
}

std::string without_timestamp(const std::string& json_text) {
  json doc = json::parse(json_text);
  doc["metadata"].erase("created_at");
  return doc.dump(1) + "\n";
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace dflsim
