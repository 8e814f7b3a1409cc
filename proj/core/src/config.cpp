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

#include "dflsim/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "dflsim/errors.hpp"
#include "dflsim/rng.hpp"

namespace dflsim {

using nlohmann::json;

namespace {

constexpr double kUniformDirichletAlpha = 100.0;

std::string child(const std::string& path, std::string_view key) {
  return path + "/" + std::string(key);
}

std::string child(const std::string& path, std::size_t index) {
  return path + "/" + std::to_string(index);
}

void require_object(const json& j, const std::string& path,
                    std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "/" : path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) {
      std::string valid;
      for (auto a : allowed) valid += (valid.empty() ? "" : ", ") + std::string(a);
      throw ConfigError(child(path, key), "unknown key (valid: " + valid + ")");
    }
  }
}

std::uint64_t as_uint(const json& j, const std::string& path) {
  if (!j.is_number_unsigned()) {
    if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return j.get<std::uint64_t>();
    throw ConfigError(path, "expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError(path, "expected true or false");
  return j.get<bool>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

template <typename T>
void read_uint(const json& obj, const std::string& path, std::string_view key, T& out) {
  if (auto it = obj.find(std::string(key)); it != obj.end()) {
    out = static_cast<T>(as_uint(*it, child(path, key)));
  }
}

void read_double(const json& obj, const std::string& path, std::string_view key, double& out) {
  if (auto it = obj.find(std::string(key)); it != obj.end()) out = as_double(*it, child(path, key));
}

void read_bool(const json& obj, const std::string& path, std::string_view key, bool& out) {
  if (auto it = obj.find(std::string(key)); it != obj.end()) out = as_bool(*it, child(path, key));
}

// Maps a string through `parse`, turning InvalidInputError into ConfigError.
template <typename Parse>
auto as_enum(const json& j, const std::string& path, Parse parse) {
  const std::string name = as_string(j, path);
  try {
    return parse(name);
  } catch (const InvalidInputError& e) {
    throw ConfigError(path, e.what());
  }
}

template <typename E>
E choose(const std::string& name, std::initializer_list<std::pair<std::string_view, E>> options,
         std::string_view what) {
  std::string valid;
  for (const auto& [n, v] : options) {
    if (name == n) return v;
    valid += (valid.empty() ? "" : ", ") + std::string(n);
  }
  throw InvalidInputError("unknown " + std::string(what) + " '" + name + "' (valid: " + valid + ")");
}

AttackSpec parse_attack_node(const json& j, const std::string& path) {
  AttackSpec spec;
  if (j.is_string()) {
    spec.kind = as_enum(j, path, parse_attack);
    return spec;
  }
  require_object(j, path, {"name", "top_k_percent", "per_client"});
  if (!j.contains("name")) throw ConfigError(child(path, "name"), "missing required key");
  spec.kind = as_enum(j["name"], child(path, "name"), parse_attack);
  read_uint(j, path, "top_k_percent", spec.top_k_percent);
  if (spec.top_k_percent > 100) throw ConfigError(child(path, "top_k_percent"), "must be at most 100");
  read_bool(j, path, "per_client", spec.per_client);
  return spec;
}

AggregationSpec parse_aggregation_node(const json& j, const std::string& path) {
  AggregationSpec spec;
  if (j.is_string()) {
    spec.kind = as_enum(j, path, parse_aggregation);
    return spec;
  }
  require_object(j, path, {"name", "f", "trim_ratio"});
  if (!j.contains("name")) throw ConfigError(child(path, "name"), "missing required key");
  spec.kind = as_enum(j["name"], child(path, "name"), parse_aggregation);
  if (auto it = j.find("f"); it != j.end() && !it->is_null()) {
    spec.krum_f = static_cast<std::size_t>(as_uint(*it, child(path, "f")));
  }
  read_double(j, path, "trim_ratio", spec.trim_ratio);
  if (!(spec.trim_ratio >= 0.0 && spec.trim_ratio < 0.5)) {
    throw ConfigError(child(path, "trim_ratio"), "must lie in [0, 0.5)");
  }
  return spec;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

DatasetSource parse_dataset(const json& j, const std::string& path, const std::filesystem::path& base) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  if (!j.contains("kind")) throw ConfigError(child(path, "kind"), "missing required key");
  const std::string kind = as_string(j["kind"], child(path, "kind"));
  if (kind == "blobs") {
    require_object(j, path, {"kind", "classes", "train_per_class", "test_per_class", "feature_dim",
                             "spread", "seed"});
    BlobsSource b;
    read_uint(j, path, "classes", b.classes);
    read_uint(j, path, "train_per_class", b.train_per_class);
    read_uint(j, path, "test_per_class", b.test_per_class);
    read_uint(j, path, "feature_dim", b.feature_dim);
    read_double(j, path, "spread", b.spread);
    if (auto it = j.find("seed"); it != j.end()) b.seed = as_uint(*it, child(path, "seed"));
    if (b.classes < 2) throw ConfigError(child(path, "classes"), "need at least 2 classes");
    if (b.train_per_class == 0) throw ConfigError(child(path, "train_per_class"), "must be positive");
    if (b.test_per_class == 0) throw ConfigError(child(path, "test_per_class"), "must be positive");
    if (b.feature_dim == 0) throw ConfigError(child(path, "feature_dim"), "must be positive");
    if (!(b.spread >= 0.0)) throw ConfigError(child(path, "spread"), "must be non-negative");
    return b;
  }
  if (kind == "idx") {
    require_object(j, path, {"kind", "train_images", "train_labels", "test_images", "test_labels",
                             "train_limit", "test_limit", "classes"});
    IdxSource s;
    for (auto [key, dst] : {std::pair{"train_images", &s.train_images}, std::pair{"train_labels", &s.train_labels},
                            std::pair{"test_images", &s.test_images}, std::pair{"test_labels", &s.test_labels}}) {
      if (!j.contains(key)) throw ConfigError(child(path, key), "missing required key");
      *dst = resolve(base, as_string(j[key], child(path, key)));
    }
    if (auto it = j.find("train_limit"); it != j.end()) s.train_limit = as_uint(*it, child(path, "train_limit"));
    if (auto it = j.find("test_limit"); it != j.end()) s.test_limit = as_uint(*it, child(path, "test_limit"));
    read_uint(j, path, "classes", s.classes);
    return s;
  }
  throw ConfigError(child(path, "kind"), "unknown dataset kind '" + kind + "' (valid: blobs, idx)");
}

template <typename T, typename Fn>
std::vector<T> parse_list(const json& j, const std::string& path, Fn item) {
  if (!j.is_array()) throw ConfigError(path, "expected a list");
  std::vector<T> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(item(j[i], child(path, i)));
  return out;
}

}  // namespace

ConfigFile parse_config_text(const std::string& text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  require_object(root, "", {"name", "seed", "clients", "topology", "malicious_fraction", "role_policy",
                            "rounds", "threads", "init", "malicious_state", "f1_average", "attack",
                            "aggregation", "train", "model", "dataset", "partition", "sweep", "output"});

  ConfigFile cfg;
  ExperimentConfig& e = cfg.base;
  if (auto it = root.find("name"); it != root.end()) cfg.name = as_string(*it, "/name");

  if (!root.contains("dataset")) throw ConfigError("/dataset", "missing required key");
  e.dataset = parse_dataset(root["dataset"], "/dataset", base_dir);

  read_uint(root, "", "seed", e.seed);
  read_uint(root, "", "clients", e.clients);
  read_uint(root, "", "rounds", e.rounds);
  read_uint(root, "", "threads", e.threads);
  read_double(root, "", "malicious_fraction", e.malicious_fraction);
  if (auto it = root.find("topology"); it != root.end()) e.topology = as_enum(*it, "/topology", parse_topology);
  if (auto it = root.find("role_policy"); it != root.end()) {
    e.role_policy = as_enum(*it, "/role_policy", [](const std::string& n) {
      return choose<RolePolicy>(n, {{"random", RolePolicy::kRandom}, {"exclude_hub", RolePolicy::kExcludeHub}},
                                "role policy");
    });
  }
  if (auto it = root.find("init"); it != root.end()) {
    e.init = as_enum(*it, "/init", [](const std::string& n) {
      return choose<InitPolicy>(n, {{"shared", InitPolicy::kShared}, {"per_client", InitPolicy::kPerClient}},
                                "init policy");
    });
  }
  if (auto it = root.find("malicious_state"); it != root.end()) {
    e.malicious_state = as_enum(*it, "/malicious_state", [](const std::string& n) {
      return choose<MaliciousState>(
          n, {{"honest", MaliciousState::kHonest}, {"poisoned", MaliciousState::kPoisoned}}, "malicious state");
    });
  }
  if (auto it = root.find("f1_average"); it != root.end()) {
    e.f1_average = as_enum(*it, "/f1_average", [](const std::string& n) {
      return choose<F1Average>(n, {{"macro", F1Average::kMacro}, {"weighted", F1Average::kWeighted}},
                               "F1 average");
    });
  }
  if (auto it = root.find("attack"); it != root.end()) e.attack = parse_attack_node(*it, "/attack");
  if (auto it = root.find("aggregation"); it != root.end()) {
    e.aggregation = parse_aggregation_node(*it, "/aggregation");
  }

  if (auto it = root.find("train"); it != root.end()) {
    require_object(*it, "/train", {"learning_rate", "batch_size", "local_epochs"});
    read_double(*it, "/train", "learning_rate", e.train.learning_rate);
    read_uint(*it, "/train", "batch_size", e.train.batch_size);
    read_uint(*it, "/train", "local_epochs", e.train.local_epochs);
    if (!(e.train.learning_rate > 0.0)) {
      throw ConfigError("/train/learning_rate", "must be positive");
    }
    if (e.train.batch_size == 0) throw ConfigError("/train/batch_size", "must be positive");
    if (e.train.local_epochs == 0) throw ConfigError("/train/local_epochs", "must be positive");
  }
  if (auto it = root.find("model"); it != root.end()) {
    require_object(*it, "/model", {"hidden"});
    if (auto h = it->find("hidden"); h != it->end()) {
      e.hidden_layers = parse_list<std::size_t>(*h, "/model/hidden", [](const json& x, const std::string& p) {
        const auto v = as_uint(x, p);
        if (v == 0) throw ConfigError(p, "layer sizes must be positive");
        return static_cast<std::size_t>(v);
      });
    }
  }
  if (auto it = root.find("partition"); it != root.end()) {
    require_object(*it, "/partition", {"mode", "alpha"});
    const std::string mode = it->contains("mode") ? as_string((*it)["mode"], "/partition/mode") : "iid";
    if (mode == "dirichlet") {
      double alpha = kUniformDirichletAlpha;
      read_double(*it, "/partition", "alpha", alpha);
      if (alpha < kUniformDirichletAlpha) {
        throw ConfigError("/partition/alpha",
                          "only near-uniform Dirichlet partitions (alpha >= 100) are supported; "
                          "they are sampled as IID");
      }
    } else if (mode != "iid") {
      throw ConfigError("/partition/mode", "unknown partition mode '" + mode + "' (valid: iid, dirichlet)");
    } else if (it->contains("alpha")) {
      throw ConfigError("/partition/alpha", "alpha only applies to mode 'dirichlet'");
    }
  }

  if (auto it = root.find("sweep"); it != root.end()) {
    require_object(*it, "/sweep", {"topology", "aggregation", "attack", "malicious_fraction", "replicates"});
    const json& s = *it;
    if (s.contains("topology")) {
      cfg.sweep.topologies = parse_list<TopologyKind>(s["topology"], "/sweep/topology",
                                                      [](const json& x, const std::string& p) {
                                                        return as_enum(x, p, parse_topology);
                                                      });
    }
    if (s.contains("aggregation")) {
      cfg.sweep.aggregations =
          parse_list<AggregationSpec>(s["aggregation"], "/sweep/aggregation", parse_aggregation_node);
    }
    if (s.contains("attack")) {
      cfg.sweep.attacks = parse_list<AttackSpec>(s["attack"], "/sweep/attack", parse_attack_node);
    }
    if (s.contains("malicious_fraction")) {
      cfg.sweep.malicious_fractions = parse_list<double>(s["malicious_fraction"], "/sweep/malicious_fraction",
                                                         [](const json& x, const std::string& p) {
                                                           return as_double(x, p);
                                                         });
    }
    read_uint(s, "/sweep", "replicates", cfg.sweep.replicates);
    if (cfg.sweep.replicates == 0) throw ConfigError("/sweep/replicates", "must be positive");
  }

  if (auto it = root.find("output"); it != root.end()) {
    require_object(*it, "/output", {"dir", "format", "charts", "fail_fast", "parallel"});
    if (auto d = it->find("dir"); d != it->end()) cfg.output.dir = resolve(base_dir, as_string(*d, "/output/dir"));
    if (auto f = it->find("format"); f != it->end()) {
      cfg.output.format = as_enum(*f, "/output/format", [](const std::string& n) {
        return choose<OutputFormat>(n, {{"csv", OutputFormat::kCsv}, {"json", OutputFormat::kJson}}, "format");
      });
    }
    read_bool(*it, "/output", "charts", cfg.output.charts);
    read_bool(*it, "/output", "fail_fast", cfg.output.fail_fast);
    read_bool(*it, "/output", "parallel", cfg.output.parallel);
  }

  // Cross-field checks, reported against the most specific key.
  const auto check = [&](const ExperimentConfig& run, const std::string& where) {
    try {
      run.validate();
      TopologyGraph::build(run.topology, run.clients);
    } catch (const InvalidInputError& err) {
      throw ConfigError(where, err.what());
    }
  };
  for (const auto& run : plan_runs(cfg)) {
    check(run.config, cfg.sweep.malicious_fractions.empty() && cfg.sweep.topologies.empty() ? ""
                                                                                            : "/sweep");
  }
  return cfg;
}

ConfigFile parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config_text(ss.str(), path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ":" + (e.location().empty() ? "/" : e.location()),
                      std::string(e.what()).substr(e.location().empty() ? 0 : e.location().size() + 2));
  }
}

std::vector<PlannedRun> plan_runs(const ConfigFile& cfg) {
  const auto& s = cfg.sweep;
  const auto topologies = s.topologies.empty() ? std::vector{cfg.base.topology} : s.topologies;
  const auto aggregations = s.aggregations.empty() ? std::vector{cfg.base.aggregation} : s.aggregations;
  const auto attacks = s.attacks.empty() ? std::vector{cfg.base.attack} : s.attacks;
  const auto fractions =
      s.malicious_fractions.empty() ? std::vector{cfg.base.malicious_fraction} : s.malicious_fractions;

  std::vector<PlannedRun> plan;
  for (auto topology : topologies) {
    for (const auto& aggregation : aggregations) {
      for (const auto& attack : attacks) {
        for (double fraction : fractions) {
          for (std::size_t rep = 0; rep < s.replicates; ++rep) {
            PlannedRun run;
            run.index = plan.size();
            run.config = cfg.base;
            run.config.topology = topology;
            run.config.aggregation = aggregation;
            run.config.attack = attack;
            run.config.malicious_fraction = fraction;
            if (auto* blobs = std::get_if<BlobsSource>(&run.config.dataset); blobs && !blobs->seed) {
              blobs->seed = cfg.base.seed;
            }
            run.config.seed = derive_seed({cfg.base.seed, rep});
            run.key = {topology, std::string(to_string(aggregation.kind)), std::string(to_string(attack.kind)),
                       fraction, rep};
            plan.push_back(std::move(run));
          }
        }
      }
    }
  }
  return plan;
}

std::string_view to_string(OutputFormat format) noexcept {
  return format == OutputFormat::kCsv ? "csv" : "json";
}

namespace {

json attack_json(const AttackSpec& a) {
  return {{"name", to_string(a.kind)}, {"top_k_percent", a.top_k_percent}, {"per_client", a.per_client}};
}

json aggregation_json(const AggregationSpec& a) {
  json j = {{"name", to_string(a.kind)}, {"trim_ratio", a.trim_ratio}};
  j["f"] = a.krum_f ? json(*a.krum_f) : json(nullptr);
  return j;
}

json dataset_json(const DatasetSource& source) {
  if (const auto* b = std::get_if<BlobsSource>(&source)) {
    json j = {{"kind", "blobs"},          {"classes", b->classes},         {"train_per_class", b->train_per_class},
              {"test_per_class", b->test_per_class}, {"feature_dim", b->feature_dim}, {"spread", b->spread}};
    if (b->seed) j["seed"] = *b->seed;
    return j;
  }
  const auto& s = std::get<IdxSource>(source);
  json j = {{"kind", "idx"},
            {"train_images", s.train_images.string()},
            {"train_labels", s.train_labels.string()},
            {"test_images", s.test_images.string()},
            {"test_labels", s.test_labels.string()},
            {"classes", s.classes}};
  if (s.train_limit) j["train_limit"] = *s.train_limit;
  if (s.test_limit) j["test_limit"] = *s.test_limit;
  return j;
}

json experiment_json(const ExperimentConfig& e) {
  return {
      {"seed", e.seed},
      {"clients", e.clients},
      {"topology", to_string(e.topology)},
      {"malicious_fraction", e.malicious_fraction},
      {"role_policy", e.role_policy == RolePolicy::kRandom ? "random" : "exclude_hub"},
      {"rounds", e.rounds},
      {"threads", e.threads},
      {"init", e.init == InitPolicy::kShared ? "shared" : "per_client"},
      {"malicious_state", e.malicious_state == MaliciousState::kHonest ? "honest" : "poisoned"},
      {"f1_average", e.f1_average == F1Average::kMacro ? "macro" : "weighted"},
      {"attack", attack_json(e.attack)},
      {"aggregation", aggregation_json(e.aggregation)},
      {"train",
       {{"learning_rate", e.train.learning_rate},
        {"batch_size", e.train.batch_size},
        {"local_epochs", e.train.local_epochs}}},
      {"model", {{"hidden", e.hidden_layers}}},
      {"dataset", dataset_json(e.dataset)},
      {"partition", {{"mode", "iid"}}},
  };
}

}  // namespace

std::string to_json_text(const ExperimentConfig& cfg) { return experiment_json(cfg).dump(); }

std::string to_json_text(const ConfigFile& cfg) {
  json j = experiment_json(cfg.base);
  if (!cfg.name.empty()) j["name"] = cfg.name;
  json sweep = json::object();
  if (!cfg.sweep.topologies.empty()) {
    json list = json::array();
    for (auto t : cfg.sweep.topologies) list.push_back(to_string(t));
    sweep["topology"] = list;
  }
  if (!cfg.sweep.aggregations.empty()) {
    json list = json::array();
    for (const auto& a : cfg.sweep.aggregations) list.push_back(aggregation_json(a));
    sweep["aggregation"] = list;
  }
  if (!cfg.sweep.attacks.empty()) {
    json list = json::array();
    for (const auto& a : cfg.sweep.attacks) list.push_back(attack_json(a));
    sweep["attack"] = list;
  }
  if (!cfg.sweep.malicious_fractions.empty()) sweep["malicious_fraction"] = cfg.sweep.malicious_fractions;
  sweep["replicates"] = cfg.sweep.replicates;
  j["sweep"] = sweep;
  j["output"] = {{"dir", cfg.output.dir.string()},
                 {"format", to_string(cfg.output.format)},
                 {"charts", cfg.output.charts},
                 {"fail_fast", cfg.output.fail_fast},
                 {"parallel", cfg.output.parallel}};
  return j.dump();
}

}  // namespace dflsim
