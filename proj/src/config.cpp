// Copyright 2026 The dmab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dmab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "dmab/text.hpp"

namespace dmab {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

// Positional parameter names per preset. A trailing "..." parameter absorbs
// the remaining arguments as a comma-separated list.
const std::map<std::string, std::vector<std::string>>& positional_names() {
  static const std::map<std::string, std::vector<std::string>> table = {
      {"thm4", {"M", "Q", "delta", "K"}},
      {"thm5", {"M", "Q"}},
      {"thm8", {"M", "T", "eta"}},
      {"custom", {"path"}},
      {"homogeneous", {"M", "means..."}},
      {"complete", {}},
      {"path", {}},
      {"empty", {}},
      {"disconnected_clique", {"Q"}},
      {"two_expander", {"eta"}},
      {"er", {"c"}},
      {"random_connected", {"c"}},
      {"edge_list", {"path"}},
      {"periodic_union", {"window", "files..."}},
      {"gossip_ucb", {"C"}},
      {"exp3_gossip", {"gamma0"}},
      {"fixed", {"k"}},
      {"full_info_leader", {}},
      {"uniform_random", {}},
  };
  return table;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(value, &used);
    if (used != value.size() || value.front() == '-') throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + value + "'");
  }
}

void flatten_json(const nlohmann::json& j, const std::string& prefix,
                  std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const auto key = prefix.empty() ? it.key() : prefix + "." + it.key();
      if (it.value().is_object() && !prefix.empty())
        throw ConfigError("config: nesting too deep at '" + key + "'");
      flatten_json(it.value(), key, out);
    }
  } else if (j.is_array()) {
    std::string joined;
    for (const auto& item : j) {
      if (!joined.empty()) joined += ",";
      joined += item.is_string() ? item.get<std::string>() : item.dump();
    }
    out.emplace_back(prefix, joined);
  } else if (j.is_string()) {
    out.emplace_back(prefix, j.get<std::string>());
  } else {
    out.emplace_back(prefix, j.dump());
  }
}

ExperimentConfig build(const std::vector<std::pair<std::string, std::string>>& entries) {
  ExperimentConfig cfg;
  std::map<std::string, ComponentSpec*> sections = {
      {"instance", &cfg.instance}, {"graph", &cfg.graph}, {"policy", &cfg.policy}};
  std::vector<std::pair<ComponentSpec*, std::pair<std::string, std::string>>> dotted;
  bool have_horizons = false;
  bool have_seeds = false;

  for (const auto& [key, value] : entries) {
    const auto dot = key.find('.');
    const auto head = key.substr(0, dot);
    if (sections.count(head)) {
      auto* spec = sections[head];
      if (dot == std::string::npos) {
        auto parsed = parse_component(value);
        spec->name = parsed.name;
        for (auto& [k, v] : parsed.params) spec->params[k] = v;
      } else {
        dotted.push_back({spec, {key.substr(dot + 1), value}});
      }
    } else if (key == "horizons") {
      for (const auto& item : split(value, ',')) cfg.horizons.push_back(parse_u64(key, item));
      have_horizons = true;
    } else if (key == "seeds") {
      const auto items = split(value, ',');
      if (items.size() == 1) {
        const auto n = parse_u64(key, items.front());
        for (std::uint64_t i = 0; i < n; ++i) cfg.seeds.push_back(i);
      } else {
        for (const auto& item : items) cfg.seeds.push_back(parse_u64(key, item));
      }
      have_seeds = true;
    } else if (key == "master_seed") {
      cfg.master_seed = parse_u64(key, value);
    } else if (key == "out") {
      cfg.out_dir = value;
    } else if (key == "jobs") {
      cfg.jobs = parse_u64(key, value);
      if (cfg.jobs == 0) throw ConfigError("config: jobs must be at least 1");
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  for (auto& [spec, kv] : dotted) {
    if (kv.first == "name") spec->name = kv.second;
    else spec->params[kv.first] = kv.second;
  }

  for (const auto& [name, spec] : sections)
    if (spec->name.empty()) throw ConfigError("config: missing " + name + " name");
  if (!have_horizons || cfg.horizons.empty()) throw ConfigError("config: missing horizons");
  if (!have_seeds || cfg.seeds.empty()) throw ConfigError("config: missing seeds");
  for (std::size_t i = 0; i < cfg.horizons.size(); ++i) {
    if (cfg.horizons[i] == 0) throw ConfigError("config: horizons must be positive");
    if (i > 0 && cfg.horizons[i] <= cfg.horizons[i - 1])
      throw ConfigError("config: horizons must be strictly increasing");
  }
  auto sorted = cfg.seeds;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ConfigError("config: duplicate seed labels");
  return cfg;
}

}  // namespace

std::string ComponentSpec::text(const std::string& key) const {
  const auto it = params.find(key);
  if (it == params.end()) throw ConfigError(name + ": missing parameter '" + key + "'");
  return it->second;
}

double ComponentSpec::number(const std::string& key) const {
  const auto raw = text(key);
  try {
    return parse_double(raw);
  } catch (const std::exception&) {
    throw ConfigError(name + "." + key + ": expected a number, got '" + raw + "'");
  }
}

double ComponentSpec::number(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

std::size_t ComponentSpec::count(const std::string& key) const {
  const double v = number(key);
  if (!(v >= 0.0) || v != std::floor(v))
    throw ConfigError(name + "." + key + ": expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

std::size_t ComponentSpec::count(const std::string& key, std::size_t fallback) const {
  return has(key) ? count(key) : fallback;
}

std::string ComponentSpec::describe() const {
  if (params.empty()) return name;
  std::string out = name + "(";
  bool first = true;
  for (const auto& [k, v] : params) {
    if (!first) out += ", ";
    out += k + "=" + v;
    first = false;
  }
  return out + ")";
}

ComponentSpec parse_component(const std::string& raw) {
  const auto text = trim(raw);
  ComponentSpec spec;
  const auto open = text.find('(');
  if (open == std::string::npos) {
    spec.name = text;
    if (spec.name.empty()) throw ConfigError("empty component name");
    return spec;
  }
  if (text.back() != ')') throw ConfigError("component '" + text + "': missing ')'");
  spec.name = trim(text.substr(0, open));
  const auto inner = trim(text.substr(open + 1, text.size() - open - 2));
  const auto table = positional_names().find(spec.name);
  if (table == positional_names().end())
    throw ConfigError("unknown component '" + spec.name + "'");
  if (inner.empty()) return spec;
  const auto args = split(inner, ',');
  const auto& names = table->second;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const auto eq = args[i].find('=');
    if (eq != std::string::npos) {  // named argument
      const auto key = trim(args[i].substr(0, eq));
      if (key.empty()) throw ConfigError("component '" + text + "': empty argument name");
      spec.params[key] = trim(args[i].substr(eq + 1));
      continue;
    }
    if (i >= names.size()) throw ConfigError("component '" + text + "': too many arguments");
    const auto& pname = names[i];
    if (pname.size() > 3 && pname.compare(pname.size() - 3, 3, "...") == 0) {
      std::string rest;
      for (std::size_t r = i; r < args.size(); ++r) rest += (r > i ? "," : "") + args[r];
      spec.params[pname.substr(0, pname.size() - 3)] = rest;
      break;
    }
    spec.params[pname] = args[i];
  }
  return spec;
}

ExperimentConfig parse_config(std::istream& in) {
  std::stringstream buffer;
  buffer << in.rdbuf();
  const auto content = buffer.str();
  std::vector<std::pair<std::string, std::string>> entries;

  const auto first = content.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && content[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(content);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    flatten_json(j, "", entries);
    return build(entries);
  }

  std::istringstream lines(content);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return build(entries);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return parse_config(in);
}

}  // namespace dmab
