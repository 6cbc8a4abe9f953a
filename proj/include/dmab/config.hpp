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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace dmab {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A named component with parameters, e.g. thm4(M=8, Q=1, delta=0.4).
struct ComponentSpec {
  std::string name;
  std::map<std::string, std::string> params;

  bool has(const std::string& key) const { return params.count(key) != 0; }
  std::string text(const std::string& key) const;
  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  std::size_t count(const std::string& key) const;
  std::size_t count(const std::string& key, std::size_t fallback) const;
  // name(k1=v1, k2=v2) with keys in sorted order.
  std::string describe() const;
};

// Parses "name" or "name(a, b, ...)" where positional values bind to the
// preset's parameter names, e.g. "thm4(8, 1, 0.4)" -> M=8, Q=1, delta=0.4.
ComponentSpec parse_component(const std::string& text);

struct ExperimentConfig {
  ComponentSpec instance;
  ComponentSpec graph;
  ComponentSpec policy;
  std::vector<std::size_t> horizons;
  std::vector<std::uint64_t> seeds;  // seed labels; stream seeds derive from index
  std::filesystem::path out_dir = "out";
  std::uint64_t master_seed = 0;
  std::size_t jobs = 1;
};

// Flat "key = value" lines with dotted sections:
//   instance = thm4(8, 1, 0.4)      or  instance.name = thm4 / instance.M = 8
//   graph = disconnected_clique(1)
//   policy.name = gossip_ucb
//   policy.C = 2
//   horizons = 1024, 2048, 4096
//   seeds = 20          (count: labels 0..19)  or  seeds = 3, 7, 11
//   master_seed = 1
//   out = results
// '#' starts a comment. A JSON object with the same keys (nested objects for
// sections) is accepted as well.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace dmab
