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
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "dmab/env.hpp"
#include "dmab/graph.hpp"

namespace dmab {

struct SuiteResult {
  std::string name;
  std::size_t checks = 0;
  std::size_t failures = 0;
  double seconds = 0.0;
  std::vector<std::string> messages;  // first few failures
  bool passed() const { return failures == 0; }
};

struct VerifyOptions {
  bool full = false;  // adds the information-monotonicity enumeration grid
  // Function under test for the KL suite; swapped out for fault injection.
  std::function<double(double)> per_step_kl;
};

struct EnumerationCase {
  std::string label;
  Instance instance;
  Graph graph;
};

// M = 3, K = 2: six coin positions times two point-mass patterns over
// {0, 1/4, 1/2, 3/4, 1}, each on the complete and the path graph.
std::vector<EnumerationCase> enumeration_grid();

SuiteResult verify_graph_suite();
SuiteResult verify_env_suite();
SuiteResult verify_kl_suite(const std::function<double(double)>& per_step_kl);
SuiteResult verify_enumeration_suite();

std::vector<SuiteResult> run_verify(const VerifyOptions& options);

// One row per suite; returns true when every suite passed.
bool print_verify_table(std::ostream& out, const std::vector<SuiteResult>& results);

}  // namespace dmab
