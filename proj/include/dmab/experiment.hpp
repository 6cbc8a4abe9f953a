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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dmab/analysis.hpp"
#include "dmab/config.hpp"
#include "dmab/env.hpp"
#include "dmab/graph.hpp"
#include "dmab/policy.hpp"
#include "dmab/sim.hpp"

namespace dmab {

// One (T, seed) cell of an experiment grid.
struct RunCell {
  std::size_t horizon_index = 0;
  std::size_t horizon = 0;
  std::uint64_t seed_label = 0;
  std::uint64_t stream_seed = 0;
};

// Stream seed of a cell: derive_seed(master, horizon_index, seed_label).
// Each cell owns its stream, so editing one seed label leaves every other
// cell's output untouched.
std::uint64_t stream_seed(std::uint64_t master, std::size_t horizon_index, std::uint64_t seed_label);

// Cells in (T, seed) order, the order every report is merged in.
std::vector<RunCell> plan_cells(const ExperimentConfig& cfg);

// Instance presets:
//   thm4(M, Q, delta[, K])   thm5(M, Q)   thm8(M, T, eta)
//   custom(path)             homogeneous(M, mu_1, ..., mu_K)
// custom and homogeneous take reward = bernoulli | point (default bernoulli).
// thm8 accepts M = auto, meaning T^(1/3) rounded to a multiple of 4 (at
// least 4), and is rebuilt for every horizon; a given T must match it. The
// thm5 coin is drawn from the cell's stream.
Environment build_environment(const ComponentSpec& spec, std::size_t horizon,
                              std::uint64_t stream_seed);

// Graph presets: complete, path, empty, disconnected_clique(Q),
// two_expander(eta), er(c), random_connected(c), edge_list(path),
// periodic_union(window, file, file, ...).
TemporalGraphModel build_graph_model(const ComponentSpec& spec, std::size_t clients);

// Policy presets: gossip_ucb(C), exp3_gossip(gamma0), full_info_leader,
// fixed(k) with 1-based k, uniform_random.
std::unique_ptr<Policy> build_policy(const ComponentSpec& spec, std::size_t arms);

Trajectory execute_cell(const ExperimentConfig& cfg, const RunCell& cell);

std::string run_file_name(const RunCell& cell);

// Writes `content` to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

struct RunSummary {
  RunCell cell;
  std::string file;
  double final_regret = 0.0;
  std::size_t disagreement_steps = 0;
};

// Runs every cell on cfg.jobs threads, writes run_T{T}_s{seed}.csv per cell
// and a runs.json sidecar. Summaries come back in plan order.
std::vector<RunSummary> cmd_run(const ExperimentConfig& cfg);

struct SweepReport {
  std::vector<AggregatePoint> aggregate;
  std::optional<ScalingFit> fit;  // empty when the fit was refused
  std::vector<std::string> warnings;
};

// Runs the grid (or, with `replay`, reads the run CSVs already in out_dir),
// then writes aggregate.csv and fit.json. Needs >= 3 horizons and >= 2 seeds.
SweepReport cmd_sweep(const ExperimentConfig& cfg, bool replay = false);

// Final cumulative regret stored in a trajectory CSV.
double read_final_regret(std::istream& in);

// Prints global statistics and, for thm8, eps, d, D and the bound checks.
// Returns false when a check fails. `horizon` is used when the spec omits T.
bool print_instance_info(std::ostream& out, const ComponentSpec& spec,
                         std::optional<std::size_t> horizon = std::nullopt);

}  // namespace dmab
