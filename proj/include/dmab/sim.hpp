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
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dmab/env.hpp"
#include "dmab/graph.hpp"
#include "dmab/matrix.hpp"
#include "dmab/policy.hpp"

namespace dmab {

// Record of one run. Steps are 1-based in the API, arms 0-based.
struct Trajectory {
  std::size_t horizon = 0;
  std::size_t clients = 0;
  std::size_t arms = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint32_t> actions;         // step-major: [(t-1)*M + m]
  Matrix<std::size_t> pull_counts;            // n_{m,i}(T)
  std::vector<double> regret_curve;           // cumulative pseudo-regret after step t
  std::vector<double> realized_curve;         // cumulative realized regret after step t
  std::vector<std::uint32_t> disagreement_curve;  // T_d after step t
  std::size_t agreement_steps = 0;            // T_a
  std::size_t disagreement_steps = 0;         // T_d
  // Present only for epoch-adversary runs.
  std::optional<std::size_t> epoch_length;
  std::optional<std::size_t> epoch_count;
  std::vector<std::size_t> epoch_states;

  std::size_t action(std::size_t m, std::size_t t) const {
    return actions[(t - 1) * clients + m];
  }
  std::span<const std::uint32_t> actions_at(std::size_t t) const {
    return {actions.data() + (t - 1) * clients, clients};
  }
  double final_regret() const { return regret_curve.empty() ? 0.0 : regret_curve.back(); }

  bool operator==(const Trajectory&) const = default;
};

// Rewards for steps 1..T, each an M x K matrix.
using RewardTape = std::vector<Matrix<double>>;

// Per step: emit G_t; every client acts on messages through t-1; draw the
// full reward matrix; exchange messages along E_t (self included) under the
// policy's information model; accumulate regret. Deterministic in `seed`.
Trajectory run(const Environment& env, const TemporalGraphModel& graphs, Policy& policy,
               std::size_t horizon, std::uint64_t seed);

// Same protocol with rewards taken from `tape` instead of the reward stream.
Trajectory run_with_rewards(const Environment& env, const TemporalGraphModel& graphs,
                            Policy& policy, std::uint64_t seed, const RewardTape& tape);

// The rewards run(env, ..., horizon, seed) would draw.
RewardTape record_rewards(const Environment& env, std::size_t horizon, std::uint64_t seed);

// Epoch states run(env, ..., seed) materializes for an epoch adversary.
AdversarialEpochInstance materialized_for_run(const AdversarialEpochInstance& inst,
                                              std::uint64_t seed);

// (1/M) sum_m Delta_{a_m}: the step's contribution to
// R_T = T mu_{i*} - (1/M) sum_t sum_m mu_{a_m^t}.
double pseudo_regret_step(std::span<const std::uint32_t> actions, const GlobalStats& stats);

struct AgreementDecomposition {
  std::size_t agreement_steps = 0;     // T_a
  std::size_t disagreement_steps = 0;  // T_d
  double total_regret = 0.0;
  double agreement_sum = 0.0;     // sum_{t in T_a} (mu_1 - mu_{a_t})
  double disagreement_sum = 0.0;  // sum_{t in T_d} (1/M) sum_m (mu_1 - mu_{a_t^m})

  // Two-armed runs only; `refusal` explains why the checks are absent.
  bool identity_checked = false;
  std::string refusal;
  double suboptimal_gap = 0.0;  // Delta_2
  // |R - (disagreement_sum + agreement_sum)|: exact split.
  double split_residual = 0.0;
  // |R - (T_d * Delta_2 + agreement_sum)|: the disagreement steps charged a
  // full gap each. Zero only when T_d = 0 or Delta_2 = 0.
  double full_gap_residual = 0.0;
};

AgreementDecomposition agreement_decomposition(const Trajectory& traj, const GlobalStats& stats);

// n_{m,1}(T, j): pulls of arm 1 (index 0) by client m in epoch j. Column j-1
// holds epoch j; steps past D*d count toward epoch D.
Matrix<std::size_t> epoch_pull_counts(const Trajectory& traj, const AdversarialEpochInstance& inst);

// CSV with header t,cum_regret,realized_regret,T_d_so_far.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

}  // namespace dmab
