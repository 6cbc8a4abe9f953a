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
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dmab/graph.hpp"
#include "dmab/matrix.hpp"
#include "dmab/rng.hpp"

namespace dmab {

// Reward law of one (client, arm) cell. Support is always inside [0, 1].
struct ArmDistribution {
  enum class Kind { Bernoulli, PointMass };

  Kind kind = Kind::PointMass;
  double parameter = 0.0;

  static ArmDistribution bernoulli(double p);
  static ArmDistribution point_mass(double v);

  double mean() const { return parameter; }
  // Consumes exactly one uniform draw regardless of kind, so reward streams
  // stay aligned across instances of different composition.
  double sample(Rng& rng) const;

  bool operator==(const ArmDistribution&) const = default;
};

// Bit drawn once per run and fixed for the whole horizon.
struct LatentCoinState {
  int x = 0;
};

// Stationary stochastic environment: one ArmDistribution per client and arm.
class Instance {
 public:
  Instance(std::string name, Matrix<ArmDistribution> dists,
           std::optional<LatentCoinState> latent = std::nullopt);

  const std::string& name() const { return name_; }
  std::size_t client_count() const { return dists_.rows(); }
  std::size_t arm_count() const { return dists_.cols(); }
  const ArmDistribution& dist(std::size_t m, std::size_t k) const { return dists_(m, k); }
  const Matrix<ArmDistribution>& dists() const { return dists_; }
  const std::optional<LatentCoinState>& latent() const { return latent_; }

  // Per-client means mu_i^m.
  Matrix<double> means() const;

 private:
  std::string name_;
  Matrix<ArmDistribution> dists_;
  std::optional<LatentCoinState> latent_;
};

struct GlobalStats {
  std::vector<double> global_means;  // mu_i = (1/M) sum_m mu_i^m
  std::size_t optimal_arm = 0;       // lowest index among maximizers
  std::vector<double> gaps;          // Delta_i = mu_{i*} - mu_i
};

GlobalStats stats_from_means(const Matrix<double>& means);
GlobalStats global_stats(const Instance& inst);

// Clients in the clique [0, q) pay (0, 2*delta/q, 0, ...); the rest pay
// ((m-1)/(m-q)*delta, 0, ...). All point masses. Gap of arm 2 is (m-3)delta/m.
Instance make_thm4_instance(std::size_t m, std::size_t q, double delta, std::size_t k = 2);

// Two-armed latent-coin instance. Clients outside the clique [0, q) pay the
// coin x on arm 1 and 1/2 on arm 2; clique clients pay 1/2 on both.
Instance make_thm5_instance(std::size_t m, std::size_t q, Rng& rng, std::size_t k = 2);
Instance make_thm5_instance_with_coin(std::size_t m, std::size_t q, int x, std::size_t k = 2);

// Every client shares the same arm means; Bernoulli or point-mass rewards.
Instance make_homogeneous_instance(std::size_t m, std::span<const double> arm_means,
                                   ArmDistribution::Kind kind);

// Whitespace-separated M x K table of means, one client per row. Blank lines
// and lines starting with '#' are skipped.
Instance read_custom_instance(std::istream& in, ArmDistribution::Kind kind,
                              std::string name = "custom");

// Epoch adversary on a two-expander layout. Epoch states hold X_j in
// {0, 1, ..., M/4}; X_j = i >= 1 favors the i-th node of I0.
class AdversarialEpochInstance {
 public:
  std::size_t client_count() const { return clients_; }
  std::size_t arm_count() const { return 2; }
  std::size_t horizon() const { return horizon_; }
  double eta() const { return eta_; }
  double epsilon() const { return epsilon_; }
  std::size_t epoch_length() const { return epoch_length_; }
  std::size_t epoch_count() const { return epoch_count_; }
  const NodeSet& i0() const { return i0_; }
  const NodeSet& i1() const { return i1_; }
  std::span<const std::size_t> epoch_states() const { return epoch_states_; }
  bool materialized() const { return materialized_; }

  // 1-based epoch containing 1-based step t; steps past D*d belong to epoch D.
  std::size_t epoch_of(std::size_t t) const;

  // Per-client means with X marginalized (uniform over M/4 + 1 outcomes).
  Matrix<double> marginal_means() const;
  // Distribution of cell (m, k) while the epoch state is x.
  ArmDistribution dist_given_state(std::size_t m, std::size_t k, std::size_t x) const;

 private:
  friend AdversarialEpochInstance make_thm8_instance(std::size_t, std::size_t, double);
  friend void resample_epoch_state(AdversarialEpochInstance&, std::size_t, Rng&);
  friend void materialize_epochs(AdversarialEpochInstance&, Rng&);

  std::size_t clients_ = 0;
  std::size_t horizon_ = 0;
  double eta_ = 0.0;
  double epsilon_ = 0.0;
  std::size_t epoch_length_ = 0;
  std::size_t epoch_count_ = 0;
  NodeSet i0_;
  NodeSet i1_;
  std::vector<std::size_t> epoch_states_;
  bool materialized_ = false;
};

// eps = sqrt(4/eta) * (M^2/2) * T^(-1/3), d = ceil(eta*M/8), D = floor(T/d).
// Throws std::invalid_argument naming the violated inequality.
AdversarialEpochInstance make_thm8_instance(std::size_t m, std::size_t t, double eta);

// Redraws X_j (1-based) uniformly from {0, ..., M/4}.
void resample_epoch_state(AdversarialEpochInstance& inst, std::size_t j, Rng& rng);
// Draws X_1..X_D in order.
void materialize_epochs(AdversarialEpochInstance& inst, Rng& rng);

GlobalStats global_stats(const AdversarialEpochInstance& inst);

using Environment = std::variant<Instance, AdversarialEpochInstance>;

std::size_t client_count(const Environment& env);
std::size_t arm_count(const Environment& env);
GlobalStats global_stats(const Environment& env);
// Per-client means used for regret accounting.
Matrix<double> regret_means(const Environment& env);
std::string environment_name(const Environment& env);

// Fills `out` (M x K) with the rewards of step t. Every cell is drawn, pulled
// or not, and clients are independent.
void sample_rewards(const Instance& inst, std::size_t t, Rng& rng, Matrix<double>& out);
void sample_rewards(const AdversarialEpochInstance& inst, std::size_t t, Rng& rng,
                    Matrix<double>& out);
void sample_rewards(const Environment& env, std::size_t t, Rng& rng, Matrix<double>& out);

}  // namespace dmab
