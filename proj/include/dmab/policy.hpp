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
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dmab/graph.hpp"
#include "dmab/matrix.hpp"
#include "dmab/rng.hpp"

namespace dmab {

// What a client learns from each neighbor per step.
//   BanditNeighbors: (sender, pulled arm, realized reward of that arm).
//   FullNeighbors:   the above plus the sender's realized rewards on all arms.
// The bandit content of a message is always a projection of its full content.
enum class InfoModel { BanditNeighbors, FullNeighbors };

const char* to_string(InfoModel model);

struct Message {
  std::size_t sender = 0;
  std::size_t arm = 0;
  double reward = 0.0;
  std::span<const double> all_rewards;  // empty under BanditNeighbors
  std::span<const double> payload;      // gossip vector published by the sender's policy
};

// Message published by `sender` after pulling `arm`, given its reward row.
Message make_message(InfoModel model, std::size_t sender, std::size_t arm,
                     std::span<const double> reward_row, std::span<const double> payload = {});

struct StepContext {
  std::size_t t = 0;
  const Graph& graph;
  const WeightMatrix& weights;
};

// Decision rule for all M clients. Client m's state is touched only by
// act(m, ...) and observe(m, ...), and act() at step t sees messages
// through step t-1 only.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::string name() const = 0;
  virtual InfoModel info_model() const = 0;
  virtual std::unique_ptr<Policy> clone() const = 0;

  virtual void reset(std::size_t clients, std::size_t arms) = 0;
  // 0-based arm for client m at 1-based step t.
  virtual std::size_t act(std::size_t m, std::size_t t, Rng& rng) = 0;
  // Vector shared with neighbors at the end of a step (consensus state).
  virtual std::span<const double> payload(std::size_t /*m*/) const { return {}; }

  // Delivers client m's inbox for step ctx.t. Rejects messages from
  // non-neighbors or of the wrong information model, and requires the
  // client's own message to be present.
  void observe(std::size_t m, const StepContext& ctx, std::span<const Message> inbox);

 protected:
  virtual void on_observe(std::size_t m, const StepContext& ctx, std::span<const Message> inbox) = 0;
};

class FixedArmPolicy final : public Policy {
 public:
  explicit FixedArmPolicy(std::size_t arm) : arm_(arm) {}
  std::string name() const override;
  InfoModel info_model() const override { return InfoModel::BanditNeighbors; }
  std::unique_ptr<Policy> clone() const override { return std::make_unique<FixedArmPolicy>(*this); }
  void reset(std::size_t clients, std::size_t arms) override;
  std::size_t act(std::size_t, std::size_t, Rng&) override { return arm_; }

 protected:
  void on_observe(std::size_t, const StepContext&, std::span<const Message>) override {}

 private:
  std::size_t arm_;
};

class UniformRandomPolicy final : public Policy {
 public:
  std::string name() const override { return "uniform_random"; }
  InfoModel info_model() const override { return InfoModel::BanditNeighbors; }
  std::unique_ptr<Policy> clone() const override { return std::make_unique<UniformRandomPolicy>(*this); }
  void reset(std::size_t clients, std::size_t arms) override;
  std::size_t act(std::size_t m, std::size_t t, Rng& rng) override;

 protected:
  void on_observe(std::size_t, const StepContext&, std::span<const Message>) override {}

 private:
  std::size_t arms_ = 0;
};

// UCB on gossip-tracked global means. Each client keeps its own sample means
// s_m and a consensus estimate z_m updated as
//   z_m <- sum_j W_mj z_j + (s_m(new) - s_m(old)),
// which preserves mean_m z_m = mean_m s_m. Arms never pulled by the client
// are played first (lowest index), then argmax z_i + sqrt(C log t / n_i).
class GossipUcbPolicy final : public Policy {
 public:
  explicit GossipUcbPolicy(double exploration = 2.0);
  std::string name() const override;
  InfoModel info_model() const override { return InfoModel::BanditNeighbors; }
  std::unique_ptr<Policy> clone() const override { return std::make_unique<GossipUcbPolicy>(*this); }
  void reset(std::size_t clients, std::size_t arms) override;
  std::size_t act(std::size_t m, std::size_t t, Rng& rng) override;
  std::span<const double> payload(std::size_t m) const override { return estimates_.row(m); }

  std::span<const double> estimates(std::size_t m) const { return estimates_.row(m); }
  std::span<const std::size_t> pull_counts(std::size_t m) const { return counts_.row(m); }

 protected:
  void on_observe(std::size_t m, const StepContext& ctx, std::span<const Message> inbox) override;

 private:
  double exploration_;
  Matrix<std::size_t> counts_;
  Matrix<double> sums_;
  Matrix<double> local_means_;
  Matrix<double> estimates_;
  std::vector<double> scratch_;
};

// EXP3 per client with gossip-averaged log-weights:
//   p_m = (1 - g_t) softmax(L_m) + g_t / K
//   L_m <- sum_j W_mj L_j + (g_t / K) * r / p_m[a] on the pulled arm a,
// with g_t = min(1, gamma0 * sqrt(K ln K / (K t))).
class Exp3GossipPolicy final : public Policy {
 public:
  explicit Exp3GossipPolicy(double gamma0 = 1.0);
  std::string name() const override;
  InfoModel info_model() const override { return InfoModel::BanditNeighbors; }
  std::unique_ptr<Policy> clone() const override { return std::make_unique<Exp3GossipPolicy>(*this); }
  void reset(std::size_t clients, std::size_t arms) override;
  std::size_t act(std::size_t m, std::size_t t, Rng& rng) override;
  std::span<const double> payload(std::size_t m) const override { return log_weights_.row(m); }

  double rate(std::size_t t) const;
  // Sampling distribution used by the most recent act(m, ...).
  std::span<const double> probabilities(std::size_t m) const { return probabilities_.row(m); }

 protected:
  void on_observe(std::size_t m, const StepContext& ctx, std::span<const Message> inbox) override;

 private:
  double gamma0_;
  std::size_t arms_ = 0;
  Matrix<double> log_weights_;
  Matrix<double> probabilities_;
  std::vector<double> scratch_;
};

// Follow-the-leader on full neighbor information: the estimate of arm i is
// the average, over every client heard from so far, of that client's mean
// reward on arm i. Ties go to the lowest index.
class FullInfoLeaderPolicy final : public Policy {
 public:
  std::string name() const override { return "full_info_leader"; }
  InfoModel info_model() const override { return InfoModel::FullNeighbors; }
  std::unique_ptr<Policy> clone() const override { return std::make_unique<FullInfoLeaderPolicy>(*this); }
  void reset(std::size_t clients, std::size_t arms) override;
  std::size_t act(std::size_t m, std::size_t t, Rng& rng) override;

  std::vector<double> estimates(std::size_t m) const;

 protected:
  void on_observe(std::size_t m, const StepContext& ctx, std::span<const Message> inbox) override;

 private:
  std::size_t clients_ = 0;
  std::size_t arms_ = 0;
  // Indexed [observer][sender][arm] flattened; counts per [observer][sender].
  std::vector<double> sums_;
  std::vector<std::size_t> counts_;
};

}  // namespace dmab
