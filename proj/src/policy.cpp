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

#include "dmab/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

namespace dmab {

namespace {

std::string with_param(const char* base, double v) {
  std::ostringstream os;
  os << base << '(' << v << ')';
  return os.str();
}

// First index of the maximum; ties go to the lowest index.
std::size_t argmax(std::span<const double> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

const Message& own_message(std::size_t m, std::span<const Message> inbox) {
  for (const auto& msg : inbox)
    if (msg.sender == m) return msg;
  throw std::logic_error("inbox lacks the client's own message");
}

}  // namespace

const char* to_string(InfoModel model) {
  return model == InfoModel::BanditNeighbors ? "bandit_neighbors" : "full_neighbors";
}

Message make_message(InfoModel model, std::size_t sender, std::size_t arm,
                     std::span<const double> reward_row, std::span<const double> payload) {
  if (arm >= reward_row.size()) throw std::out_of_range("pulled arm outside reward row");
  Message msg{sender, arm, reward_row[arm], {}, payload};
  if (model == InfoModel::FullNeighbors) msg.all_rewards = reward_row;
  return msg;
}

void Policy::observe(std::size_t m, const StepContext& ctx, std::span<const Message> inbox) {
  bool has_own = false;
  const bool full = info_model() == InfoModel::FullNeighbors;
  for (const auto& msg : inbox) {
    if (msg.sender >= ctx.graph.node_count() || !ctx.graph.adjacent(m, msg.sender))
      throw std::logic_error("message from non-neighbor " + std::to_string(msg.sender) +
                             " delivered to client " + std::to_string(m));
    if (full == msg.all_rewards.empty())
      throw std::logic_error("message does not match the policy's information model");
    has_own = has_own || msg.sender == m;
  }
  if (!has_own) throw std::logic_error("inbox lacks the client's own message");
  on_observe(m, ctx, inbox);
}

std::string FixedArmPolicy::name() const { return "fixed(" + std::to_string(arm_ + 1) + ")"; }

void FixedArmPolicy::reset(std::size_t /*clients*/, std::size_t arms) {
  if (arm_ >= arms) throw std::invalid_argument("fixed arm outside 1..K");
}

void UniformRandomPolicy::reset(std::size_t /*clients*/, std::size_t arms) { arms_ = arms; }

std::size_t UniformRandomPolicy::act(std::size_t, std::size_t, Rng& rng) {
  return static_cast<std::size_t>(uniform_index(rng, arms_));
}

GossipUcbPolicy::GossipUcbPolicy(double exploration) : exploration_(exploration) {
  if (!(exploration >= 0.0)) throw std::invalid_argument("gossip_ucb: C must be >= 0");
}

std::string GossipUcbPolicy::name() const { return with_param("gossip_ucb", exploration_); }

void GossipUcbPolicy::reset(std::size_t clients, std::size_t arms) {
  counts_ = Matrix<std::size_t>(clients, arms, 0);
  sums_ = Matrix<double>(clients, arms, 0.0);
  local_means_ = Matrix<double>(clients, arms, 0.0);
  estimates_ = Matrix<double>(clients, arms, 0.0);
  scratch_.assign(arms, 0.0);
}

std::size_t GossipUcbPolicy::act(std::size_t m, std::size_t t, Rng& /*rng*/) {
  const auto n = counts_.row(m);
  const auto z = estimates_.row(m);
  for (std::size_t i = 0; i < n.size(); ++i)
    if (n[i] == 0) return i;
  const double log_t = std::log(static_cast<double>(t));
  std::size_t best = 0;
  double best_index = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double index = z[i] + std::sqrt(exploration_ * log_t / static_cast<double>(n[i]));
    if (index > best_index) {
      best_index = index;
      best = i;
    }
  }
  return best;
}

void GossipUcbPolicy::on_observe(std::size_t m, const StepContext& ctx,
                                 std::span<const Message> inbox) {
  const auto& own = own_message(m, inbox);
  std::fill(scratch_.begin(), scratch_.end(), 0.0);
  for (const auto& msg : inbox) {
    const double w = ctx.weights(m, msg.sender);
    for (std::size_t i = 0; i < scratch_.size(); ++i) scratch_[i] += w * msg.payload[i];
  }
  const auto a = own.arm;
  counts_(m, a) += 1;
  sums_(m, a) += own.reward;
  const double updated = sums_(m, a) / static_cast<double>(counts_(m, a));
  scratch_[a] += updated - local_means_(m, a);
  local_means_(m, a) = updated;
  std::copy(scratch_.begin(), scratch_.end(), estimates_.row(m).begin());
}

Exp3GossipPolicy::Exp3GossipPolicy(double gamma0) : gamma0_(gamma0) {
  if (!(gamma0 >= 0.0)) throw std::invalid_argument("exp3_gossip: gamma0 must be >= 0");
}

std::string Exp3GossipPolicy::name() const { return with_param("exp3_gossip", gamma0_); }

void Exp3GossipPolicy::reset(std::size_t clients, std::size_t arms) {
  arms_ = arms;
  log_weights_ = Matrix<double>(clients, arms, 0.0);
  probabilities_ = Matrix<double>(clients, arms, 1.0 / static_cast<double>(arms));
  scratch_.assign(arms, 0.0);
}

double Exp3GossipPolicy::rate(std::size_t t) const {
  const double k = static_cast<double>(arms_);
  return std::min(1.0, gamma0_ * std::sqrt(k * std::log(k) / (k * static_cast<double>(t))));
}

std::size_t Exp3GossipPolicy::act(std::size_t m, std::size_t t, Rng& rng) {
  const double g = rate(t);
  const double k = static_cast<double>(arms_);
  const auto logw = log_weights_.row(m);
  const auto p = probabilities_.row(m);
  const double peak = *std::max_element(logw.begin(), logw.end());
  double total = 0.0;
  for (std::size_t i = 0; i < arms_; ++i) {
    p[i] = std::exp(logw[i] - peak);
    total += p[i];
  }
  for (std::size_t i = 0; i < arms_; ++i) p[i] = (1.0 - g) * p[i] / total + g / k;

  const double u = uniform01(rng);
  double cumulative = 0.0;
  for (std::size_t i = 0; i + 1 < arms_; ++i) {
    cumulative += p[i];
    if (u < cumulative) return i;
  }
  return arms_ - 1;
}

void Exp3GossipPolicy::on_observe(std::size_t m, const StepContext& ctx,
                                  std::span<const Message> inbox) {
  const auto& own = own_message(m, inbox);
  std::fill(scratch_.begin(), scratch_.end(), 0.0);
  for (const auto& msg : inbox) {
    const double w = ctx.weights(m, msg.sender);
    for (std::size_t i = 0; i < arms_; ++i) scratch_[i] += w * msg.payload[i];
  }
  const double g = rate(ctx.t);
  scratch_[own.arm] += g / static_cast<double>(arms_) * own.reward / probabilities_(m, own.arm);
  std::copy(scratch_.begin(), scratch_.end(), log_weights_.row(m).begin());
}

void FullInfoLeaderPolicy::reset(std::size_t clients, std::size_t arms) {
  clients_ = clients;
  arms_ = arms;
  sums_.assign(clients * clients * arms, 0.0);
  counts_.assign(clients * clients, 0);
}

std::vector<double> FullInfoLeaderPolicy::estimates(std::size_t m) const {
  std::vector<double> est(arms_, 0.0);
  std::size_t sources = 0;
  for (std::size_t j = 0; j < clients_; ++j) {
    const auto n = counts_[m * clients_ + j];
    if (n == 0) continue;
    ++sources;
    const double* row = &sums_[(m * clients_ + j) * arms_];
    for (std::size_t i = 0; i < arms_; ++i) est[i] += row[i] / static_cast<double>(n);
  }
  if (sources > 0)
    for (auto& e : est) e /= static_cast<double>(sources);
  return est;
}

std::size_t FullInfoLeaderPolicy::act(std::size_t m, std::size_t /*t*/, Rng& /*rng*/) {
  return argmax(estimates(m));
}

void FullInfoLeaderPolicy::on_observe(std::size_t m, const StepContext& /*ctx*/,
                                      std::span<const Message> inbox) {
  for (const auto& msg : inbox) {
    counts_[m * clients_ + msg.sender] += 1;
    double* row = &sums_[(m * clients_ + msg.sender) * arms_];
    for (std::size_t i = 0; i < arms_; ++i) row[i] += msg.all_rewards[i];
  }
}

}  // namespace dmab
