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

#include "dmab/sim.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "dmab/text.hpp"

namespace dmab {

namespace {

// Sub-stream tags under the run seed.
enum StreamTag : std::uint64_t {
  kGraphStream = 1,
  kEnvStream = 2,
  kRewardStream = 3,
  kPolicyStream = 4,
};

Environment prepare_environment(const Environment& env, std::size_t horizon, std::uint64_t seed) {
  if (const auto* adv = std::get_if<AdversarialEpochInstance>(&env)) {
    if (adv->horizon() != horizon)
      throw std::invalid_argument("thm8 instance built for T = " + std::to_string(adv->horizon()) +
                                  " but run requested T = " + std::to_string(horizon));
    return materialized_for_run(*adv, seed);
  }
  return env;
}

Trajectory simulate(const Environment& env_in, const TemporalGraphModel& graphs, Policy& policy,
                    std::size_t horizon, std::uint64_t seed, const RewardTape* tape) {
  if (horizon == 0) throw std::invalid_argument("horizon must be positive");
  const auto clients = client_count(env_in);
  const auto arms = arm_count(env_in);
  if (graphs.node_count() != clients)
    throw std::invalid_argument("graph model has " + std::to_string(graphs.node_count()) +
                                " nodes but instance has " + std::to_string(clients) + " clients");
  if (tape && tape->size() != horizon) throw std::invalid_argument("reward tape length mismatch");

  const Environment env = prepare_environment(env_in, horizon, seed);
  const GlobalStats stats = global_stats(env);
  const double best = stats.global_means[stats.optimal_arm];
  const InfoModel model = policy.info_model();

  Rng graph_rng(derive_seed(seed, kGraphStream));
  Rng reward_rng(derive_seed(seed, kRewardStream));
  std::vector<Rng> policy_rngs;
  policy_rngs.reserve(clients);
  for (std::size_t m = 0; m < clients; ++m)
    policy_rngs.emplace_back(derive_seed(seed, kPolicyStream, m));

  policy.reset(clients, arms);

  Trajectory traj;
  traj.horizon = horizon;
  traj.clients = clients;
  traj.arms = arms;
  traj.seed = seed;
  traj.actions.resize(horizon * clients);
  traj.pull_counts = Matrix<std::size_t>(clients, arms, 0);
  traj.regret_curve.resize(horizon);
  traj.realized_curve.resize(horizon);
  traj.disagreement_curve.resize(horizon);
  if (const auto* adv = std::get_if<AdversarialEpochInstance>(&env)) {
    traj.epoch_length = adv->epoch_length();
    traj.epoch_count = adv->epoch_count();
    traj.epoch_states.assign(adv->epoch_states().begin(), adv->epoch_states().end());
  }

  std::optional<Graph> static_graph;
  std::optional<WeightMatrix> static_weights;
  if (graphs.is_static()) {
    static_graph = std::get<TemporalGraphModel::Static>(graphs.kind()).graph;
    static_weights = metropolis_weights(*static_graph);
  }

  Matrix<double> rewards(clients, arms);
  std::vector<std::uint32_t> actions(clients);
  std::vector<std::vector<double>> payloads(clients);
  std::vector<Message> outbox(clients);
  std::vector<Message> inbox;
  inbox.reserve(clients);

  double cum_regret = 0.0;
  double cum_realized = 0.0;
  std::size_t disagreements = 0;

  for (std::size_t t = 1; t <= horizon; ++t) {
    std::optional<Graph> sampled;
    std::optional<WeightMatrix> sampled_weights;
    if (!static_graph) {
      sampled = graphs.graph_at(t, graph_rng);
      sampled_weights = metropolis_weights(*sampled);
    }
    const Graph& g = static_graph ? *static_graph : *sampled;
    const WeightMatrix& w = static_weights ? *static_weights : *sampled_weights;

    for (std::size_t m = 0; m < clients; ++m) {
      const auto a = policy.act(m, t, policy_rngs[m]);
      if (a >= arms) throw std::logic_error(policy.name() + " chose an arm outside 1..K");
      actions[m] = static_cast<std::uint32_t>(a);
    }

    if (tape) rewards = (*tape)[t - 1];
    else sample_rewards(env, t, reward_rng, rewards);

    for (std::size_t m = 0; m < clients; ++m) {
      const auto p = policy.payload(m);
      payloads[m].assign(p.begin(), p.end());
      outbox[m] = make_message(model, m, actions[m], rewards.row(m), payloads[m]);
    }
    const StepContext ctx{t, g, w};
    for (std::size_t m = 0; m < clients; ++m) {
      inbox.clear();
      for (std::size_t j = 0; j < clients; ++j)
        if (g.adjacent(m, j)) inbox.push_back(outbox[j]);
      policy.observe(m, ctx, inbox);
    }

    bool agree = true;
    double collected = 0.0;
    for (std::size_t m = 0; m < clients; ++m) {
      traj.actions[(t - 1) * clients + m] = actions[m];
      traj.pull_counts(m, actions[m]) += 1;
      collected += rewards(m, actions[m]);
      agree = agree && actions[m] == actions[0];
    }
    cum_regret += pseudo_regret_step(actions, stats);
    cum_realized += best - collected / static_cast<double>(clients);
    if (!agree) ++disagreements;
    traj.regret_curve[t - 1] = cum_regret;
    traj.realized_curve[t - 1] = cum_realized;
    traj.disagreement_curve[t - 1] = static_cast<std::uint32_t>(disagreements);
  }
  traj.disagreement_steps = disagreements;
  traj.agreement_steps = horizon - disagreements;
  return traj;
}

}  // namespace

AdversarialEpochInstance materialized_for_run(const AdversarialEpochInstance& inst,
                                              std::uint64_t seed) {
  AdversarialEpochInstance copy = inst;
  Rng env_rng(derive_seed(seed, kEnvStream));
  materialize_epochs(copy, env_rng);
  return copy;
}

Trajectory run(const Environment& env, const TemporalGraphModel& graphs, Policy& policy,
               std::size_t horizon, std::uint64_t seed) {
  return simulate(env, graphs, policy, horizon, seed, nullptr);
}

Trajectory run_with_rewards(const Environment& env, const TemporalGraphModel& graphs,
                            Policy& policy, std::uint64_t seed, const RewardTape& tape) {
  return simulate(env, graphs, policy, tape.size(), seed, &tape);
}

RewardTape record_rewards(const Environment& env_in, std::size_t horizon, std::uint64_t seed) {
  const Environment env = prepare_environment(env_in, horizon, seed);
  Rng reward_rng(derive_seed(seed, kRewardStream));
  RewardTape tape;
  tape.reserve(horizon);
  Matrix<double> rewards(client_count(env), arm_count(env));
  for (std::size_t t = 1; t <= horizon; ++t) {
    sample_rewards(env, t, reward_rng, rewards);
    tape.push_back(rewards);
  }
  return tape;
}

double pseudo_regret_step(std::span<const std::uint32_t> actions, const GlobalStats& stats) {
  double total = 0.0;
  for (auto a : actions) total += stats.gaps.at(a);
  return total / static_cast<double>(actions.size());
}

AgreementDecomposition agreement_decomposition(const Trajectory& traj, const GlobalStats& stats) {
  AgreementDecomposition out;
  for (std::size_t t = 1; t <= traj.horizon; ++t) {
    const auto acts = traj.actions_at(t);
    bool agree = true;
    for (auto a : acts) agree = agree && a == acts[0];
    const double step = pseudo_regret_step(acts, stats);
    if (agree) {
      ++out.agreement_steps;
      out.agreement_sum += step;
    } else {
      ++out.disagreement_steps;
      out.disagreement_sum += step;
    }
  }
  out.total_regret = traj.final_regret();
  if (traj.arms != 2) {
    out.refusal = "agreement identity is stated for K = 2; got K = " + std::to_string(traj.arms);
    return out;
  }
  out.identity_checked = true;
  out.suboptimal_gap = stats.gaps[1 - stats.optimal_arm];
  out.split_residual = std::abs(out.total_regret - (out.disagreement_sum + out.agreement_sum));
  out.full_gap_residual =
      std::abs(out.total_regret -
               (static_cast<double>(out.disagreement_steps) * out.suboptimal_gap + out.agreement_sum));
  return out;
}

Matrix<std::size_t> epoch_pull_counts(const Trajectory& traj, const AdversarialEpochInstance& inst) {
  if (!traj.epoch_length || !traj.epoch_count)
    throw std::invalid_argument("epoch_pull_counts needs an epoch-adversary trajectory");
  if (*traj.epoch_length != inst.epoch_length() || *traj.epoch_count != inst.epoch_count() ||
      traj.horizon != inst.horizon() || traj.clients != inst.client_count())
    throw std::invalid_argument("trajectory does not match the adversarial instance");
  Matrix<std::size_t> counts(traj.clients, inst.epoch_count(), 0);
  for (std::size_t t = 1; t <= traj.horizon; ++t) {
    const auto j = inst.epoch_of(t);
    for (std::size_t m = 0; m < traj.clients; ++m)
      if (traj.action(m, t) == 0) counts(m, j - 1) += 1;
  }
  return counts;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,cum_regret,realized_regret,T_d_so_far\n";
  for (std::size_t t = 1; t <= traj.horizon; ++t) {
    out << t << ',' << format_double(traj.regret_curve[t - 1]) << ','
        << format_double(traj.realized_curve[t - 1]) << ',' << traj.disagreement_curve[t - 1] << '\n';
  }
}

}  // namespace dmab
