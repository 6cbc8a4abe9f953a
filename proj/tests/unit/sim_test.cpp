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

#include <doctest.h>

#include <memory>
#include <sstream>

#include "dmab/sim.hpp"

using namespace dmab;

namespace {

// Client 0 switches to arm 2 on even steps; everyone else stays on arm 1.
class AlternatingPolicy final : public Policy {
 public:
  std::string name() const override { return "alternating"; }
  InfoModel info_model() const override { return InfoModel::BanditNeighbors; }
  std::unique_ptr<Policy> clone() const override { return std::make_unique<AlternatingPolicy>(*this); }
  void reset(std::size_t, std::size_t) override {}
  std::size_t act(std::size_t m, std::size_t t, Rng&) override { return (m == 0 && t % 2 == 0) ? 1 : 0; }

 protected:
  void on_observe(std::size_t, const StepContext&, std::span<const Message>) override {}
};

std::vector<std::unique_ptr<Policy>> shipped_policies() {
  std::vector<std::unique_ptr<Policy>> out;
  out.push_back(std::make_unique<FixedArmPolicy>(0));
  out.push_back(std::make_unique<UniformRandomPolicy>());
  out.push_back(std::make_unique<GossipUcbPolicy>(2.0));
  out.push_back(std::make_unique<Exp3GossipPolicy>(1.0));
  out.push_back(std::make_unique<FullInfoLeaderPolicy>());
  return out;
}

// R_T recomputed from the recorded actions and the global means.
double regret_oracle(const Trajectory& traj, const GlobalStats& stats) {
  const double best = stats.global_means[stats.optimal_arm];
  double total = 0.0;
  for (std::size_t t = 1; t <= traj.horizon; ++t) {
    double pulled = 0.0;
    for (std::size_t m = 0; m < traj.clients; ++m) pulled += stats.global_means[traj.action(m, t)];
    total += best - pulled / static_cast<double>(traj.clients);
  }
  return total;
}

Instance random_instance(Rng& rng, std::size_t m, std::size_t k) {
  Matrix<ArmDistribution> d(m, k);
  for (auto& cell : d.data())
    cell = bernoulli(rng, 0.5) ? ArmDistribution::bernoulli(uniform01(rng))
                               : ArmDistribution::point_mass(uniform01(rng));
  return Instance("random", d);
}

}  // namespace

TEST_CASE("fixed optimal arm has zero regret") {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const Environment env = random_instance(rng, 3 + uniform_index(rng, 5), 2 + uniform_index(rng, 3));
    FixedArmPolicy p(global_stats(env).optimal_arm);
    const auto traj = run(env, TemporalGraphModel::make_static(make_complete_graph(client_count(env))), p,
                          300, trial);
    CHECK(traj.final_regret() == 0.0);
  }
}

TEST_CASE("fixed arm 2 on the thm4 instance: regret T * gap") {
  const Environment env = make_thm4_instance(8, 1, 0.4);
  FixedArmPolicy p(1);
  const auto traj = run(env, TemporalGraphModel::make_static(make_disconnected_clique_graph(8, 1)), p, 1000, 3);
  CHECK(traj.final_regret() == doctest::Approx(250.0).epsilon(1e-12));
  CHECK(traj.disagreement_steps == 0);
}

TEST_CASE("runs are deterministic in the seed") {
  const Environment env = make_homogeneous_instance(4, std::vector<double>{0.7, 0.5},
                                                    ArmDistribution::Kind::Bernoulli);
  const auto graphs = TemporalGraphModel::erdos_renyi(4, 0.5);
  for (auto& p : shipped_policies()) {
    const auto a = run(env, graphs, *p, 500, 42);
    const auto b = run(env, graphs, *p->clone(), 500, 42);
    CHECK(a == b);
  }
  UniformRandomPolicy u;
  CHECK_FALSE(run(env, graphs, u, 500, 1).actions == run(env, graphs, u, 500, 2).actions);
}

TEST_CASE("pseudo-regret step examples") {
  const auto stats = global_stats(make_homogeneous_instance(4, std::vector<double>{1.0, 0.0},
                                                            ArmDistribution::Kind::PointMass));
  const std::vector<std::uint32_t> three_one{0, 0, 0, 1};
  CHECK(pseudo_regret_step(three_one, stats) == 0.25);
  const std::vector<std::uint32_t> all_best{0, 0, 0, 0};
  CHECK(pseudo_regret_step(all_best, stats) == 0.0);
  const auto coin = global_stats(make_thm5_instance_with_coin(4, 1, 1));
  const std::vector<std::uint32_t> all_second{1, 1, 1, 1};
  CHECK(pseudo_regret_step(all_second, coin) == doctest::Approx(0.375).epsilon(1e-15));
}

TEST_CASE("trajectory invariants on random runs") {
  Rng rng(2);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t m = 3 + uniform_index(rng, 5);
    const std::size_t k = 2 + uniform_index(rng, 2);
    const Environment env = random_instance(rng, m, k);
    auto policies = shipped_policies();
    auto& p = *policies[uniform_index(rng, policies.size())];
    const auto graphs = trial % 2 ? TemporalGraphModel::random_connected(m, 0.3)
                                  : TemporalGraphModel::make_static(make_path_graph(m));
    const std::size_t horizon = 50 + uniform_index(rng, 400);
    const auto traj = run(env, graphs, p, horizon, trial);
    const auto stats = global_stats(env);

    CHECK(traj.agreement_steps + traj.disagreement_steps == horizon);
    for (std::size_t c = 0; c < m; ++c) {
      std::size_t total = 0;
      for (std::size_t i = 0; i < k; ++i) total += traj.pull_counts(c, i);
      CHECK(total == horizon);
    }
    double prev = 0.0;
    for (double r : traj.regret_curve) {
      CHECK(r >= prev);
      prev = r;
    }
    CHECK(traj.final_regret() == doctest::Approx(regret_oracle(traj, stats)).epsilon(1e-9));
    const auto dec = agreement_decomposition(traj, stats);
    CHECK(dec.agreement_steps == traj.agreement_steps);
    CHECK(dec.disagreement_steps == traj.disagreement_steps);
    if (k == 2) {
      CHECK(dec.identity_checked);
      CHECK(dec.split_residual <= 1e-9);
    } else {
      CHECK_FALSE(dec.identity_checked);
    }
  }
}

TEST_CASE("agreement decomposition examples") {
  const auto inst = make_homogeneous_instance(4, std::vector<double>{0.9, 0.1}, ArmDistribution::Kind::PointMass);
  const Environment env = inst;
  const auto stats = global_stats(inst);
  const auto graphs = TemporalGraphModel::make_static(make_complete_graph(4));

  SUBCASE("identical actions: no disagreement and the literal identity holds") {
    FixedArmPolicy p(1);
    const auto traj = run(env, graphs, p, 10, 1);
    const auto dec = agreement_decomposition(traj, stats);
    CHECK(dec.disagreement_steps == 0);
    CHECK(dec.agreement_sum == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(dec.full_gap_residual <= 1e-9);
    CHECK(dec.split_residual <= 1e-9);
  }
  SUBCASE("disagreement every other step over T = 10") {
    AlternatingPolicy p;
    const auto traj = run(env, graphs, p, 10, 1);
    const auto dec = agreement_decomposition(traj, stats);
    CHECK(dec.disagreement_steps == 5);
    CHECK(dec.agreement_steps == 5);
    CHECK(dec.agreement_sum == 0.0);
    // Each disagreement step costs gap / M: one of four clients is off.
    CHECK(traj.final_regret() == doctest::Approx(5 * 0.8 / 4).epsilon(1e-12));
    CHECK(dec.split_residual <= 1e-12);
    CHECK(dec.suboptimal_gap == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(dec.full_gap_residual == doctest::Approx(5 * 0.8 * (1.0 - 1.0 / 4.0)).epsilon(1e-12));
  }
  SUBCASE("three arms: counts only") {
    const Environment three = make_homogeneous_instance(4, std::vector<double>{0.9, 0.1, 0.5},
                                                        ArmDistribution::Kind::PointMass);
    AlternatingPolicy p;
    const auto traj = run(three, graphs, p, 10, 1);
    const auto dec = agreement_decomposition(traj, global_stats(three));
    CHECK_FALSE(dec.identity_checked);
    CHECK_FALSE(dec.refusal.empty());
    CHECK(dec.disagreement_steps == 5);
  }
}

TEST_CASE("no lookahead: rewards after step t never change actions up to t") {
  const Environment env = make_homogeneous_instance(5, std::vector<double>{0.6, 0.4, 0.5},
                                                    ArmDistribution::Kind::Bernoulli);
  const auto graphs = TemporalGraphModel::random_connected(5, 0.2);
  const std::size_t horizon = 300;
  for (auto& p : shipped_policies()) {
    const auto tape = record_rewards(env, horizon, 9);
    const auto base = run(env, graphs, *p, horizon, 9);
    CHECK(run_with_rewards(env, graphs, *p, 9, tape) == base);
    Rng rng(10);
    for (std::size_t cut : {1u, 17u, 150u, 299u}) {
      auto altered = tape;
      for (std::size_t s = cut; s < horizon; ++s)  // steps cut+1..T
        for (auto& v : altered[s].data()) v = bernoulli(rng, 0.5) ? 1.0 : 0.0;
      const auto traj = run_with_rewards(env, graphs, *p, 9, altered);
      for (std::size_t t = 1; t <= cut; ++t)
        for (std::size_t m = 0; m < 5; ++m) CHECK(traj.action(m, t) == base.action(m, t));
    }
  }
}

TEST_CASE("run rejects mismatched inputs") {
  const Environment env = make_thm4_instance(8, 1, 0.4);
  FixedArmPolicy p(0);
  CHECK_THROWS_AS(run(env, TemporalGraphModel::make_static(make_complete_graph(5)), p, 10, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(run(env, TemporalGraphModel::make_static(make_complete_graph(8)), p, 0, 1),
                  std::invalid_argument);
  const Environment adv = make_thm8_instance(4, 1 << 15, 4.0);
  CHECK_THROWS_AS(run(adv, TemporalGraphModel::make_static(make_complete_graph(4)), p, 1000, 1),
                  std::invalid_argument);
}

TEST_CASE("epoch pull counts") {
  const auto inst = make_thm8_instance(4, 1 << 15, 4.0);
  const Environment env = inst;
  const auto graphs = TemporalGraphModel::make_static(make_two_expander_graph(4, 4.0).graph);
  const auto d = inst.epoch_length();

  FixedArmPolicy first(0);
  const auto all_first = epoch_pull_counts(run(env, graphs, first, inst.horizon(), 1), inst);
  for (auto n : all_first.data()) CHECK(n == d);

  FixedArmPolicy second(1);
  const auto none = epoch_pull_counts(run(env, graphs, second, inst.horizon(), 1), inst);
  for (auto n : none.data()) CHECK(n == 0);

  UniformRandomPolicy u;
  double total = 0.0;
  double cells = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto traj = run(env, graphs, u, inst.horizon(), seed);
    const auto counts = epoch_pull_counts(traj, inst);
    for (std::size_t m = 0; m < 4; ++m) {
      std::size_t sum = 0;
      for (std::size_t j = 0; j < inst.epoch_count(); ++j) sum += counts(m, j);
      CHECK(sum == traj.pull_counts(m, 0));
    }
    for (auto n : counts.data()) total += static_cast<double>(n);
    cells += static_cast<double>(counts.data().size());
  }
  // Each cell is Binomial(d, 1/2).
  const double sigma = std::sqrt(static_cast<double>(d) / 4.0 / cells);
  CHECK(std::abs(total / cells - static_cast<double>(d) / 2.0) <= 3.0 * sigma);

  const Environment plain = make_thm4_instance(8, 1, 0.4);
  const auto plain_traj = run(plain, TemporalGraphModel::make_static(make_complete_graph(8)), u, 10, 1);
  CHECK_THROWS_AS(epoch_pull_counts(plain_traj, inst), std::invalid_argument);
}

TEST_CASE("adversarial runs replay their epoch states") {
  const auto inst = make_thm8_instance(4, 1 << 15, 4.0);
  UniformRandomPolicy u;
  const auto graphs = TemporalGraphModel::make_static(make_complete_graph(4));
  const auto traj = run(Environment{inst}, graphs, u, inst.horizon(), 77);
  const auto mat = materialized_for_run(inst, 77);
  CHECK(std::equal(traj.epoch_states.begin(), traj.epoch_states.end(), mat.epoch_states().begin()));
  CHECK(traj.epoch_states.size() == inst.epoch_count());
}

TEST_CASE("trajectory csv") {
  const Environment env = make_thm4_instance(8, 1, 0.4);
  FixedArmPolicy p(1);
  const auto traj = run(env, TemporalGraphModel::make_static(make_complete_graph(8)), p, 3, 1);
  std::ostringstream out;
  write_trajectory_csv(out, traj);
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "t,cum_regret,realized_regret,T_d_so_far");
  std::size_t rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 3);
}
