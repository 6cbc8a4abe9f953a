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

#include "dmab/enumerate.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dmab {

namespace {

using History = std::vector<std::vector<std::size_t>>;  // [step][client] -> arm
using Key = std::vector<double>;

struct World {
  Matrix<double> rewards;  // every step pays the same M x K table
  GlobalStats stats;
};

struct Search {
  const std::vector<World>& worlds;  // one per coin outcome, equally likely
  std::span<const Graph> graphs;
  std::size_t horizon;
  std::size_t clients;
  InfoModel model;
  std::size_t leaves = 0;

  // Observation history of client m before step t in world w.
  Key observation(const History& h, std::size_t w, std::size_t m, std::size_t t) const {
    Key key;
    for (std::size_t s = 1; s < t; ++s) {
      const auto& g = graphs[s - 1];
      for (std::size_t j = 0; j < clients; ++j) {
        if (!g.adjacent(m, j)) continue;
        const auto msg = make_message(model, j, h[s - 1][j], worlds[w].rewards.row(j));
        key.push_back(static_cast<double>(msg.sender));
        key.push_back(static_cast<double>(msg.arm));
        if (msg.all_rewards.empty()) key.push_back(msg.reward);
        else key.insert(key.end(), msg.all_rewards.begin(), msg.all_rewards.end());
      }
    }
    return key;
  }

  double leaf_regret(const std::vector<History>& histories) const {
    double expected = 0.0;
    for (std::size_t w = 0; w < worlds.size(); ++w) {
      double total = 0.0;
      for (const auto& step : histories[w]) {
        double gap_sum = 0.0;
        for (auto a : step) gap_sum += worlds[w].stats.gaps[a];
        total += gap_sum / static_cast<double>(clients);
      }
      expected += total;
    }
    return expected / static_cast<double>(worlds.size());
  }

  double best_from(std::size_t t, std::vector<History>& histories) {
    if (t > horizon) {
      ++leaves;
      return leaf_regret(histories);
    }
    // group[m][w]: index of the decision variable client m uses in world w.
    std::vector<std::vector<std::size_t>> group(clients, std::vector<std::size_t>(worlds.size()));
    std::size_t variables = 0;
    for (std::size_t m = 0; m < clients; ++m) {
      std::vector<Key> seen;
      for (std::size_t w = 0; w < worlds.size(); ++w) {
        auto key = observation(histories[w], w, m, t);
        auto it = std::find(seen.begin(), seen.end(), key);
        if (it == seen.end()) {
          seen.push_back(std::move(key));
          group[m][w] = variables + seen.size() - 1;
        } else {
          group[m][w] = variables + static_cast<std::size_t>(it - seen.begin());
        }
      }
      variables += seen.size();
    }

    double best = std::numeric_limits<double>::infinity();
    const std::size_t assignments = std::size_t{1} << variables;  // K = 2
    for (std::size_t bits = 0; bits < assignments; ++bits) {
      for (std::size_t w = 0; w < worlds.size(); ++w) {
        std::vector<std::size_t> step(clients);
        for (std::size_t m = 0; m < clients; ++m) step[m] = (bits >> group[m][w]) & 1U;
        histories[w].push_back(std::move(step));
      }
      best = std::min(best, best_from(t + 1, histories));
      for (auto& h : histories) h.pop_back();
    }
    return best;
  }
};

}  // namespace

EnumerationResult enumerate_min_regret(const Instance& inst, std::span<const Graph> graphs,
                                       std::size_t horizon, InfoModel model) {
  const auto clients = inst.client_count();
  if (clients > kEnumerationMaxClients || inst.arm_count() != 2 || horizon == 0 ||
      horizon > kEnumerationMaxHorizon)
    throw std::invalid_argument("enumeration limited to M <= 3, K = 2, 1 <= T <= 2");
  if (graphs.size() != horizon) throw std::invalid_argument("enumeration needs one graph per step");
  for (const auto& g : graphs)
    if (g.node_count() != clients) throw std::invalid_argument("graph size differs from M");

  std::optional<std::pair<std::size_t, std::size_t>> coin;
  Matrix<double> base(clients, 2);
  for (std::size_t m = 0; m < clients; ++m) {
    for (std::size_t k = 0; k < 2; ++k) {
      const auto& d = inst.dist(m, k);
      if (d.kind == ArmDistribution::Kind::PointMass) {
        base(m, k) = d.parameter;
        continue;
      }
      if (d.parameter != 0.5 || coin)
        throw std::invalid_argument("enumeration allows at most one Bernoulli(1/2) cell");
      coin = std::make_pair(m, k);
    }
  }

  std::vector<World> worlds;
  for (int b = 0; b < (coin ? 2 : 1); ++b) {
    Matrix<double> table = base;
    if (coin) table(coin->first, coin->second) = static_cast<double>(b);
    worlds.push_back(World{table, stats_from_means(table)});
  }

  Search search{worlds, graphs, horizon, clients, model};
  std::vector<History> histories(worlds.size());
  const double best = search.best_from(1, histories);
  return {best, search.leaves};
}

EnumerationResult enumerate_min_regret(const Instance& inst, const Graph& graph,
                                       std::size_t horizon, InfoModel model) {
  std::vector<Graph> graphs(horizon, graph);
  return enumerate_min_regret(inst, graphs, horizon, model);
}

}  // namespace dmab
