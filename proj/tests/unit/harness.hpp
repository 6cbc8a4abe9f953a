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

// Step-by-step protocol driver for inspecting policy state between steps.
#pragma once

#include <functional>
#include <vector>

#include "dmab/env.hpp"
#include "dmab/graph.hpp"
#include "dmab/policy.hpp"

namespace harness {

// Runs `policy` on a static graph for T steps. After every step calls
// hook(t, actions). Rewards come from `inst` with its own stream.
inline void drive(dmab::Policy& policy, const dmab::Instance& inst, const dmab::Graph& g,
                  std::size_t horizon, std::uint64_t seed,
                  const std::function<void(std::size_t, const std::vector<std::size_t>&)>& hook) {
  const auto m_count = inst.client_count();
  const auto weights = dmab::metropolis_weights(g);
  dmab::Rng reward_rng(seed);
  std::vector<dmab::Rng> rngs;
  for (std::size_t m = 0; m < m_count; ++m) rngs.emplace_back(dmab::derive_seed(seed, m + 100));
  policy.reset(m_count, inst.arm_count());
  dmab::Matrix<double> rewards;
  std::vector<std::size_t> actions(m_count);
  std::vector<std::vector<double>> payloads(m_count);
  for (std::size_t t = 1; t <= horizon; ++t) {
    for (std::size_t m = 0; m < m_count; ++m) actions[m] = policy.act(m, t, rngs[m]);
    dmab::sample_rewards(inst, t, reward_rng, rewards);
    std::vector<dmab::Message> out;
    for (std::size_t m = 0; m < m_count; ++m) {
      const auto p = policy.payload(m);
      payloads[m].assign(p.begin(), p.end());
      out.push_back(dmab::make_message(policy.info_model(), m, actions[m], rewards.row(m), payloads[m]));
    }
    const dmab::StepContext ctx{t, g, weights};
    for (std::size_t m = 0; m < m_count; ++m) {
      std::vector<dmab::Message> inbox;
      for (std::size_t j = 0; j < m_count; ++j)
        if (g.adjacent(m, j)) inbox.push_back(out[j]);
      policy.observe(m, ctx, inbox);
    }
    if (hook) hook(t, actions);
  }
}

}  // namespace harness
