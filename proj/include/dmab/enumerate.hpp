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
#include <span>

#include "dmab/env.hpp"
#include "dmab/graph.hpp"
#include "dmab/policy.hpp"

namespace dmab {

// Exhaustive search over deterministic decentralized policies on a tiny
// instance. The single Bernoulli(1/2) cell, when present, is a coin drawn once
// and held for the whole horizon: the cell pays the coin's value every step
// and the regret of each coin outcome is computed against the means it
// induces. Every other cell must be a point mass.
//
// A deterministic policy maps, for each client and step, the client's
// observation history (messages through t-1 under `model`) to an arm. Only
// histories reachable under some coin value affect regret, so those are the
// ones enumerated.
struct EnumerationResult {
  double min_regret = 0.0;             // expected over the coin
  std::size_t policies_enumerated = 0;
};

// Limits: M <= 3, K = 2, T <= 2, at most one Bernoulli(1/2) cell.
inline constexpr std::size_t kEnumerationMaxClients = 3;
inline constexpr std::size_t kEnumerationMaxHorizon = 2;

// graphs[s-1] carries the messages of step s; needs graphs.size() == horizon.
EnumerationResult enumerate_min_regret(const Instance& inst, std::span<const Graph> graphs,
                                       std::size_t horizon, InfoModel model);

EnumerationResult enumerate_min_regret(const Instance& inst, const Graph& graph,
                                       std::size_t horizon, InfoModel model);

}  // namespace dmab
