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
#include <span>
#include <string>
#include <vector>

namespace dmab {

// KL divergence between Bernoulli(p) and Bernoulli(q) in nats, with
// 0 ln 0 = 0. Infinite when q is 0 or 1 and p differs from it.
double kl_bernoulli(double p, double q);

// KL between Bernoulli(1/2) and Bernoulli(1/2 + eps):
// (1/2) ln(1 + 4 eps^2 / (1 - 4 eps^2)). Requires 0 <= eps < 1/2.
double per_step_kl(double eps);

struct EpochMeasurePair {
  double epsilon = 0.0;
  std::size_t epoch_length = 0;
  double per_step_kl = 0.0;
  double epoch_kl_bound = 0.0;  // 4 eps^2 d
  double tv_bound = 0.0;        // eps sqrt(2d), via Pinsker
};

// Requires 8 eps^2 d <= 1.
EpochMeasurePair epoch_bounds(double eps, std::size_t d);

inline constexpr std::size_t kExactTvMaxEpoch = 12;

// Total variation between the d-fold products of Bernoulli(1/2) and
// Bernoulli(1/2 + eps), summed over all 2^d outcome strings. d <= 12.
double exact_tv_small_epoch(double eps, std::size_t d);

struct ScalingPoint {
  double horizon = 0.0;
  double mean_regret = 0.0;
  double std_error = 0.0;
};

struct ScalingFit {
  std::vector<ScalingPoint> points;  // points that entered the regression
  double alpha = 0.0;                // slope of log R on log T
  double prefactor = 0.0;            // R ~ prefactor * T^alpha
  double r2 = 0.0;
  std::vector<std::string> warnings;
};

// Burn-in: horizons below this never enter a regression.
inline constexpr double kFitMinHorizon = 1024.0;

// Least-squares fit of log R = log c + alpha log T. Points with T below
// `min_horizon` or R <= 0 are dropped with a warning; fewer than three
// survivors throws std::invalid_argument. Horizons must strictly increase.
ScalingFit fit_scaling_exponent(std::span<const ScalingPoint> points,
                                double min_horizon = kFitMinHorizon);

struct RunResult {
  std::size_t horizon = 0;
  std::uint64_t seed = 0;
  double final_regret = 0.0;
};

struct AggregatePoint {
  std::size_t horizon = 0;
  std::size_t runs = 0;
  double mean = 0.0;
  double std_error = 0.0;  // sample sd / sqrt(n)
  double lower95 = 0.0;    // mean -/+ 1.96 SE
  double upper95 = 0.0;
};

// Groups by horizon (ascending), orders each group by seed, and reduces.
// Requires at least two runs per horizon.
std::vector<AggregatePoint> aggregate_runs(std::span<const RunResult> runs);

std::vector<ScalingPoint> to_scaling_points(std::span<const AggregatePoint> aggregate);

// CSV "T,mean_regret,stderr".
void write_aggregate_csv(std::ostream& out, std::span<const AggregatePoint> aggregate);
std::vector<AggregatePoint> read_aggregate_csv(std::istream& in);

// JSON {"alpha", "prefactor", "r2", "points_used"}.
std::string fit_to_json(const ScalingFit& fit);

}  // namespace dmab
