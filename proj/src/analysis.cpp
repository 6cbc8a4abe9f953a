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

#include "dmab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "dmab/text.hpp"

namespace dmab {

namespace {

// x ln(x / y) with the 0 ln 0 = 0 convention.
double xlogxy(double x, double y) {
  if (x == 0.0) return 0.0;
  if (y == 0.0) return std::numeric_limits<double>::infinity();
  return x * std::log(x / y);
}

}  // namespace

double kl_bernoulli(double p, double q) {
  if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0))
    throw std::invalid_argument("kl_bernoulli: parameters must lie in [0, 1]");
  return xlogxy(p, q) + xlogxy(1.0 - p, 1.0 - q);
}

double per_step_kl(double eps) {
  if (!(eps >= 0.0 && eps < 0.5)) throw std::invalid_argument("per_step_kl: need 0 <= eps < 1/2");
  const double x = 4.0 * eps * eps;
  return 0.5 * std::log1p(x / (1.0 - x));
}

EpochMeasurePair epoch_bounds(double eps, std::size_t d) {
  const double dd = static_cast<double>(d);
  if (8.0 * eps * eps * dd > 1.0)
    throw std::invalid_argument("epoch_bounds: constraint 8ε²d ≤ 1 violated");
  EpochMeasurePair out;
  out.epsilon = eps;
  out.epoch_length = d;
  out.per_step_kl = per_step_kl(eps);
  out.epoch_kl_bound = 4.0 * eps * eps * dd;
  out.tv_bound = eps * std::sqrt(2.0 * dd);
  return out;
}

double exact_tv_small_epoch(double eps, std::size_t d) {
  if (d > kExactTvMaxEpoch) throw std::invalid_argument("exact_tv_small_epoch: d > 12");
  if (!(eps >= 0.0 && eps <= 0.5)) throw std::invalid_argument("exact_tv_small_epoch: need 0 <= eps <= 1/2");
  const double fair = std::pow(0.5, static_cast<double>(d));
  double total = 0.0;
  for (std::uint32_t outcome = 0; outcome < (1U << d); ++outcome) {
    double biased = 1.0;
    for (std::size_t i = 0; i < d; ++i) biased *= ((outcome >> i) & 1U) ? 0.5 + eps : 0.5 - eps;
    total += std::abs(fair - biased);
  }
  return 0.5 * total;
}

ScalingFit fit_scaling_exponent(std::span<const ScalingPoint> points, double min_horizon) {
  ScalingFit fit;
  for (std::size_t i = 1; i < points.size(); ++i)
    if (!(points[i].horizon > points[i - 1].horizon))
      throw std::invalid_argument("fit_scaling_exponent: horizons must strictly increase");
  for (const auto& p : points) {
    if (p.horizon < min_horizon) {
      fit.warnings.push_back("dropped T = " + format_double(p.horizon) + " (burn-in)");
    } else if (!(p.mean_regret > 0.0)) {
      fit.warnings.push_back("dropped T = " + format_double(p.horizon) + " (non-positive regret)");
    } else {
      fit.points.push_back(p);
    }
  }
  if (fit.points.size() < 3)
    throw std::invalid_argument("fit_scaling_exponent: fewer than 3 usable points");

  const double n = static_cast<double>(fit.points.size());
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (const auto& p : fit.points) {
    mean_x += std::log(p.horizon);
    mean_y += std::log(p.mean_regret);
  }
  mean_x /= n;
  mean_y /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (const auto& p : fit.points) {
    const double dx = std::log(p.horizon) - mean_x;
    const double dy = std::log(p.mean_regret) - mean_y;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  fit.alpha = sxy / sxx;
  fit.prefactor = std::exp(mean_y - fit.alpha * mean_x);
  fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

std::vector<AggregatePoint> aggregate_runs(std::span<const RunResult> runs) {
  std::map<std::size_t, std::vector<RunResult>> by_horizon;
  for (const auto& r : runs) by_horizon[r.horizon].push_back(r);
  std::vector<AggregatePoint> out;
  for (auto& [horizon, group] : by_horizon) {
    if (group.size() < 2)
      throw std::invalid_argument("aggregate_runs: need at least two runs at T = " + std::to_string(horizon));
    std::sort(group.begin(), group.end(),
              [](const RunResult& a, const RunResult& b) { return a.seed < b.seed; });
    const double n = static_cast<double>(group.size());
    double mean = 0.0;
    for (const auto& r : group) mean += r.final_regret;
    mean /= n;
    double ss = 0.0;
    for (const auto& r : group) ss += (r.final_regret - mean) * (r.final_regret - mean);
    const double se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    out.push_back({horizon, group.size(), mean, se, mean - 1.96 * se, mean + 1.96 * se});
  }
  return out;
}

std::vector<ScalingPoint> to_scaling_points(std::span<const AggregatePoint> aggregate) {
  std::vector<ScalingPoint> out;
  for (const auto& a : aggregate)
    out.push_back({static_cast<double>(a.horizon), a.mean, a.std_error});
  return out;
}

void write_aggregate_csv(std::ostream& out, std::span<const AggregatePoint> aggregate) {
  out << "T,mean_regret,stderr\n";
  for (const auto& a : aggregate)
    out << a.horizon << ',' << format_double(a.mean) << ',' << format_double(a.std_error) << '\n';
}

std::vector<AggregatePoint> read_aggregate_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "T,mean_regret,stderr")
    throw std::runtime_error("aggregate csv: unexpected header");
  std::vector<AggregatePoint> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string t, mean, se;
    if (!std::getline(ls, t, ',') || !std::getline(ls, mean, ',') || !std::getline(ls, se))
      throw std::runtime_error("aggregate csv: malformed row '" + line + "'");
    AggregatePoint p;
    p.horizon = static_cast<std::size_t>(std::stoull(t));
    p.mean = parse_double(mean);
    p.std_error = parse_double(se);
    p.lower95 = p.mean - 1.96 * p.std_error;
    p.upper95 = p.mean + 1.96 * p.std_error;
    out.push_back(p);
  }
  return out;
}

std::string fit_to_json(const ScalingFit& fit) {
  nlohmann::ordered_json j;
  j["alpha"] = fit.alpha;
  j["prefactor"] = fit.prefactor;
  j["r2"] = fit.r2;
  j["points_used"] = fit.points.size();
  return j.dump(2) + "\n";
}

}  // namespace dmab
