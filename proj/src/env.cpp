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

#include "dmab/env.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace dmab {

namespace {

void require_unit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0))
    throw std::invalid_argument(std::string(what) + " must lie in [0, 1], got " + std::to_string(v));
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

ArmDistribution ArmDistribution::bernoulli(double p) {
  require_unit(p, "Bernoulli parameter");
  return {Kind::Bernoulli, p};
}

ArmDistribution ArmDistribution::point_mass(double v) {
  require_unit(v, "point-mass value");
  return {Kind::PointMass, v};
}

double ArmDistribution::sample(Rng& rng) const {
  const double u = uniform01(rng);
  if (kind == Kind::PointMass) return parameter;
  return u < parameter ? 1.0 : 0.0;
}

Instance::Instance(std::string name, Matrix<ArmDistribution> dists,
                   std::optional<LatentCoinState> latent)
    : name_(std::move(name)), dists_(std::move(dists)), latent_(latent) {
  if (dists_.rows() < 3) throw std::invalid_argument("instance needs M >= 3 clients");
  if (dists_.cols() < 2) throw std::invalid_argument("instance needs K >= 2 arms");
  for (const auto& d : dists_.data()) require_unit(d.parameter, "arm mean");
}

Matrix<double> Instance::means() const {
  Matrix<double> out(client_count(), arm_count());
  for (std::size_t m = 0; m < client_count(); ++m)
    for (std::size_t k = 0; k < arm_count(); ++k) out(m, k) = dists_(m, k).mean();
  return out;
}

GlobalStats stats_from_means(const Matrix<double>& means) {
  GlobalStats s;
  const auto m = means.rows();
  s.global_means.assign(means.cols(), 0.0);
  for (std::size_t k = 0; k < means.cols(); ++k) {
    double total = 0.0;
    for (std::size_t c = 0; c < m; ++c) total += means(c, k);
    s.global_means[k] = total / static_cast<double>(m);
  }
  // max_element returns the first maximizer: ties go to the lowest index.
  s.optimal_arm = static_cast<std::size_t>(
      std::max_element(s.global_means.begin(), s.global_means.end()) - s.global_means.begin());
  const double best = s.global_means[s.optimal_arm];
  s.gaps.resize(means.cols());
  for (std::size_t k = 0; k < means.cols(); ++k) s.gaps[k] = best - s.global_means[k];
  return s;
}

GlobalStats global_stats(const Instance& inst) { return stats_from_means(inst.means()); }

Instance make_thm4_instance(std::size_t m, std::size_t q, double delta, std::size_t k) {
  if (m <= 3) throw std::invalid_argument("thm4 instance needs M > 3");
  if (q < 1 || q >= m) throw std::invalid_argument("thm4 instance needs 1 <= Q < M");
  if (k < 2) throw std::invalid_argument("thm4 instance needs K >= 2");
  if (!(delta > 0.0)) throw std::invalid_argument("thm4 instance needs delta > 0");
  const double md = static_cast<double>(m);
  const double qd = static_cast<double>(q);
  const double outside = (md - 1.0) / (md - qd) * delta;
  const double inside = 2.0 * delta / qd;
  if (outside > 1.0)
    throw std::invalid_argument("thm4 instance: (M-1)/(M-Q)*delta = " + fmt(outside) + " exceeds 1");
  if (inside > 1.0)
    throw std::invalid_argument("thm4 instance: 2*delta/Q = " + fmt(inside) + " exceeds 1");
  Matrix<ArmDistribution> d(m, k, ArmDistribution::point_mass(0.0));
  for (std::size_t c = 0; c < m; ++c) {
    if (c < q) d(c, 1) = ArmDistribution::point_mass(inside);
    else d(c, 0) = ArmDistribution::point_mass(outside);
  }
  return Instance("thm4", std::move(d));
}

Instance make_thm5_instance(std::size_t m, std::size_t q, Rng& rng, std::size_t k) {
  const int x = bernoulli(rng, 0.5) ? 1 : 0;
  return make_thm5_instance_with_coin(m, q, x, k);
}

Instance make_thm5_instance_with_coin(std::size_t m, std::size_t q, int x, std::size_t k) {
  if (k != 2) throw std::invalid_argument("thm5 instance is two-armed (K = 2)");
  if (m < 3) throw std::invalid_argument("thm5 instance needs M >= 3");
  if (q < 1 || q >= m) throw std::invalid_argument("thm5 instance needs 1 <= Q < M");
  if (x != 0 && x != 1) throw std::invalid_argument("thm5 coin must be 0 or 1");
  Matrix<ArmDistribution> d(m, 2, ArmDistribution::point_mass(0.5));
  for (std::size_t c = q; c < m; ++c) d(c, 0) = ArmDistribution::point_mass(static_cast<double>(x));
  return Instance("thm5", std::move(d), LatentCoinState{x});
}

Instance make_homogeneous_instance(std::size_t m, std::span<const double> arm_means,
                                   ArmDistribution::Kind kind) {
  Matrix<ArmDistribution> d(m, arm_means.size());
  for (std::size_t c = 0; c < m; ++c)
    for (std::size_t k = 0; k < arm_means.size(); ++k)
      d(c, k) = kind == ArmDistribution::Kind::Bernoulli ? ArmDistribution::bernoulli(arm_means[k])
                                                         : ArmDistribution::point_mass(arm_means[k]);
  return Instance("homogeneous", std::move(d));
}

Instance read_custom_instance(std::istream& in, ArmDistribution::Kind kind, std::string name) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    std::vector<double> row;
    double v = 0.0;
    while (ls >> v) row.push_back(v);
    if (!ls.eof()) throw std::runtime_error("custom instance: unparsable row '" + line + "'");
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error("custom instance: ragged table");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("custom instance: empty table");
  Matrix<ArmDistribution> d(rows.size(), rows.front().size());
  for (std::size_t c = 0; c < rows.size(); ++c)
    for (std::size_t k = 0; k < rows[c].size(); ++k)
      d(c, k) = kind == ArmDistribution::Kind::Bernoulli ? ArmDistribution::bernoulli(rows[c][k])
                                                         : ArmDistribution::point_mass(rows[c][k]);
  return Instance(std::move(name), std::move(d));
}

std::size_t AdversarialEpochInstance::epoch_of(std::size_t t) const {
  if (t == 0 || t > horizon_) throw std::out_of_range("step outside horizon");
  return std::min((t - 1) / epoch_length_ + 1, epoch_count_);
}

Matrix<double> AdversarialEpochInstance::marginal_means() const {
  Matrix<double> out(clients_, 2, 0.0);
  const double outcomes = static_cast<double>(i0_.size() + 1);
  for (auto c : i0_) {
    out(c, 0) = 0.5 + epsilon_ / outcomes;
    out(c, 1) = 0.5;
  }
  return out;
}

ArmDistribution AdversarialEpochInstance::dist_given_state(std::size_t m, std::size_t k,
                                                           std::size_t x) const {
  if (m >= i0_.size()) return ArmDistribution::point_mass(0.0);
  if (x >= 1 && m == i0_[x - 1] && k == 0) return ArmDistribution::bernoulli(0.5 + epsilon_);
  return ArmDistribution::bernoulli(0.5);
}

AdversarialEpochInstance make_thm8_instance(std::size_t m, std::size_t t, double eta) {
  if (m == 0 || m % 4 != 0) throw std::invalid_argument("thm8 instance: M mod 4 = 0 required");
  if (t <= 8) throw std::invalid_argument("thm8 instance: T > 8 required");
  if (!(eta > 0.0 && eta <= 4.0)) throw std::invalid_argument("thm8 instance: 0 < η ≤ 4 required");

  AdversarialEpochInstance inst;
  const double md = static_cast<double>(m);
  inst.clients_ = m;
  inst.horizon_ = t;
  inst.eta_ = eta;
  inst.epsilon_ = std::sqrt(4.0 / eta) * (md * md / 2.0) / std::cbrt(static_cast<double>(t));
  inst.epoch_length_ = static_cast<std::size_t>(std::ceil(eta * md / 8.0));
  inst.epoch_count_ = t / inst.epoch_length_;

  const double eps = inst.epsilon_;
  const double budget = 8.0 * eps * eps * static_cast<double>(inst.epoch_length_);
  if (eps > 0.25)
    throw std::invalid_argument("thm8 instance: constraint ε ≤ 1/4 violated (ε = " + fmt(eps) + ")");
  if (budget > 1.0)
    throw std::invalid_argument("thm8 instance: constraint 8ε²d ≤ 1 violated (8ε²d = " + fmt(budget) + ")");
  if (inst.epoch_count_ == 0)
    throw std::invalid_argument("thm8 instance: D = floor(T/d) ≥ 1 violated");

  const auto layout = make_two_expander_graph(m, eta);
  inst.i0_ = layout.i0;
  inst.i1_ = layout.i1;
  return inst;
}

void resample_epoch_state(AdversarialEpochInstance& inst, std::size_t j, Rng& rng) {
  if (j < 1 || j > inst.epoch_count_) throw std::out_of_range("epoch index outside 1..D");
  // States are allocated on first use; a bare instance can describe huge T cheaply.
  if (inst.epoch_states_.size() != inst.epoch_count_) inst.epoch_states_.assign(inst.epoch_count_, 0);
  inst.epoch_states_[j - 1] = uniform_index(rng, inst.i0_.size() + 1);
}

void materialize_epochs(AdversarialEpochInstance& inst, Rng& rng) {
  for (std::size_t j = 1; j <= inst.epoch_count_; ++j) resample_epoch_state(inst, j, rng);
  inst.materialized_ = true;
}

GlobalStats global_stats(const AdversarialEpochInstance& inst) {
  return stats_from_means(inst.marginal_means());
}

std::size_t client_count(const Environment& env) {
  return std::visit([](const auto& e) { return e.client_count(); }, env);
}

std::size_t arm_count(const Environment& env) {
  return std::visit([](const auto& e) { return e.arm_count(); }, env);
}

GlobalStats global_stats(const Environment& env) {
  return std::visit([](const auto& e) { return global_stats(e); }, env);
}

Matrix<double> regret_means(const Environment& env) {
  if (const auto* inst = std::get_if<Instance>(&env)) return inst->means();
  return std::get<AdversarialEpochInstance>(env).marginal_means();
}

std::string environment_name(const Environment& env) {
  if (const auto* inst = std::get_if<Instance>(&env)) return inst->name();
  return "thm8";
}

void sample_rewards(const Instance& inst, std::size_t /*t*/, Rng& rng, Matrix<double>& out) {
  if (out.rows() != inst.client_count() || out.cols() != inst.arm_count())
    out = Matrix<double>(inst.client_count(), inst.arm_count());
  for (std::size_t m = 0; m < inst.client_count(); ++m)
    for (std::size_t k = 0; k < inst.arm_count(); ++k) out(m, k) = inst.dist(m, k).sample(rng);
}

void sample_rewards(const AdversarialEpochInstance& inst, std::size_t t, Rng& rng,
                    Matrix<double>& out) {
  if (!inst.materialized()) throw std::logic_error("thm8 instance: epoch states not materialized");
  if (out.rows() != inst.client_count() || out.cols() != 2) out = Matrix<double>(inst.client_count(), 2);
  const auto x = inst.epoch_states()[inst.epoch_of(t) - 1];
  for (std::size_t m = 0; m < inst.client_count(); ++m)
    for (std::size_t k = 0; k < 2; ++k) out(m, k) = inst.dist_given_state(m, k, x).sample(rng);
}

void sample_rewards(const Environment& env, std::size_t t, Rng& rng, Matrix<double>& out) {
  std::visit([&](const auto& e) { sample_rewards(e, t, rng, out); }, env);
}

}  // namespace dmab
