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

#include "dmab/verify.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "dmab/analysis.hpp"
#include "dmab/enumerate.hpp"
#include "dmab/rng.hpp"
#include "dmab/text.hpp"

namespace dmab {

namespace {

constexpr std::size_t kMaxMessages = 5;
constexpr std::uint64_t kVerifySeed = 0x5eed;

class Checker {
 public:
  explicit Checker(std::string name) : start_(std::chrono::steady_clock::now()) {
    result_.name = std::move(name);
  }

  void check(bool ok, const std::string& what) {
    ++result_.checks;
    if (ok) return;
    ++result_.failures;
    if (result_.messages.size() < kMaxMessages) result_.messages.push_back(what);
  }

  // Exceptions count as failures of the check being attempted.
  template <typename Fn>
  void guarded(const std::string& what, Fn&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      check(false, what + ": " + e.what());
    }
  }

  SuiteResult finish() {
    result_.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    return result_;
  }

 private:
  SuiteResult result_;
  std::chrono::steady_clock::time_point start_;
};

// Chain rule oracle: KL between the d-fold products, summed over all 2^d strings.
double product_kl(double eps, std::size_t d) {
  double total = 0.0;
  for (std::uint32_t outcome = 0; outcome < (1U << d); ++outcome) {
    double fair = 1.0;
    double biased = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      fair *= 0.5;
      biased *= ((outcome >> i) & 1U) ? 0.5 + eps : 0.5 - eps;
    }
    total += fair * std::log(fair / biased);
  }
  return total;
}

}  // namespace

std::vector<EnumerationCase> enumeration_grid() {
  const double patterns[2][6] = {{0.0, 1.0, 0.25, 0.75, 0.5, 0.0},
                                 {1.0, 0.25, 0.5, 0.0, 0.75, 1.0}};
  std::vector<EnumerationCase> cases;
  for (std::size_t p = 0; p < 2; ++p) {
    for (std::size_t coin = 0; coin < 6; ++coin) {
      Matrix<ArmDistribution> dists(3, 2);
      for (std::size_t cell = 0; cell < 6; ++cell)
        dists(cell / 2, cell % 2) = cell == coin ? ArmDistribution::bernoulli(0.5)
                                                 : ArmDistribution::point_mass(patterns[p][cell]);
      const Instance inst("grid", dists);
      const auto label = "pattern " + std::to_string(p + 1) + ", coin at client " +
                         std::to_string(coin / 2 + 1) + " arm " + std::to_string(coin % 2 + 1);
      cases.push_back({label + ", complete", inst, make_complete_graph(3)});
      cases.push_back({label + ", path", inst, make_path_graph(3)});
    }
  }
  return cases;
}

SuiteResult verify_graph_suite() {
  Checker c("graph");
  Rng rng(derive_seed(kVerifySeed, 1));
  for (std::size_t i = 0; i < 300; ++i) {
    const std::size_t m = 3 + uniform_index(rng, 10);
    const double p = uniform01(rng);
    const auto g = (i % 2 == 0) ? sample_er_graph(m, p, rng) : sample_random_connected_graph(m, p, rng);
    const auto w = metropolis_weights(g);
    c.check(w.max_row_sum_deviation() < 1e-12 && w.max_col_sum_deviation() < 1e-12,
            "metropolis weights not doubly stochastic");
    bool support_ok = true;
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b)
        if (w(a, b) < 0.0 || (w(a, b) > 0.0 && !g.adjacent(a, b)) || w(a, b) != w(b, a)) support_ok = false;
    c.check(support_ok, "metropolis weights off the graph support");
    if (i % 2 == 1) c.check(is_connected(g), "random connected graph is disconnected");
  }
  for (std::size_t m = 4; m <= 32; m += 4) {
    for (double eta : {1.0, 2.0, 4.0}) {
      c.guarded("two-expander M=" + std::to_string(m), [&] {
        const auto te = make_two_expander_graph(m, eta);
        const auto dist = set_distance(te.graph, te.i0, te.i1);
        const auto need = static_cast<std::size_t>(std::ceil(eta * static_cast<double>(m) / 8.0));
        c.check(dist && *dist >= need && te.i0.size() == m / 4 && te.i1.size() == m / 4 &&
                    is_connected(te.graph),
                "two-expander M=" + std::to_string(m) + " violates its layout");
      });
    }
  }
  return c.finish();
}

SuiteResult verify_env_suite() {
  Checker c("env");
  for (std::size_t m = 4; m <= 12; ++m) {
    for (std::size_t q = 1; q < m; ++q) {
      for (double delta : {0.05, 0.1, 0.2, 0.4}) {
        if (delta * static_cast<double>(m - 1) / static_cast<double>(m - q) > 1.0 ||
            2.0 * delta / static_cast<double>(q) > 1.0)
          continue;
        c.guarded("thm4 grid", [&] {
          const auto stats = global_stats(make_thm4_instance(m, q, delta));
          const double expect = static_cast<double>(m - 3) * delta / static_cast<double>(m);
          c.check(std::abs(stats.gaps[1] - expect) < 1e-12 && stats.optimal_arm == 0,
                  "thm4 gap differs from (M-3)delta/M");
        });
      }
    }
  }
  for (std::size_t m = 3; m <= 10; ++m) {
    for (std::size_t q = 1; q < m; ++q) {
      c.guarded("thm5 grid", [&] {
        const auto heads = global_stats(make_thm5_instance_with_coin(m, q, 1));
        const auto tails = global_stats(make_thm5_instance_with_coin(m, q, 0));
        c.check(heads.optimal_arm == 0 && tails.optimal_arm == 1,
                "thm5 optimal arm does not follow the coin");
        c.check(std::abs(heads.gaps[1] - tails.gaps[0]) < 1e-12, "thm5 gap depends on the coin");
      });
    }
  }
  for (std::size_t m = 4; m <= 16; m += 4) {
    for (std::size_t e = 10; e <= 24; ++e) {
      const std::size_t t = std::size_t{1} << e;
      for (double eta : {1.0, 2.0, 4.0}) {
        try {
          const auto inst = make_thm8_instance(m, t, eta);
          const double eps = inst.epsilon();
          const auto d = inst.epoch_length();
          const auto n = inst.epoch_count();
          c.check(eps <= 0.25 && 8.0 * eps * eps * static_cast<double>(d) <= 1.0 && n * d <= t &&
                      t < (n + 1) * d && eps * std::sqrt(2.0 * static_cast<double>(d)) <= 0.5,
                  "thm8 constraints fail for M=" + std::to_string(m) + " T=" + std::to_string(t));
        } catch (const std::invalid_argument&) {
          // Rejected parameters are fine; accepted ones must satisfy every bound.
        }
      }
    }
  }
  return c.finish();
}

SuiteResult verify_kl_suite(const std::function<double(double)>& kl) {
  Checker c("kl-pinsker");
  for (std::size_t i = 0; i <= 1000; ++i) {
    const double eps = 0.25 * static_cast<double>(i) / 1000.0;
    const double v = kl(eps);
    c.check(v <= 4.0 * eps * eps + 1e-15, "per-step KL exceeds 4ε² at ε = " + format_double(eps));
    c.check(std::abs(v - kl_bernoulli(0.5, 0.5 + eps)) <= 1e-12 * std::max(1.0, v),
            "per-step KL disagrees with the Bernoulli divergence at ε = " + format_double(eps));
  }
  Rng rng(derive_seed(kVerifySeed, 3));
  for (std::size_t i = 0; i < 200; ++i) {
    const std::size_t d = 1 + uniform_index(rng, kExactTvMaxEpoch);
    const double eps = uniform01(rng) / std::sqrt(8.0 * static_cast<double>(d));
    const double step = kl(eps);
    const double dd = static_cast<double>(d);
    c.check(std::abs(dd * step - product_kl(eps, d)) <= 1e-10,
            "chain rule fails at ε = " + format_double(eps) + ", d = " + std::to_string(d));
    const double tv = exact_tv_small_epoch(eps, d);
    const double pinsker = std::sqrt(dd * step / 2.0);
    c.check(tv <= pinsker + 1e-12 && pinsker <= eps * std::sqrt(2.0 * dd) + 1e-12 &&
                eps * std::sqrt(2.0 * dd) <= 0.5 + 1e-12,
            "Pinsker chain fails at ε = " + format_double(eps) + ", d = " + std::to_string(d));
  }
  return c.finish();
}

SuiteResult verify_enumeration_suite() {
  Checker c("information-monotonicity");
  for (const auto& item : enumeration_grid()) {
    c.guarded(item.label, [&] {
      const auto full = enumerate_min_regret(item.instance, item.graph, 2, InfoModel::FullNeighbors);
      const auto bandit = enumerate_min_regret(item.instance, item.graph, 2, InfoModel::BanditNeighbors);
      c.check(full.min_regret <= bandit.min_regret + 1e-12,
              item.label + ": full " + format_double(full.min_regret) + " > bandit " +
                  format_double(bandit.min_regret));
    });
  }
  return c.finish();
}

std::vector<SuiteResult> run_verify(const VerifyOptions& options) {
  const auto kl = options.per_step_kl ? options.per_step_kl : std::function<double(double)>(per_step_kl);
  std::vector<SuiteResult> out{verify_graph_suite(), verify_env_suite(), verify_kl_suite(kl)};
  if (options.full) out.push_back(verify_enumeration_suite());
  return out;
}

bool print_verify_table(std::ostream& out, const std::vector<SuiteResult>& results) {
  bool ok = true;
  out << std::left << std::setw(26) << "suite" << std::setw(8) << "checks" << std::setw(10)
      << "failures" << std::setw(10) << "seconds" << "status\n";
  for (const auto& r : results) {
    std::ostringstream secs;
    secs << std::fixed << std::setprecision(2) << r.seconds;
    out << std::left << std::setw(26) << r.name << std::setw(8) << r.checks << std::setw(10)
        << r.failures << std::setw(10) << secs.str() << (r.passed() ? "PASS" : "FAIL") << '\n';
    for (const auto& msg : r.messages) out << "  - " << msg << '\n';
    ok = ok && r.passed();
  }
  return ok;
}

}  // namespace dmab
