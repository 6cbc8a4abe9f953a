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

#include "dmab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>

#include "dmab/rng.hpp"
#include "dmab/text.hpp"

namespace dmab {

namespace {

constexpr std::uint64_t kCoinStream = 5;

ArmDistribution::Kind reward_kind(const ComponentSpec& spec) {
  const auto kind = spec.has("reward") ? spec.text("reward") : std::string("bernoulli");
  if (kind == "bernoulli") return ArmDistribution::Kind::Bernoulli;
  if (kind == "point") return ArmDistribution::Kind::PointMass;
  throw ConfigError(spec.name + ".reward: expected bernoulli or point, got '" + kind + "'");
}

std::vector<double> number_list(const ComponentSpec& spec, const std::string& key) {
  std::vector<double> out;
  std::istringstream is(spec.text(key));
  std::string item;
  while (std::getline(is, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    try {
      out.push_back(parse_double(item));
    } catch (const std::exception&) {
      throw ConfigError(spec.name + "." + key + ": expected numbers, got '" + item + "'");
    }
  }
  return out;
}

std::vector<std::string> text_list(const ComponentSpec& spec, const std::string& key) {
  std::vector<std::string> out;
  std::istringstream is(spec.text(key));
  std::string item;
  while (std::getline(is, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  return in;
}

Graph read_graph_file(const std::string& path) {
  auto in = open_input(path);
  try {
    return read_edge_list(in);
  } catch (const std::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::size_t thm8_clients(const ComponentSpec& spec, std::size_t horizon) {
  if (spec.has("M") && spec.text("M") != "auto") return spec.count("M");
  const auto root = std::cbrt(static_cast<double>(horizon));
  const auto rounded = static_cast<std::size_t>(std::llround(root / 4.0)) * 4;
  return std::max<std::size_t>(4, rounded);
}

std::size_t thm8_horizon(const ComponentSpec& spec, std::optional<std::size_t> horizon) {
  if (spec.has("T")) {
    const auto t = spec.count("T");
    if (horizon && *horizon != t)
      throw ConfigError("thm8: instance T = " + std::to_string(t) + " differs from horizon " +
                        std::to_string(*horizon));
    return t;
  }
  if (!horizon) throw ConfigError("thm8: missing parameter 'T'");
  return *horizon;
}

// Cells are spread over `jobs` threads; results land in their plan slot.
template <typename Fn>
void for_each_cell(std::size_t count, std::size_t jobs, Fn&& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
}

void require_sweep_grid(const ExperimentConfig& cfg) {
  if (cfg.horizons.size() < 3) throw ConfigError("sweep needs at least 3 horizons");
  if (cfg.seeds.size() < 2) throw ConfigError("sweep needs at least 2 seeds");
}

std::string fit_json(const std::optional<ScalingFit>& fit, const std::vector<std::string>& warnings) {
  nlohmann::ordered_json j;
  if (fit) {
    j["alpha"] = fit->alpha;
    j["prefactor"] = fit->prefactor;
    j["r2"] = fit->r2;
    j["points_used"] = fit->points.size();
  } else {
    j["alpha"] = nullptr;
    j["prefactor"] = nullptr;
    j["r2"] = nullptr;
    j["points_used"] = 0;
  }
  if (!warnings.empty()) j["warning"] = warnings;
  return j.dump(2) + "\n";
}

std::string check_line(const std::string& label, bool ok) {
  return "check " + label + ": " + (ok ? "pass" : "FAIL") + "\n";
}

void print_stats(std::ostream& out, const GlobalStats& stats, const std::string& suffix = "") {
  out << "global means" << suffix << " =";
  for (double v : stats.global_means) out << ' ' << format_double(v);
  out << "\noptimal arm" << suffix << " = " << stats.optimal_arm + 1 << "\ngaps" << suffix << " =";
  for (double v : stats.gaps) out << ' ' << format_double(v);
  out << '\n';
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t master, std::size_t horizon_index, std::uint64_t seed_label) {
  return derive_seed(master, horizon_index, seed_label);
}

std::vector<RunCell> plan_cells(const ExperimentConfig& cfg) {
  std::vector<RunCell> cells;
  for (std::size_t h = 0; h < cfg.horizons.size(); ++h)
    for (auto label : cfg.seeds)
      cells.push_back({h, cfg.horizons[h], label, stream_seed(cfg.master_seed, h, label)});
  return cells;
}

Environment build_environment(const ComponentSpec& spec, std::size_t horizon,
                              std::uint64_t seed) {
  const auto& name = spec.name;
  if (name == "thm4") {
    return make_thm4_instance(spec.count("M"), spec.count("Q"), spec.number("delta"),
                              spec.count("K", 2));
  }
  if (name == "thm5") {
    Rng rng(derive_seed(seed, kCoinStream));
    return make_thm5_instance(spec.count("M"), spec.count("Q"), rng, spec.count("K", 2));
  }
  if (name == "thm8") {
    const auto t = thm8_horizon(spec, horizon);
    return make_thm8_instance(thm8_clients(spec, t), t, spec.number("eta", 4.0));
  }
  if (name == "homogeneous") {
    const auto means = number_list(spec, "means");
    return make_homogeneous_instance(spec.count("M"), means, reward_kind(spec));
  }
  if (name == "custom") {
    const auto path = spec.text("path");
    auto in = open_input(path);
    try {
      return read_custom_instance(in, reward_kind(spec), "custom");
    } catch (const std::runtime_error& e) {
      throw ConfigError(path + ": " + e.what());
    }
  }
  throw ConfigError("unknown instance '" + name + "'");
}

TemporalGraphModel build_graph_model(const ComponentSpec& spec, std::size_t clients) {
  const auto& name = spec.name;
  auto sized = [&](Graph g) {
    if (g.node_count() != clients)
      throw ConfigError(name + ": graph has " + std::to_string(g.node_count()) +
                        " nodes, instance has " + std::to_string(clients));
    return g;
  };
  if (name == "complete") return TemporalGraphModel::make_static(make_complete_graph(clients));
  if (name == "path") return TemporalGraphModel::make_static(make_path_graph(clients));
  if (name == "empty") return TemporalGraphModel::make_static(make_empty_graph(clients));
  if (name == "disconnected_clique")
    return TemporalGraphModel::make_static(make_disconnected_clique_graph(clients, spec.count("Q")));
  if (name == "two_expander")
    return TemporalGraphModel::make_static(make_two_expander_graph(clients, spec.number("eta", 4.0)).graph);
  if (name == "er") return TemporalGraphModel::erdos_renyi(clients, spec.number("c"));
  if (name == "random_connected") return TemporalGraphModel::random_connected(clients, spec.number("c"));
  if (name == "edge_list")
    return TemporalGraphModel::make_static(sized(read_graph_file(spec.text("path"))));
  if (name == "periodic_union") {
    std::vector<Graph> graphs;
    for (const auto& file : text_list(spec, "files")) graphs.push_back(sized(read_graph_file(file)));
    return TemporalGraphModel::periodic_union(spec.count("window"), std::move(graphs));
  }
  throw ConfigError("unknown graph '" + name + "'");
}

std::unique_ptr<Policy> build_policy(const ComponentSpec& spec, std::size_t arms) {
  const auto& name = spec.name;
  if (name == "gossip_ucb") return std::make_unique<GossipUcbPolicy>(spec.number("C", 2.0));
  if (name == "exp3_gossip") return std::make_unique<Exp3GossipPolicy>(spec.number("gamma0", 1.0));
  if (name == "full_info_leader") return std::make_unique<FullInfoLeaderPolicy>();
  if (name == "uniform_random") return std::make_unique<UniformRandomPolicy>();
  if (name == "fixed") {
    const auto k = spec.count("k");
    if (k < 1 || k > arms)
      throw ConfigError("fixed: arm k = " + std::to_string(k) + " outside 1.." + std::to_string(arms));
    return std::make_unique<FixedArmPolicy>(k - 1);
  }
  throw ConfigError("unknown policy '" + name + "'");
}

Trajectory execute_cell(const ExperimentConfig& cfg, const RunCell& cell) {
  const auto env = build_environment(cfg.instance, cell.horizon, cell.stream_seed);
  const auto graphs = build_graph_model(cfg.graph, client_count(env));
  auto policy = build_policy(cfg.policy, arm_count(env));
  return run(env, graphs, *policy, cell.horizon, cell.stream_seed);
}

std::string run_file_name(const RunCell& cell) {
  return "run_T" + std::to_string(cell.horizon) + "_s" + std::to_string(cell.seed_label) + ".csv";
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::vector<RunSummary> cmd_run(const ExperimentConfig& cfg) {
  // Validate every spec once up front so config errors surface before work starts.
  {
    const auto env = build_environment(cfg.instance, cfg.horizons.front(), 0);
    build_graph_model(cfg.graph, client_count(env));
    build_policy(cfg.policy, arm_count(env));
  }
  std::filesystem::create_directories(cfg.out_dir);
  const auto cells = plan_cells(cfg);
  std::vector<RunSummary> summaries(cells.size());
  for_each_cell(cells.size(), cfg.jobs, [&](std::size_t i) {
    const auto traj = execute_cell(cfg, cells[i]);
    std::ostringstream csv;
    write_trajectory_csv(csv, traj);
    const auto file = run_file_name(cells[i]);
    write_file_atomic(cfg.out_dir / file, csv.str());
    summaries[i] = {cells[i], file, traj.final_regret(), traj.disagreement_steps};
  });

  nlohmann::ordered_json meta;
  meta["instance"] = cfg.instance.describe();
  meta["graph"] = cfg.graph.describe();
  meta["policy"] = cfg.policy.describe();
  meta["master_seed"] = cfg.master_seed;
  meta["seed_rule"] = "derive_seed(master_seed, horizon_index, seed)";
  auto& runs = meta["runs"] = nlohmann::ordered_json::array();
  for (const auto& s : summaries) {
    nlohmann::ordered_json r;
    r["T"] = s.cell.horizon;
    r["seed"] = s.cell.seed_label;
    r["stream_seed"] = s.cell.stream_seed;
    r["file"] = s.file;
    r["final_regret"] = s.final_regret;
    r["T_d"] = s.disagreement_steps;
    runs.push_back(std::move(r));
  }
  write_file_atomic(cfg.out_dir / "runs.json", meta.dump(2) + "\n");
  return summaries;
}

double read_final_regret(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "t,cum_regret,realized_regret,T_d_so_far")
    throw std::runtime_error("trajectory csv: unexpected header");
  std::string last;
  while (std::getline(in, line))
    if (!line.empty()) last = line;
  if (last.empty()) return 0.0;
  const auto a = last.find(',');
  const auto b = last.find(',', a + 1);
  if (a == std::string::npos || b == std::string::npos)
    throw std::runtime_error("trajectory csv: malformed row '" + last + "'");
  return parse_double(std::string_view(last).substr(a + 1, b - a - 1));
}

SweepReport cmd_sweep(const ExperimentConfig& cfg, bool replay) {
  require_sweep_grid(cfg);
  std::vector<RunResult> results;
  if (replay) {
    for (const auto& cell : plan_cells(cfg)) {
      const auto path = cfg.out_dir / run_file_name(cell);
      std::ifstream in(path);
      if (!in) throw std::runtime_error("replay: missing " + path.string());
      results.push_back({cell.horizon, cell.seed_label, read_final_regret(in)});
    }
  } else {
    for (const auto& s : cmd_run(cfg))
      results.push_back({s.cell.horizon, s.cell.seed_label, s.final_regret});
  }

  SweepReport report;
  report.aggregate = aggregate_runs(results);
  const auto points = to_scaling_points(report.aggregate);
  try {
    report.fit = fit_scaling_exponent(points);
    report.warnings = report.fit->warnings;
  } catch (const std::invalid_argument& e) {
    for (const auto& p : points) {
      if (p.horizon < kFitMinHorizon)
        report.warnings.push_back("dropped T = " + format_double(p.horizon) + " (burn-in)");
      else if (!(p.mean_regret > 0.0))
        report.warnings.push_back("dropped T = " + format_double(p.horizon) + " (non-positive regret)");
    }
    report.warnings.push_back(std::string("fit refused: ") + e.what());
  }

  std::filesystem::create_directories(cfg.out_dir);
  std::ostringstream csv;
  write_aggregate_csv(csv, report.aggregate);
  write_file_atomic(cfg.out_dir / "aggregate.csv", csv.str());
  write_file_atomic(cfg.out_dir / "fit.json", fit_json(report.fit, report.warnings));
  return report;
}

bool print_instance_info(std::ostream& out, const ComponentSpec& spec,
                         std::optional<std::size_t> horizon) {
  out << "instance: " << spec.describe() << '\n';
  if (spec.name == "thm8") {
    const auto t = thm8_horizon(spec, horizon);
    const auto inst = make_thm8_instance(thm8_clients(spec, t), t, spec.number("eta", 4.0));
    const double eps = inst.epsilon();
    const auto d = inst.epoch_length();
    const auto epochs = inst.epoch_count();
    const double budget = 8.0 * eps * eps * static_cast<double>(d);
    out << "M = " << inst.client_count() << "\nK = 2\nT = " << t << "\nη = " << format_double(inst.eta())
        << '\n';
    print_stats(out, global_stats(inst));
    out << "ε = " << format_double(eps) << "\nd = " << d << "\nD = " << epochs
        << "\n8ε²d = " << format_double(budget) << '\n';
    const double tv = eps * std::sqrt(2.0 * static_cast<double>(d));
    const bool checks[] = {eps <= 0.25, budget <= 1.0, epochs * d <= t && t < (epochs + 1) * d,
                           tv <= 0.5, per_step_kl(eps) <= 4.0 * eps * eps,
                           inst.i0().size() == inst.client_count() / 4 &&
                               inst.i1().size() == inst.client_count() / 4};
    out << check_line("ε ≤ 1/4", checks[0]) << check_line("8ε²d ≤ 1", checks[1])
        << check_line("D·d ≤ T < (D+1)·d", checks[2]) << check_line("ε√(2d) ≤ 1/2", checks[3])
        << check_line("KL per step ≤ 4ε²", checks[4]) << check_line("|I0| = |I1| = M/4", checks[5]);
    return std::all_of(std::begin(checks), std::end(checks), [](bool b) { return b; });
  }
  if (spec.name == "thm5") {
    const auto m = spec.count("M");
    const auto q = spec.count("Q");
    const auto k = spec.count("K", 2);
    const auto heads = make_thm5_instance_with_coin(m, q, 1, k);
    const auto tails = make_thm5_instance_with_coin(m, q, 0, k);
    out << "M = " << m << "\nK = " << k << "\nlatent coin x uniform on {0, 1}\n";
    print_stats(out, global_stats(tails), " (x=0)");
    print_stats(out, global_stats(heads), " (x=1)");
    return true;
  }
  const auto env = build_environment(spec, horizon.value_or(1), 0);
  out << "M = " << client_count(env) << "\nK = " << arm_count(env) << '\n';
  print_stats(out, global_stats(env));
  return true;
}

}  // namespace dmab
