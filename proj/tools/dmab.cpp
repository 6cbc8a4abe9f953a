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

// dmab: run, sweep and verify decentralized bandit experiments.
#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>

#include "dmab/config.hpp"
#include "dmab/experiment.hpp"
#include "dmab/text.hpp"
#include "dmab/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;

struct Overrides {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "experiment config (key = value or JSON)")->required();
  cmd->add_option("--out", o.out, "output directory (overrides config)");
  cmd->add_option("--seed", o.seed, "master seed (overrides config)");
  cmd->add_option("--jobs", o.jobs, "worker threads (overrides config)")->check(CLI::Range(1, 4096));
}

dmab::ExperimentConfig load(const Overrides& o) {
  auto cfg = dmab::load_config(o.config);
  if (!o.out.empty()) cfg.out_dir = o.out;
  if (o.seed) cfg.master_seed = *o.seed;
  if (o.jobs) cfg.jobs = *o.jobs;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized multi-agent bandit simulator and hard-instance laboratory"};
  app.require_subcommand(1);

  Overrides run_opts;
  auto* run_cmd = app.add_subcommand("run", "run every (T, seed) cell and write trajectory CSVs");
  add_common(run_cmd, run_opts);

  Overrides sweep_opts;
  bool replay = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "run the grid, aggregate per T and fit the scaling exponent");
  add_common(sweep_cmd, sweep_opts);
  sweep_cmd->add_flag("--replay", replay, "reuse the run CSVs already in the output directory");

  std::string level = "fast";
  auto* verify_cmd = app.add_subcommand("verify", "run the invariant suites");
  verify_cmd->add_option("--level", level, "fast or full")->check(CLI::IsMember({"fast", "full"}));

  std::string info_config;
  std::string info_instance;
  std::optional<std::size_t> info_horizon;
  auto* info_cmd = app.add_subcommand("instance-info", "print global statistics of an instance");
  info_cmd->add_option("--config", info_config, "experiment config");
  info_cmd->add_option("--instance", info_instance, "instance spec, e.g. thm8(4, 262144, 4)");
  info_cmd->add_option("--horizon", info_horizon, "horizon for instances that depend on T");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run_cmd) {
      const auto cfg = load(run_opts);
      const auto runs = dmab::cmd_run(cfg);
      std::cout << "wrote " << runs.size() << " runs to " << cfg.out_dir.string() << '\n';
      return kExitOk;
    }
    if (*sweep_cmd) {
      const auto cfg = load(sweep_opts);
      const auto report = dmab::cmd_sweep(cfg, replay);
      std::cout << "T,mean_regret,stderr\n";
      for (const auto& p : report.aggregate)
        std::cout << p.horizon << ',' << dmab::format_double(p.mean) << ','
                  << dmab::format_double(p.std_error) << '\n';
      if (report.fit) {
        std::cout << "alpha = " << dmab::format_double(report.fit->alpha)
                  << ", r2 = " << dmab::format_double(report.fit->r2) << '\n';
      }
      for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
      return kExitOk;
    }
    if (*verify_cmd) {
      dmab::VerifyOptions options;
      options.full = level == "full";
      const auto results = dmab::run_verify(options);
      return dmab::print_verify_table(std::cout, results) ? kExitOk : kExitInvariant;
    }
    if (*info_cmd) {
      dmab::ComponentSpec spec;
      std::optional<std::size_t> horizon = info_horizon;
      if (!info_instance.empty()) {
        spec = dmab::parse_component(info_instance);
      } else if (!info_config.empty()) {
        const auto cfg = dmab::load_config(info_config);
        spec = cfg.instance;
        if (!horizon) horizon = cfg.horizons.back();
      } else {
        throw dmab::ConfigError("instance-info needs --instance or --config");
      }
      return dmab::print_instance_info(std::cout, spec, horizon) ? kExitOk : kExitInvariant;
    }
  } catch (const dmab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
