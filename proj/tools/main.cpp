/*
   Copyright 2026 the eagleson authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "eagleson/config.hpp"
#include "eagleson/esseen.hpp"
#include "eagleson/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitResource = 3;
constexpr int kExitCheckFailed = 4;

int cmd_validate(const std::string& config_path) {
  const auto result = eagleson::validate_config(config_path);
  if (!result.errors.empty()) {
    for (const auto& e : result.errors) std::cerr << "config error: " << e << '\n';
    return kExitConfig;
  }
  std::cout << "config ok: "
            << eagleson::experiment_kind_name(result.config->kind) << '\n';
  return kExitOk;
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            std::optional<unsigned> workers, std::optional<std::string> out_dir) {
  auto result = eagleson::validate_config(config_path);
  if (!result.errors.empty()) {
    for (const auto& e : result.errors) std::cerr << "config error: " << e << '\n';
    return kExitConfig;
  }
  auto cfg = *result.config;
  if (seed) cfg.seed = *seed;
  if (workers) cfg.workers = *workers;
  if (out_dir) cfg.output_dir = *out_dir;

  try {
    const auto report = eagleson::run_experiment(
        cfg, [](const std::string& line) { std::cout << line << '\n'; });
    const auto written = eagleson::write_report(report, cfg.output_dir);
    for (const auto& path : written) std::cout << "wrote " << path << '\n';
    for (const auto& msg : report.check_messages) std::cout << msg << '\n';
    std::cout << "done in " << report.wall_seconds << " s on " << report.workers
              << " worker(s)\n";
    return report.checks_passed ? kExitOk : kExitCheckFailed;
  } catch (const eagleson::ResourceError& e) {
    std::cerr << "resource error: " << e.what() << '\n';
    return kExitResource;
  } catch (const eagleson::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
}

int cmd_constant() {
  const auto c = eagleson::esseen_constant();
  std::cout << "c = " << eagleson::format_double(c.c)
            << "\nresidual = " << eagleson::format_double(c.residual) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Change-of-measure limit theorem verification toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> out_dir;

  auto* run = app.add_subcommand("run", "run an experiment from a config file");
  run->add_option("--config", config_path, "config file (JSON)")->required();
  run->add_option("--seed", seed, "override the master seed");
  run->add_option("--workers", workers, "worker threads (0 = hardware)");
  run->add_option("--out", out_dir, "output directory");

  auto* validate = app.add_subcommand("validate", "validate a config file");
  validate->add_option("--config", config_path, "config file (JSON)")->required();

  auto* constant =
      app.add_subcommand("constant", "print the smoothing-inequality constant");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return cmd_run(config_path, seed, workers, out_dir);
  if (validate->parsed()) return cmd_validate(config_path);
  if (constant->parsed()) return cmd_constant();
  return kExitOk;
}
