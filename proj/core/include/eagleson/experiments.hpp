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
#ifndef EAGLESON_EXPERIMENTS_HPP
#define EAGLESON_EXPERIMENTS_HPP

#include <functional>
#include <string>
#include <vector>

#include "eagleson/config.hpp"
#include "eagleson/mixing.hpp"

namespace eagleson {

inline constexpr int kReportFormatVersion = 1;

/// Full result of one experiment run. CSV rows are pre-rendered with
/// round-trip float formatting so identical (config, seed, worker count)
/// runs emit identical bytes.
struct RunReport {
  ExperimentKind kind = ExperimentKind::Constant;
  std::string config_echo;
  std::string csv_header;
  std::vector<std::string> csv_rows;
  std::vector<std::string> jsonl_rows;
  // extra emitted files, e.g. the operator-norm envelope table
  std::vector<std::pair<std::string, std::string>> extra_files;
  double wall_seconds = 0.0;
  unsigned workers = 0;
  int format_version = kReportFormatVersion;
  bool checks_passed = true;  // embedded dominance checks
  std::vector<std::string> check_messages;
};

using Logger = std::function<void(const std::string&)>;

/// Executes the pipeline named by the config kind. Throws ResourceError when
/// the memory estimate exceeds the configured limit (before any sampling).
RunReport run_experiment(const ExperimentConfig& config, const Logger& log = {});

/// Writes <out>/<kind>.csv, <out>/<kind>.jsonl and any extra files; returns
/// the written paths.
std::vector<std::string> write_report(const RunReport& report,
                                      const std::string& out_dir);

/// The decay profile the pipelines pair with the model: analytic slope
/// products for maps, Dobrushin-synthesized for chains (gamma == 0; tilts
/// depend on the initial coordinate only). The profile's norm class must
/// match the tilt's; mismatches are rejected.
MixingProfile model_delta_profile(const ProcessModel& model, const DensityTilt& tilt,
                                  std::size_t up_to);

/// Shortest round-trip decimal rendering (std::to_chars).
std::string format_double(double v);

}  // namespace eagleson

#endif  // EAGLESON_EXPERIMENTS_HPP
