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
#ifndef EAGLESON_CONFIG_HPP
#define EAGLESON_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eagleson/models.hpp"
#include "eagleson/sums.hpp"

namespace eagleson {

inline constexpr int kConfigFormatVersion = 1;

enum class ExperimentKind {
  EaglesonConvergence,
  QuantBound,
  Centering,
  Variance,
  Wip,
  MixingAudit,
  Constant,
};

const char* experiment_kind_name(ExperimentKind kind);
std::optional<ExperimentKind> experiment_kind_from_name(const std::string& name);

struct NormalizerRule {
  enum class Kind { SqrtN, Self, Explicit } kind = Kind::Self;
  std::vector<double> values;  // aligned with n_list for Explicit
};

struct SelectionRule {
  enum class Kind { Auto, Explicit } kind = Kind::Auto;
  double T = 0.0;        // Explicit
  std::size_t rho = 0;   // Explicit
  double T_max = 1e6;    // Auto
};

struct WipParams {
  std::size_t grid_points = 129;  // uniform grid on [0, 1]
  double eps = 0.6;
  double delta = 0.03125;
  std::vector<double> fdd_times = {0.5, 1.0};
  std::size_t tightness_samples = 20000;
  std::vector<double> c_grid;  // default derived from the tilt sup bound
};

struct MixingAuditParams {
  double p = 2.0;  // exponent for the alpha -> delta synthesis
  std::size_t k_max = 2;
  std::size_t depth = 2;
  std::size_t n_max = 8;
  std::vector<double> envelope_t = {0.0, 0.25, 0.5, 1.0, 2.0};
  std::vector<std::size_t> envelope_n = {1, 2, 4, 8};
};

struct ExperimentConfig {
  int format_version = kConfigFormatVersion;
  ExperimentKind kind = ExperimentKind::Constant;
  ProcessModel model = iid_sign_chain();
  DensityTilt tilt = DensityTilt::map_identity();
  ObservableSequence observable = ObservableSequence::map_cos2pi();
  std::vector<std::size_t> n_list;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  NormalizerRule normalizer;
  SelectionRule selection;
  ExponentTriple exponents{3.0, 3.0, 3.0};
  WipParams wip;
  MixingAuditParams audit;
  std::string output_dir = "out";
  unsigned workers = 0;  // 0 = hardware
  std::size_t memory_limit_mb = 3072;
  std::string echo;  // canonical serialization of the parsed document
};

struct ConfigValidation {
  std::optional<ExperimentConfig> config;
  std::vector<std::string> errors;  // exhaustive: every offending field path
};

/// Parses and fully resolves a config document; collects every error instead
/// of failing fast. Parse errors carry byte positions, semantic errors carry
/// field paths.
ConfigValidation validate_config(const std::string& path);
ConfigValidation validate_config_text(const std::string& text);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace eagleson

#endif  // EAGLESON_CONFIG_HPP
