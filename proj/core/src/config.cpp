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
#include "eagleson/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace eagleson {

using nlohmann::json;

const char* experiment_kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::EaglesonConvergence: return "eagleson-convergence";
    case ExperimentKind::QuantBound: return "quant-bound";
    case ExperimentKind::Centering: return "centering";
    case ExperimentKind::Variance: return "variance";
    case ExperimentKind::Wip: return "wip";
    case ExperimentKind::MixingAudit: return "mixing-audit";
    case ExperimentKind::Constant: return "constant";
  }
  return "?";
}

std::optional<ExperimentKind> experiment_kind_from_name(const std::string& name) {
  for (auto k : {ExperimentKind::EaglesonConvergence, ExperimentKind::QuantBound,
                 ExperimentKind::Centering, ExperimentKind::Variance,
                 ExperimentKind::Wip, ExperimentKind::MixingAudit,
                 ExperimentKind::Constant})
    if (name == experiment_kind_name(k)) return k;
  return std::nullopt;
}

namespace {

struct Collector {
  std::vector<std::string>* errors;
  void add(const std::string& path, const std::string& msg) {
    errors->push_back(path + ": " + msg);
  }
};

double parse_exponent(const json& v, const std::string& path, Collector& errs) {
  if (v.is_string()) {
    if (v.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
    errs.add(path, "expected a number >= 1 or \"inf\"");
    return 3.0;
  }
  if (!v.is_number()) {
    errs.add(path, "expected a number >= 1 or \"inf\"");
    return 3.0;
  }
  const double d = v.get<double>();
  if (d < 1.0) errs.add(path, "exponent must be >= 1");
  return d;
}

std::optional<ProcessModel> parse_model(const json& m, Collector& errs) {
  if (!m.is_object()) {
    errs.add("model", "expected an object");
    return std::nullopt;
  }
  const std::string type = m.value("type", "");
  try {
    if (type == "expanding-map") {
      std::vector<int> slopes = m.value("slopes", std::vector<int>{});
      const bool periodic = m.value("periodic", true);
      return ProcessModel(SequentialExpandingMap(slopes, periodic));
    }
    if (type == "markov-chain") {
      const std::size_t states = m.value("states", std::size_t{0});
      const bool periodic = m.value("periodic", true);
      std::vector<std::vector<double>> mats;
      if (!m.contains("matrices") || !m["matrices"].is_array()) {
        errs.add("model.matrices", "expected an array of row-major matrices");
        return std::nullopt;
      }
      for (const auto& mat : m["matrices"]) {
        if (mat.is_array() && !mat.empty() && mat[0].is_array()) {
          // nested rows
          std::vector<double> flat;
          for (const auto& row : mat)
            for (const auto& v : row) flat.push_back(v.get<double>());
          mats.push_back(std::move(flat));
        } else {
          mats.push_back(mat.get<std::vector<double>>());
        }
      }
      std::vector<double> initial = m.value("initial", std::vector<double>{});
      return ProcessModel(InhomogeneousMarkovChain(states, mats, periodic, initial));
    }
    if (type == "iid-sign") return ProcessModel(iid_sign_chain());
  } catch (const std::exception& e) {
    errs.add("model", e.what());
    return std::nullopt;
  }
  errs.add("model.type",
           "unknown type '" + type + "' (expanding-map | markov-chain | iid-sign)");
  return std::nullopt;
}

std::optional<DensityTilt> parse_tilt(const json& t, const ProcessModel& model,
                                      Collector& errs) {
  const bool is_map = std::holds_alternative<SequentialExpandingMap>(model);
  if (!t.is_object()) {
    errs.add("tilt", "expected an object");
    return std::nullopt;
  }
  const std::string type = t.value("type", "identity");
  try {
    DensityTilt raw = [&] {
      if (type == "identity") {
        if (is_map) return DensityTilt::map_identity();
        const auto& chain = std::get<InhomogeneousMarkovChain>(model);
        return DensityTilt::chain_values(
            std::vector<double>(chain.state_count(), 1.0), t.value("p", 2.0));
      }
      if (type == "cosine") {
        if (!is_map) throw std::invalid_argument("cosine tilt needs a map model");
        return DensityTilt::map_cosine(t.value("amplitude", 0.5));
      }
      if (type == "step") {
        if (!is_map) throw std::invalid_argument("step tilt needs a map model");
        return DensityTilt::map_step(t.value("left_value", 2.0), t.value("cut", 0.5));
      }
      if (type == "vector") {
        if (is_map) throw std::invalid_argument("vector tilt needs a chain model");
        return DensityTilt::chain_values(t.value("values", std::vector<double>{}),
                                         t.value("p", 2.0));
      }
      throw std::invalid_argument("unknown type '" + type +
                                  "' (identity | cosine | step | vector)");
    }();
    return validate_tilt(raw, model);
  } catch (const std::exception& e) {
    errs.add("tilt", e.what());
    return std::nullopt;
  }
}

std::optional<ObservableSequence> parse_observable(const json& o,
                                                   const ProcessModel& model,
                                                   Collector& errs) {
  const bool is_map = std::holds_alternative<SequentialExpandingMap>(model);
  if (!o.is_object()) {
    errs.add("observable", "expected an object");
    return std::nullopt;
  }
  const std::string type = o.value("type", "");
  try {
    if (type == "cos2pi" || type == "sin2pi" || type == "centered-x") {
      if (!is_map)
        throw std::invalid_argument("'" + type + "' needs a map model");
      if (type == "cos2pi") return ObservableSequence::map_cos2pi();
      if (type == "sin2pi") return ObservableSequence::map_sin2pi();
      return ObservableSequence::map_centered_x();
    }
    if (type == "pm1") {
      if (is_map) throw std::invalid_argument("'pm1' needs a chain model");
      const auto& chain = std::get<InhomogeneousMarkovChain>(model);
      std::vector<double> table(chain.state_count());
      for (std::size_t s = 0; s < table.size(); ++s)
        table[s] = s % 2 == 0 ? 1.0 : -1.0;
      return ObservableSequence::chain_table({table}, 1);
    }
    if (type == "state-values") {
      if (is_map) throw std::invalid_argument("'state-values' needs a chain model");
      std::vector<std::vector<double>> tables =
          o.value("tables", std::vector<std::vector<double>>{});
      return ObservableSequence::chain_table(tables, o.value("dimension", 1));
    }
    throw std::invalid_argument(
        "unknown type '" + type +
        "' (cos2pi | sin2pi | centered-x | pm1 | state-values)");
  } catch (const std::exception& e) {
    errs.add("observable", e.what());
    return std::nullopt;
  }
}

}  // namespace

namespace {
ConfigValidation validate_config_json(const json& doc) {
  ConfigValidation out;
  Collector errs{&out.errors};
  ExperimentConfig cfg;

  if (!doc.is_object()) {
    errs.add("$", "config must be a JSON object");
    return out;
  }
  if (!doc.contains("format_version") || !doc["format_version"].is_number_integer())
    errs.add("format_version", "mandatory integer field");
  else if (doc["format_version"].get<int>() != kConfigFormatVersion)
    errs.add("format_version", "unsupported version (expected " +
                                   std::to_string(kConfigFormatVersion) + ")");

  const std::string kind_name = doc.value("experiment", "");
  bool kind_valid = true;
  if (auto k = experiment_kind_from_name(kind_name)) {
    cfg.kind = *k;
  } else {
    kind_valid = false;
    errs.add("experiment",
             "unknown kind '" + kind_name +
                 "' (eagleson-convergence | quant-bound | centering | variance | "
                 "wip | mixing-audit | constant)");
  }
  // an unknown kind still gets the full field validation
  const bool sampling_kind =
      !kind_valid || (cfg.kind != ExperimentKind::Constant &&
                      cfg.kind != ExperimentKind::MixingAudit);

  std::optional<ProcessModel> model;
  if (doc.contains("model")) {
    model = parse_model(doc["model"], errs);
    if (model) cfg.model = *model;
  } else if (!kind_valid || cfg.kind != ExperimentKind::Constant) {
    errs.add("model", "missing section");
  }

  if (model) {
    if (doc.contains("tilt")) {
      if (auto t = parse_tilt(doc["tilt"], *model, errs)) cfg.tilt = *t;
    } else {
      json identity = {{"type", "identity"}};
      if (auto t = parse_tilt(identity, *model, errs)) cfg.tilt = *t;
    }
    if (doc.contains("observable")) {
      if (auto o = parse_observable(doc["observable"], *model, errs))
        cfg.observable = *o;
    } else if (cfg.kind != ExperimentKind::Constant &&
               cfg.kind != ExperimentKind::MixingAudit) {
      errs.add("observable", "missing section");
    } else if (!std::holds_alternative<SequentialExpandingMap>(*model)) {
      json pm1 = {{"type", "pm1"}};
      if (auto o = parse_observable(pm1, *model, errs)) cfg.observable = *o;
    }
  }

  cfg.n_list = doc.value("n_list", std::vector<std::size_t>{});
  if (sampling_kind) {
    if (cfg.n_list.empty()) errs.add("n_list", "must be nonempty");
    for (std::size_t i = 0; i + 1 < cfg.n_list.size(); ++i)
      if (cfg.n_list[i + 1] <= cfg.n_list[i]) {
        errs.add("n_list", "must be strictly increasing");
        break;
      }
    for (std::size_t n : cfg.n_list)
      if (n == 0) errs.add("n_list", "entries must be >= 1");
  }

  if (doc.contains("samples")) {
    if (!doc["samples"].is_number_integer() || doc["samples"].get<std::int64_t>() < 0)
      errs.add("samples", "must be a nonnegative integer");
    else
      cfg.samples = doc["samples"].get<std::size_t>();
  }
  if (sampling_kind && cfg.samples < 100)
    errs.add("samples", "must be >= 100");

  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer())
      errs.add("seed", "must be an integer");
    else
      cfg.seed = doc["seed"].get<std::uint64_t>();
  }

  if (doc.contains("normalizer")) {
    const auto& nr = doc["normalizer"];
    const std::string rule = nr.value("rule", "self");
    if (rule == "sqrt-n") {
      cfg.normalizer.kind = NormalizerRule::Kind::SqrtN;
    } else if (rule == "self") {
      cfg.normalizer.kind = NormalizerRule::Kind::Self;
    } else if (rule == "explicit") {
      cfg.normalizer.kind = NormalizerRule::Kind::Explicit;
      cfg.normalizer.values = nr.value("values", std::vector<double>{});
      if (cfg.normalizer.values.size() != cfg.n_list.size())
        errs.add("normalizer.values", "must align with n_list");
      for (double b : cfg.normalizer.values)
        if (!(b > 0.0)) errs.add("normalizer.values", "entries must be > 0");
    } else {
      errs.add("normalizer.rule", "unknown rule '" + rule + "' (sqrt-n | self | explicit)");
    }
  }

  if (doc.contains("selection")) {
    const auto& sr = doc["selection"];
    const std::string rule = sr.value("rule", "auto");
    if (rule == "auto") {
      cfg.selection.kind = SelectionRule::Kind::Auto;
      cfg.selection.T_max = sr.value("T_max", 1e6);
      if (cfg.selection.T_max < 1.0) errs.add("selection.T_max", "must be >= 1");
    } else if (rule == "explicit") {
      cfg.selection.kind = SelectionRule::Kind::Explicit;
      cfg.selection.T = sr.value("T", 0.0);
      if (cfg.selection.T < 1.0) errs.add("selection.T", "must be >= 1");
      cfg.selection.rho = sr.value("rho", std::size_t{0});
      if (cfg.selection.rho == 0) errs.add("selection.rho", "must be >= 1");
    } else {
      errs.add("selection.rule", "unknown rule '" + rule + "' (auto | explicit)");
    }
  }

  if (doc.contains("exponents")) {
    const auto& ex = doc["exponents"];
    cfg.exponents.p1 = parse_exponent(ex.value("p1", json(3.0)), "exponents.p1", errs);
    cfg.exponents.p2 = parse_exponent(ex.value("p2", json(3.0)), "exponents.p2", errs);
    cfg.exponents.p3 = parse_exponent(ex.value("p3", json(3.0)), "exponents.p3", errs);
    try {
      cfg.exponents.validate();
    } catch (const std::exception& e) {
      errs.add("exponents", e.what());
    }
  }

  if (doc.contains("wip")) {
    const auto& w = doc["wip"];
    cfg.wip.grid_points = w.value("grid_points", cfg.wip.grid_points);
    if (cfg.wip.grid_points < 4) errs.add("wip.grid_points", "must be >= 4");
    cfg.wip.eps = w.value("eps", cfg.wip.eps);
    if (!(cfg.wip.eps > 0.0)) errs.add("wip.eps", "must be > 0");
    cfg.wip.delta = w.value("delta", cfg.wip.delta);
    if (!(cfg.wip.delta > 0.0 && cfg.wip.delta < 1.0))
      errs.add("wip.delta", "must lie in (0, 1)");
    cfg.wip.fdd_times = w.value("fdd_times", cfg.wip.fdd_times);
    for (double t : cfg.wip.fdd_times)
      if (!(t > 0.0 && t <= 1.0)) errs.add("wip.fdd_times", "times must lie in (0, 1]");
    cfg.wip.tightness_samples = w.value("tightness_samples", cfg.wip.tightness_samples);
    if (cfg.wip.tightness_samples < 100)
      errs.add("wip.tightness_samples", "must be >= 100");
    cfg.wip.c_grid = w.value("c_grid", cfg.wip.c_grid);
    for (double c : cfg.wip.c_grid)
      if (!(c > 0.0)) errs.add("wip.c_grid", "entries must be > 0");
  }

  if (doc.contains("mixing_audit")) {
    const auto& a = doc["mixing_audit"];
    cfg.audit.p = a.contains("p") ? parse_exponent(a["p"], "mixing_audit.p", errs) : cfg.audit.p;
    cfg.audit.k_max = a.value("k_max", cfg.audit.k_max);
    cfg.audit.depth = a.value("depth", cfg.audit.depth);
    cfg.audit.n_max = a.value("n_max", cfg.audit.n_max);
    if (cfg.audit.n_max == 0) errs.add("mixing_audit.n_max", "must be >= 1");
    cfg.audit.envelope_t = a.value("envelope_t", cfg.audit.envelope_t);
    cfg.audit.envelope_n = a.value("envelope_n", cfg.audit.envelope_n);
  }

  cfg.output_dir = doc.value("output_dir", cfg.output_dir);
  cfg.workers = doc.value("workers", cfg.workers);
  cfg.memory_limit_mb = doc.value("memory_limit_mb", cfg.memory_limit_mb);

  cfg.echo = doc.dump();
  if (out.errors.empty()) out.config = std::move(cfg);
  return out;
}
}  // namespace

ConfigValidation validate_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    ConfigValidation out;
    out.errors.push_back("parse error at byte " + std::to_string(e.byte) + ": " +
                         e.what());
    return out;
  }
  return validate_config_json(doc);
}

ConfigValidation validate_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    ConfigValidation out;
    out.errors.push_back("cannot read config file: " + path);
    return out;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return validate_config_text(ss.str());
}

}  // namespace eagleson
