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
#include "eagleson/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "eagleson/esseen.hpp"
#include "eagleson/parallel.hpp"
#include "eagleson/quadrature.hpp"
#include "eagleson/spectral.hpp"
#include "eagleson/wip.hpp"

namespace eagleson {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, p);
}

namespace {

json json_number(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

std::string join_csv(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  return line;
}

void check_memory(const ExperimentConfig& cfg, std::size_t estimated_bytes) {
  const std::size_t limit = cfg.memory_limit_mb * std::size_t{1000000};
  if (estimated_bytes > limit)
    throw ResourceError("estimated working set " +
                        std::to_string(estimated_bytes / 1000000) +
                        " MB exceeds limit " + std::to_string(cfg.memory_limit_mb) +
                        " MB");
}

double normalizer_value(const ExperimentConfig& cfg, std::size_t n_index,
                        std::size_t n, const PartialSumSample& mu_sample) {
  switch (cfg.normalizer.kind) {
    case NormalizerRule::Kind::SqrtN:
      return std::sqrt(static_cast<double>(n));
    case NormalizerRule::Kind::Explicit:
      return cfg.normalizer.values[n_index];
    case NormalizerRule::Kind::Self:
      return sample_std(mu_sample);
  }
  return 1.0;
}

std::vector<double> sorted_normalized(const PartialSumSample& sample, double b) {
  std::vector<double> out(sample.count);
  for (std::size_t i = 0; i < sample.count; ++i) out[i] = sample.at(i) / b;
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t auto_rho(std::size_t n) {
  const double l = std::ceil(std::log2(static_cast<double>(n)));
  return std::min(2 * static_cast<std::size_t>(l), n - 1);
}

/// ||r + 1||_{s1}: exact sum for chains, quadrature for maps.
double norm_r_plus_one(const DensityTilt& tilt, const ProcessModel& model,
                       double s1) {
  if (std::holds_alternative<InhomogeneousMarkovChain>(model)) {
    const auto& chain = std::get<InhomogeneousMarkovChain>(model);
    if (std::isinf(s1)) {
      double m = 0.0;
      for (std::size_t s = 0; s < chain.state_count(); ++s)
        if (chain.initial()[s] > 0.0)
          m = std::max(m, tilt(static_cast<double>(s)) + 1.0);
      return m;
    }
    double acc = 0.0;
    for (std::size_t s = 0; s < chain.state_count(); ++s)
      acc += chain.initial()[s] * std::pow(tilt(static_cast<double>(s)) + 1.0, s1);
    return std::pow(acc, 1.0 / s1);
  }
  if (std::isinf(s1)) return tilt.sup_bound + 1.0;
  const double acc =
      integrate([&](double x) { return std::pow(tilt(x) + 1.0, s1); }, 0.0, 1.0, 1e-11)
          .value;
  return std::pow(acc, 1.0 / s1);
}

bool map_observable_centered(const ObservableSequence& obs) {
  using Kind = ObservableSequence::Kind;
  return obs.kind() == Kind::MapCos2Pi || obs.kind() == Kind::MapSin2Pi ||
         obs.kind() == Kind::MapCenteredX;
}

/// Bound on ||G_j G_k||_{s2} via sup norms; for the built-in map observables
/// the mu-means vanish (X_j stays Lebesgue), otherwise the centering doubles
/// the sup.
std::function<double(std::size_t, std::size_t)> pair_norm_bound(
    const ProcessModel& model, const ObservableSequence& obs) {
  const double factor =
      std::holds_alternative<SequentialExpandingMap>(model) &&
              map_observable_centered(obs)
          ? 1.0
          : 2.0;
  return [factor, &obs](std::size_t k, std::size_t j) {
    return factor * factor * obs.sup_norm(k) * obs.sup_norm(j);
  };
}

std::vector<double> default_freq_grid_vec(std::size_t dm) {
  std::vector<double> flat;
  for (double scale : {0.7, 1.4}) {
    std::vector<std::vector<double>> patterns;
    patterns.push_back(std::vector<double>(dm, scale));
    std::vector<double> alt(dm);
    for (std::size_t i = 0; i < dm; ++i) alt[i] = (i % 2 ? -scale : scale);
    patterns.push_back(alt);
    std::vector<double> first(dm, 0.0), last(dm, 0.0);
    first.front() = scale;
    last.back() = scale;
    patterns.push_back(first);
    patterns.push_back(last);
    for (auto& p : patterns)
      for (double v : p) flat.push_back(v);
  }
  return flat;
}

std::vector<std::vector<double>> default_freq_grid(std::size_t dm) {
  const auto flat = default_freq_grid_vec(dm);
  std::vector<std::vector<double>> grid;
  for (std::size_t i = 0; i + dm <= flat.size(); i += dm)
    grid.emplace_back(flat.begin() + i, flat.begin() + i + dm);
  // drop exact duplicates (patterns collapse for m = 1)
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

struct PipelineContext {
  const ExperimentConfig& cfg;
  RunReport& report;
  const Logger& log;

  void emit(const std::string& line) const {
    if (log) log(line);
  }
  void check(bool ok, const std::string& message) const {
    if (!ok) report.checks_passed = false;
    report.check_messages.push_back((ok ? "[ok] " : "[FAIL] ") + message);
  }
};

void run_constant(PipelineContext& ctx) {
  const auto c = esseen_constant();
  ctx.report.csv_header = "c,residual";
  ctx.report.csv_rows.push_back(format_double(c.c) + "," + format_double(c.residual));
  json row = {{"c", c.c}, {"residual", c.residual}};
  ctx.report.jsonl_rows.push_back(row.dump());
  ctx.emit("constant: c = " + format_double(c.c) +
           ", residual = " + format_double(c.residual));
  ctx.check(c.residual <= 1e-10, "esseen constant residual <= 1e-10");
}

void run_eagleson_convergence(PipelineContext& ctx) {
  const auto& cfg = ctx.cfg;
  const auto cuts = cfg.n_list;
  check_memory(cfg, 2 * cfg.samples * cuts.size() * 8 + 2 * cfg.samples * 8);

  const auto run_mu = sample_prefix_sums(cfg.model, cfg.observable, nullptr,
                                         MeasureTag::Mu, cfg.samples, cuts,
                                         cfg.seed, cfg.workers);
  const auto run_nu = sample_prefix_sums(cfg.model, cfg.observable, &cfg.tilt,
                                         MeasureTag::Nu, cfg.samples, cuts,
                                         cfg.seed, cfg.workers);

  ctx.report.csv_header = "n,samples,b_n,dk_two_sample,mean_mu,mean_nu,sd_mu,sd_nu";
  for (std::size_t idx = 0; idx < cuts.size(); ++idx) {
    const auto mu = run_mu.extract(idx);
    const auto nu = run_nu.extract(idx);
    const double b = normalizer_value(cfg, idx, cuts[idx], mu);
    const auto mu_norm = sorted_normalized(mu, b);
    const auto nu_norm = sorted_normalized(nu, b);
    const double dk = kolmogorov_two_sample(mu_norm, nu_norm);
    const std::vector<std::string> cells = {
        std::to_string(cuts[idx]),        std::to_string(cfg.samples),
        format_double(b),                 format_double(dk),
        format_double(sample_mean(mu)),   format_double(sample_mean(nu)),
        format_double(sample_std(mu)),    format_double(sample_std(nu))};
    ctx.report.csv_rows.push_back(join_csv(cells));
    json row = {{"n", cuts[idx]},        {"samples", cfg.samples},
                {"b_n", b},              {"dk_two_sample", dk},
                {"mean_mu", sample_mean(mu)}, {"mean_nu", sample_mean(nu)},
                {"sd_mu", sample_std(mu)},    {"sd_nu", sample_std(nu)}};
    ctx.report.jsonl_rows.push_back(row.dump());
    ctx.emit("n = " + std::to_string(cuts[idx]) + ": d_K(mu, nu) = " + format_double(dk));
  }
}

void run_quant_bound(PipelineContext& ctx) {
  const auto& cfg = ctx.cfg;
  std::vector<std::size_t> rho_of(cfg.n_list.size());
  for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
    rho_of[i] = cfg.selection.kind == SelectionRule::Kind::Auto
                    ? auto_rho(cfg.n_list[i])
                    : cfg.selection.rho;
    if (rho_of[i] >= cfg.n_list[i])
      throw ConfigError("selection.rho must satisfy rho < n for every n");
  }
  std::vector<std::size_t> cuts = cfg.n_list;
  cuts.insert(cuts.end(), rho_of.begin(), rho_of.end());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  check_memory(cfg, 2 * cfg.samples * cuts.size() * 8 + 2 * cfg.samples * 8);

  const std::size_t delta_up_to =
      *std::max_element(rho_of.begin(), rho_of.end());
  const auto delta = model_delta_profile(cfg.model, cfg.tilt, delta_up_to);
  const auto law = ReferenceLaw::standard_normal();
  const auto c = esseen_constant();

  const auto run_mu = sample_prefix_sums(cfg.model, cfg.observable, nullptr,
                                         MeasureTag::Mu, cfg.samples, cuts,
                                         cfg.seed, cfg.workers);
  const auto run_nu = sample_prefix_sums(cfg.model, cfg.observable, &cfg.tilt,
                                         MeasureTag::Nu, cfg.samples, cuts,
                                         cfg.seed, cfg.workers);
  auto cut_index = [&](std::size_t n) {
    return static_cast<std::size_t>(
        std::lower_bound(cuts.begin(), cuts.end(), n) - cuts.begin());
  };

  ctx.report.csv_header =
      "n,samples,b_n,T,rho,delta_rho,i_rho,i_rho_se,dk_mu,dk_nu,term_main,"
      "term_translation,term_mixing,term_smoothing,bound_total,bound_se,slack";
  const double nn = static_cast<double>(cfg.samples);
  const double dk_se = 0.5 / std::sqrt(nn);

  for (std::size_t idx = 0; idx < cfg.n_list.size(); ++idx) {
    const std::size_t n = cfg.n_list[idx];
    const std::size_t rho = rho_of[idx];
    const auto mu = run_mu.extract(cut_index(n));
    const auto nu = run_nu.extract(cut_index(n));
    const double b = normalizer_value(cfg, idx, n, mu);

    const double dk_mu = kolmogorov_to_cdf(sorted_normalized(mu, b), law);
    const double dk_nu = kolmogorov_to_cdf(sorted_normalized(nu, b), law);

    // I(rho) = int |S_rho| (2 + r) dmu, Monte Carlo on the mu run
    const std::size_t rho_idx = cut_index(rho);
    double acc = 0.0, accsq = 0.0;
    for (std::size_t i = 0; i < run_mu.count; ++i) {
      const double v = std::abs(run_mu.sum_at(i, rho_idx)) *
                       (2.0 + cfg.tilt(run_mu.initial[i]));
      acc += v;
      accsq += v * v;
    }
    const double i_rho = acc / nn;
    const double i_rho_se =
        std::sqrt(std::max(0.0, accsq / nn - i_rho * i_rho) / nn);

    double T;
    if (cfg.selection.kind == SelectionRule::Kind::Auto) {
      T = select_T(2.0 * i_rho / b, 2.0 * law.density_sup * c.c * c.c,
                   cfg.selection.T_max)
              .T;
    } else {
      T = cfg.selection.T;
    }
    const auto bound = quant_eagleson_bound(dk_mu, i_rho, delta.value(rho),
                                            cfg.tilt.norm_value, b, T, law, c,
                                            i_rho_se, rho);
    const double main_se = (4.0 * c.c + 1.0) * dk_se;
    const double combined_se =
        std::sqrt(bound.total_se * bound.total_se + main_se * main_se + dk_se * dk_se);
    const double slack = bound.total - dk_nu;
    ctx.check(dk_nu <= bound.total + 3.0 * combined_se,
              "n = " + std::to_string(n) + ": measured d_K under nu within the bound");

    const std::vector<std::string> cells = {
        std::to_string(n),
        std::to_string(cfg.samples),
        format_double(b),
        format_double(T),
        std::to_string(rho),
        format_double(bound.delta_rho),
        format_double(i_rho),
        format_double(i_rho_se),
        format_double(dk_mu),
        format_double(dk_nu),
        format_double(bound.main),
        format_double(bound.translation),
        format_double(bound.mixing),
        format_double(bound.smoothing),
        format_double(bound.total),
        format_double(combined_se),
        format_double(slack)};
    ctx.report.csv_rows.push_back(join_csv(cells));
    json row = {{"n", n},
                {"samples", cfg.samples},
                {"b_n", b},
                {"T", T},
                {"rho", rho},
                {"delta_rho", bound.delta_rho},
                {"i_rho", i_rho},
                {"i_rho_se", i_rho_se},
                {"dk_mu", dk_mu},
                {"dk_nu", dk_nu},
                {"terms",
                 {{"main", bound.main},
                  {"translation", bound.translation},
                  {"mixing", bound.mixing},
                  {"smoothing", bound.smoothing}}},
                {"bound_total", bound.total},
                {"bound_se", combined_se},
                {"slack", slack}};
    ctx.report.jsonl_rows.push_back(row.dump());
    ctx.emit("n = " + std::to_string(n) + ": d_K(nu) = " + format_double(dk_nu) +
             " <= bound " + format_double(bound.total));
  }
}

void run_centering(PipelineContext& ctx) {
  const auto& cfg = ctx.cfg;
  const auto cuts = cfg.n_list;
  check_memory(cfg, 2 * cfg.samples * cuts.size() * 8 + 2 * cfg.samples * 8);
  const std::size_t n_max = cuts.back();
  const auto delta = model_delta_profile(cfg.model, cfg.tilt, n_max);

  const auto run_mu = sample_prefix_sums(cfg.model, cfg.observable, nullptr,
                                         MeasureTag::Mu, cfg.samples, cuts,
                                         cfg.seed, cfg.workers);
  const auto run_nu = sample_prefix_sums(cfg.model, cfg.observable, &cfg.tilt,
                                         MeasureTag::Nu, cfg.samples, cuts,
                                         cfg.seed, cfg.workers);

  const bool chain_model =
      std::holds_alternative<InhomogeneousMarkovChain>(cfg.model);
  std::vector<double> moment_norms(n_max);
  if (chain_model) {
    moment_norms = chain_moment_norms(std::get<InhomogeneousMarkovChain>(cfg.model),
                                      cfg.observable, cfg.exponents.p2, n_max);
  } else {
    // X_j stays Lebesgue at every j, so ||g(X_j)||_{p2} is j-independent and
    // exact by quadrature (the map observables here do not depend on j)
    const double p2 = cfg.exponents.p2;
    double norm;
    if (std::isinf(p2)) {
      norm = cfg.observable.sup_norm(0);
    } else {
      const auto q = integrate(
          [&](double x) {
            return std::pow(std::abs(cfg.observable.eval1(0, x)), p2);
          },
          0.0, 1.0, 1e-11);
      norm = std::pow(q.value, 1.0 / p2);
    }
    std::fill(moment_norms.begin(), moment_norms.end(), norm);
  }

  ctx.report.csv_header = "n,samples,gap,gap_se,bound_simple,mn_total,mn_over_scale";
  double prev_gap = 0.0, prev_se = 0.0;
  for (std::size_t idx = 0; idx < cuts.size(); ++idx) {
    const std::size_t n = cuts[idx];
    const auto mu = run_mu.extract(idx);
    const auto nu = run_nu.extract(idx);
    const auto gap = empirical_gap(mu, nu);
    const double b = normalizer_value(cfg, idx, n, mu);

    double bound_simple = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      bound_simple += delta.value(j) * cfg.observable.sup_norm(j);
    bound_simple *= cfg.tilt.norm_value;

    const auto cert = centering_gap_certificate(delta, moment_norms, cfg.exponents,
                                                n, LevelRule::optimized(), b,
                                                /*keep_terms=*/n <= 512);
    ctx.check(gap.mean_gap <= bound_simple + 3.0 * gap.mean_gap_se,
              "n = " + std::to_string(n) + ": centering gap below the certificate");
    if (idx > 0) {
      const double se =
          std::sqrt(gap.mean_gap_se * gap.mean_gap_se + prev_se * prev_se);
      ctx.check(gap.mean_gap <= prev_gap + 3.0 * se,
                "n = " + std::to_string(n) + ": gap bounded in n (no growth beyond noise)");
    }
    prev_gap = gap.mean_gap;
    prev_se = gap.mean_gap_se;

    const std::vector<std::string> cells = {
        std::to_string(n),          std::to_string(cfg.samples),
        format_double(gap.mean_gap), format_double(gap.mean_gap_se),
        format_double(bound_simple), format_double(cert.total),
        format_double(cert.total / b)};
    ctx.report.csv_rows.push_back(join_csv(cells));
    json row = {{"n", n},
                {"samples", cfg.samples},
                {"gap", gap.mean_gap},
                {"gap_se", gap.mean_gap_se},
                {"bound_simple", bound_simple},
                {"mn_total", cert.total},
                {"mn_truncation", cert.truncation_total},
                {"mn_tail", cert.tail_total},
                {"mn_over_scale", cert.total / b},
                {"exponents", {cfg.exponents.p1, cfg.exponents.p2, cfg.exponents.p3}}};
    ctx.report.jsonl_rows.push_back(row.dump());
    ctx.emit("n = " + std::to_string(n) + ": gap = " + format_double(gap.mean_gap) +
             " <= " + format_double(bound_simple));
  }
}

void run_variance(PipelineContext& ctx) {
  const auto& cfg = ctx.cfg;
  const auto cuts = cfg.n_list;
  check_memory(cfg, 2 * cfg.samples * cuts.size() * 8 + 2 * cfg.samples * 8);
  const std::size_t n_max = cuts.back();
  const auto delta = model_delta_profile(cfg.model, cfg.tilt, n_max);
  const auto pair_norms = pair_norm_bound(cfg.model, cfg.observable);
  const double r_plus_one = norm_r_plus_one(cfg.tilt, cfg.model, cfg.exponents.p1);

  const auto run_mu = sample_prefix_sums(cfg.model, cfg.observable, nullptr,
                                         MeasureTag::Mu, cfg.samples, cuts,
                                         cfg.seed, cfg.workers);
  const auto run_nu = sample_prefix_sums(cfg.model, cfg.observable, &cfg.tilt,
                                         MeasureTag::Nu, cfg.samples, cuts,
                                         cfg.seed, cfg.workers);

  ctx.report.csv_header = "n,samples,b_mu,b_nu,ratio,ratio_se,vn_total,vn_over_scale";
  for (std::size_t idx = 0; idx < cuts.size(); ++idx) {
    const std::size_t n = cuts[idx];
    const auto mu = run_mu.extract(idx);
    const auto nu = run_nu.extract(idx);
    const auto gap = empirical_gap(mu, nu);

    const auto cert = variance_gap_certificate(
        delta, pair_norms, cfg.exponents, cfg.tilt.norm_value, r_plus_one, n,
        LevelRule::optimized(), gap.b_mu * gap.b_mu, /*keep_terms=*/n <= 64);

    if (!gap.degenerate) {
      ctx.check(std::abs(gap.std_ratio - 1.0) <= 0.05,
                "n = " + std::to_string(n) + ": |b_nu/b_mu - 1| <= 0.05");
      const double var_mu = gap.b_mu * gap.b_mu, var_nu = gap.b_nu * gap.b_nu;
      const double se_var = std::sqrt(2.0 / (static_cast<double>(cfg.samples) - 1.0)) *
                            std::sqrt(var_mu * var_mu + var_nu * var_nu);
      ctx.check(std::abs(var_nu - var_mu) <=
                    2.0 * cert.total + gap.mean_gap * gap.mean_gap + 3.0 * se_var,
                "n = " + std::to_string(n) + ": variance gap within 2 V_n");
    } else {
      ctx.check(false, "n = " + std::to_string(n) + ": degenerate variance");
    }

    const std::vector<std::string> cells = {
        std::to_string(n),        std::to_string(cfg.samples),
        format_double(gap.b_mu),  format_double(gap.b_nu),
        format_double(gap.std_ratio), format_double(gap.std_ratio_se),
        format_double(cert.total),
        format_double(cert.total / (gap.b_mu * gap.b_mu))};
    ctx.report.csv_rows.push_back(join_csv(cells));
    json row = {{"n", n},
                {"samples", cfg.samples},
                {"b_mu", gap.b_mu},
                {"b_nu", gap.b_nu},
                {"ratio", json_number(gap.std_ratio)},
                {"ratio_se", json_number(gap.std_ratio_se)},
                {"vn_total", cert.total},
                {"vn_truncation", cert.truncation_total},
                {"vn_tail", cert.tail_total},
                {"degenerate", gap.degenerate}};
    ctx.report.jsonl_rows.push_back(row.dump());
    ctx.emit("n = " + std::to_string(n) + ": ratio = " + format_double(gap.std_ratio));
  }
}

void run_wip(PipelineContext& ctx) {
  const auto& cfg = ctx.cfg;
  const std::size_t gp = cfg.wip.grid_points;
  std::vector<double> grid(gp);
  for (std::size_t i = 0; i < gp; ++i)
    grid[i] = static_cast<double>(i) / static_cast<double>(gp - 1);

  std::vector<double> fdd_grid_times = {0.0};
  for (double t : cfg.wip.fdd_times) fdd_grid_times.push_back(t);
  std::sort(fdd_grid_times.begin(), fdd_grid_times.end());
  fdd_grid_times.erase(
      std::unique(fdd_grid_times.begin(), fdd_grid_times.end()),
      fdd_grid_times.end());

  std::vector<double> c_grid = cfg.wip.c_grid;
  if (c_grid.empty()) {
    const double sup = cfg.tilt.sup_bound;
    c_grid = {0.5 * sup, 0.75 * sup, sup, 1.25 * sup, 1.5 * sup, 2.0 * sup};
  }

  check_memory(cfg, 2 * cfg.samples * (fdd_grid_times.size() + 1) * 8 +
                        2 * cfg.wip.tightness_samples * gp * 8 +
                        2 * cfg.samples * 8);

  ctx.report.csv_header =
      "n,samples,fdd_max_diff,fdd_radius,exc_mu,exc_mu_se,exc_nu,exc_nu_se,eta,"
      "c_opt,bound";
  for (std::size_t idx = 0; idx < cfg.n_list.size(); ++idx) {
    const std::size_t n = cfg.n_list[idx];
    // finite-dimensional comparison at full sample size
    auto fdd_cuts = path_cut_indices(n, fdd_grid_times);
    if (fdd_cuts.back() < n) fdd_cuts.push_back(n);
    const auto run_mu = sample_prefix_sums(cfg.model, cfg.observable, nullptr,
                                           MeasureTag::Mu, cfg.samples, fdd_cuts,
                                           cfg.seed, cfg.workers);
    const auto run_nu = sample_prefix_sums(cfg.model, cfg.observable, &cfg.tilt,
                                           MeasureTag::Nu, cfg.samples, fdd_cuts,
                                           cfg.seed, cfg.workers);
    const std::size_t n_cut = static_cast<std::size_t>(
        std::lower_bound(fdd_cuts.begin(), fdd_cuts.end(), n) - fdd_cuts.begin());
    const auto mu_sums = run_mu.extract(n_cut);
    const double b = normalizer_value(cfg, idx, n, mu_sums);

    const auto paths_mu = path_from_prefix(run_mu, n, b, fdd_grid_times);
    const auto paths_nu = path_from_prefix(run_nu, n, b, fdd_grid_times);
    const auto freq_grid =
        default_freq_grid(cfg.wip.fdd_times.size() *
                          static_cast<std::size_t>(cfg.observable.dimension()));
    const auto fdd = fdd_distance(paths_mu, paths_nu, cfg.wip.fdd_times, freq_grid);

    // tightness at the (smaller) diagnostic sample size on the full grid
    const auto tcuts = path_cut_indices(n, grid);
    const auto trun_mu = sample_prefix_sums(cfg.model, cfg.observable, nullptr,
                                            MeasureTag::Mu,
                                            cfg.wip.tightness_samples, tcuts,
                                            cfg.seed, cfg.workers);
    const auto trun_nu = sample_prefix_sums(cfg.model, cfg.observable, &cfg.tilt,
                                            MeasureTag::Nu,
                                            cfg.wip.tightness_samples, tcuts,
                                            cfg.seed, cfg.workers);
    const auto tpaths_mu = path_from_prefix(trun_mu, n, b, grid);
    const auto tpaths_nu = path_from_prefix(trun_nu, n, b, grid);
    const auto diag_mu =
        tightness_diagnostic(tpaths_mu, cfg.wip.eps, cfg.wip.delta, cfg.workers);
    const auto diag_nu =
        tightness_diagnostic(tpaths_nu, cfg.wip.eps, cfg.wip.delta, cfg.workers);
    const auto transfer =
        nu_tightness_transfer_best(diag_mu.exceedance, cfg.tilt, cfg.model, c_grid);

    if (idx + 1 == cfg.n_list.size()) {
      // quantile fans of the finest paths, for external plotting
      const std::vector<double> levels = {0.05, 0.25, 0.5, 0.75, 0.95};
      std::ostringstream fan_mu, fan_nu;
      write_path_quantiles_csv(fan_mu, tpaths_mu, levels);
      write_path_quantiles_csv(fan_nu, tpaths_nu, levels);
      ctx.report.extra_files.emplace_back("paths_mu_quantiles.csv", fan_mu.str());
      ctx.report.extra_files.emplace_back("paths_nu_quantiles.csv", fan_nu.str());
    }

    const double combined_se = std::sqrt(
        diag_nu.std_error * diag_nu.std_error +
        transfer.C * transfer.C * diag_mu.std_error * diag_mu.std_error);
    ctx.check(diag_nu.exceedance <= transfer.bound + 3.0 * combined_se,
              "n = " + std::to_string(n) + ": nu tightness within the transfer bound");

    const std::vector<std::string> cells = {
        std::to_string(n),
        std::to_string(cfg.samples),
        format_double(fdd.max_abs_diff),
        format_double(fdd.radius),
        format_double(diag_mu.exceedance),
        format_double(diag_mu.std_error),
        format_double(diag_nu.exceedance),
        format_double(diag_nu.std_error),
        format_double(transfer.eta),
        format_double(transfer.C),
        format_double(transfer.bound)};
    ctx.report.csv_rows.push_back(join_csv(cells));
    json row = {{"n", n},
                {"samples", cfg.samples},
                {"tightness_samples", cfg.wip.tightness_samples},
                {"b_n", b},
                {"fdd_max_diff", fdd.max_abs_diff},
                {"fdd_radius", fdd.radius},
                {"fdd_times", cfg.wip.fdd_times},
                {"exc_mu", diag_mu.exceedance},
                {"exc_nu", diag_nu.exceedance},
                {"eta", transfer.eta},
                {"c_opt", transfer.C},
                {"bound", transfer.bound},
                {"eps", cfg.wip.eps},
                {"delta", cfg.wip.delta}};
    ctx.report.jsonl_rows.push_back(row.dump());
    ctx.emit("n = " + std::to_string(n) + ": fdd = " + format_double(fdd.max_abs_diff) +
             ", exc_nu = " + format_double(diag_nu.exceedance) + " <= " +
             format_double(transfer.bound));
  }
}

void run_mixing_audit(PipelineContext& ctx) {
  const auto& cfg = ctx.cfg;
  if (std::holds_alternative<InhomogeneousMarkovChain>(cfg.model)) {
    const auto& chain = std::get<InhomogeneousMarkovChain>(cfg.model);
    const std::size_t n_max = cfg.audit.n_max;

    AlphaProfile upper;
    upper.kind = AlphaProfile::Kind::UpperBound;
    upper.values.resize(n_max + 1);
    upper.values[0] = 0.25;  // overlapping sigma-algebras: the generic cap
    for (std::size_t n = 1; n <= n_max; ++n)
      upper.values[n] = alpha_upper_dobrushin(chain, n);
    const auto delta = delta_from_alpha(upper, ApproximationProfile::zero(),
                                        cfg.audit.p, n_max);

    ctx.report.csv_header = "n,alpha_lower,alpha_lower_exact,alpha_upper,delta_n";
    for (std::size_t n = 1; n <= n_max; ++n) {
      double lower = 0.0;
      bool exact = true;
      for (std::size_t k = 0; k <= cfg.audit.k_max; ++k) {
        const auto r = alpha_bruteforce(chain, k, n, cfg.audit.depth);
        lower = std::max(lower, r.value);
        exact = exact && r.exact;
      }
      ctx.check(upper.values[n] >= lower - 1e-12,
                "n = " + std::to_string(n) + ": Dobrushin bound dominates brute force");
      const std::vector<std::string> cells = {
          std::to_string(n), format_double(lower), exact ? "1" : "0",
          format_double(upper.values[n]), format_double(delta.value(n))};
      ctx.report.csv_rows.push_back(join_csv(cells));
      json row = {{"n", n},
                  {"alpha_lower", lower},
                  {"alpha_lower_exact", exact},
                  {"alpha_upper", upper.values[n]},
                  {"delta_n", delta.value(n)},
                  {"depth", cfg.audit.depth},
                  {"k_max", cfg.audit.k_max},
                  {"p", json_number(cfg.audit.p)}};
      ctx.report.jsonl_rows.push_back(row.dump());
      ctx.emit("n = " + std::to_string(n) + ": alpha in [" + format_double(lower) +
               ", " + format_double(upper.values[n]) + "]");
    }

    const auto rows = operator_norm_envelope(chain, cfg.observable,
                                             cfg.audit.envelope_t,
                                             cfg.audit.envelope_n);
    std::ostringstream env;
    write_envelope_csv(env, rows);
    ctx.report.extra_files.emplace_back("envelope.csv", env.str());
  } else {
    const auto& map = std::get<SequentialExpandingMap>(cfg.model);
    const std::size_t n_max = cfg.audit.n_max;
    const auto delta = delta_profile_expanding(map, n_max);

    // fixed bounded-variation test density for the certificate table
    PiecewiseLinear s;
    s.knots = {0.0, 0.2, 0.45, 0.7, 1.0};
    s.values = {0.4, 1.7, 0.6, 1.3, 0.8};
    const double mass = s.integral();
    for (auto& v : s.values) v /= mass;

    ctx.report.csv_header = "n,delta_n,cov_exact,cov_bound";
    for (std::size_t n = 1; n <= n_max; ++n) {
      const double cov = expanding_cov_exact(map, s, n, 1.0, true);
      const double bound = s.variation() * delta.value(n);
      ctx.check(cov <= bound + 1e-12,
                "n = " + std::to_string(n) + ": covariance within the decay bound");
      const std::vector<std::string> cells = {std::to_string(n),
                                              format_double(delta.value(n)),
                                              format_double(cov),
                                              format_double(bound)};
      ctx.report.csv_rows.push_back(join_csv(cells));
      json row = {{"n", n},
                  {"delta_n", delta.value(n)},
                  {"cov_exact", cov},
                  {"cov_bound", bound}};
      ctx.report.jsonl_rows.push_back(row.dump());
      ctx.emit("n = " + std::to_string(n) + ": cov = " + format_double(cov) +
               " <= " + format_double(bound));
    }
  }
}

}  // namespace

MixingProfile model_delta_profile(const ProcessModel& model, const DensityTilt& tilt,
                                  std::size_t up_to) {
  if (std::holds_alternative<SequentialExpandingMap>(model)) {
    if (!(tilt.norm_class == NormSpec::total_variation()))
      throw ConfigError("map decay profile pairs with the total-variation norm class");
    return delta_profile_expanding(std::get<SequentialExpandingMap>(model), up_to);
  }
  const auto& chain = std::get<InhomogeneousMarkovChain>(model);
  if (tilt.norm_class.kind != NormSpec::Kind::Lp)
    throw ConfigError("chain decay profile pairs with an L^p norm class");
  AlphaProfile upper;
  upper.kind = AlphaProfile::Kind::UpperBound;
  upper.values.resize(up_to / 2 + 1);
  upper.values[0] = 0.25;
  for (std::size_t n = 1; n < upper.values.size(); ++n)
    upper.values[n] = alpha_upper_dobrushin(chain, n);
  return delta_from_alpha(upper, ApproximationProfile::zero(), tilt.norm_class.p,
                          up_to);
}

RunReport run_experiment(const ExperimentConfig& config, const Logger& log) {
  RunReport report;
  report.kind = config.kind;
  report.config_echo = config.echo;
  report.workers = effective_workers(config.workers);

  const auto t0 = std::chrono::steady_clock::now();
  PipelineContext ctx{config, report, log};
  switch (config.kind) {
    case ExperimentKind::Constant: run_constant(ctx); break;
    case ExperimentKind::EaglesonConvergence: run_eagleson_convergence(ctx); break;
    case ExperimentKind::QuantBound: run_quant_bound(ctx); break;
    case ExperimentKind::Centering: run_centering(ctx); break;
    case ExperimentKind::Variance: run_variance(ctx); break;
    case ExperimentKind::Wip: run_wip(ctx); break;
    case ExperimentKind::MixingAudit: run_mixing_audit(ctx); break;
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

std::vector<std::string> write_report(const RunReport& report,
                                      const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::vector<std::string> written;

  const std::string base = std::string(experiment_kind_name(report.kind));
  {
    const auto path = fs::path(out_dir) / (base + ".csv");
    std::ofstream os(path, std::ios::binary);
    os << report.csv_header << '\n';
    for (const auto& row : report.csv_rows) os << row << '\n';
    written.push_back(path.string());
  }
  {
    const auto path = fs::path(out_dir) / (base + ".jsonl");
    std::ofstream os(path, std::ios::binary);
    for (const auto& row : report.jsonl_rows) os << row << '\n';
    written.push_back(path.string());
  }
  for (const auto& [name, content] : report.extra_files) {
    const auto path = fs::path(out_dir) / name;
    std::ofstream os(path, std::ios::binary);
    os << content;
    written.push_back(path.string());
  }
  return written;
}

}  // namespace eagleson
