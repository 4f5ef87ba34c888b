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
#include "eagleson/wip.hpp"

#include <algorithm>
#include <charconv>
#include <complex>
#include <cstdio>
#include <cmath>
#include <stdexcept>

#include "eagleson/parallel.hpp"
#include "eagleson/quadrature.hpp"

namespace eagleson {

namespace {

void check_grid(const std::vector<double>& grid) {
  if (grid.empty() || grid.front() != 0.0)
    throw std::invalid_argument("path grid must start at t = 0");
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    if (grid[i + 1] <= grid[i])
      throw std::invalid_argument("path grid must be strictly increasing");
}

std::size_t floor_index(std::size_t n, double t) {
  return static_cast<std::size_t>(std::floor(static_cast<double>(n) * t));
}

}  // namespace

std::vector<std::size_t> path_cut_indices(std::size_t n,
                                          const std::vector<double>& grid) {
  check_grid(grid);
  std::vector<std::size_t> cuts;
  cuts.reserve(grid.size());
  for (double t : grid) cuts.push_back(floor_index(n, t));
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

PathBatch path_process(const TrajectoryBatch& batch, const ObservableSequence& obs,
                       std::size_t n, double b_n, const std::vector<double>& grid,
                       unsigned workers) {
  check_grid(grid);
  if (!(b_n > 0.0)) throw std::invalid_argument("path_process: b_n must be > 0");
  const std::size_t max_idx = floor_index(n, grid.back());
  if (max_idx > batch.length)
    throw std::out_of_range("path_process: grid time exceeds available length");

  const int d = obs.dimension();
  PathBatch out;
  out.grid = grid;
  out.n = n;
  out.b_n = b_n;
  out.measure = batch.measure;
  out.count = batch.count;
  out.dimension = d;
  out.values.resize(batch.count * grid.size() * d);

  std::vector<std::size_t> idx(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) idx[g] = floor_index(n, grid[g]);

  parallel_for_blocks(batch.count, workers, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> acc(d), gval(d);
    for (std::size_t i = lo; i < hi; ++i) {
      std::fill(acc.begin(), acc.end(), 0.0);
      std::size_t g = 0;
      for (std::size_t j = 0; j <= max_idx; ++j) {
        while (g < grid.size() && idx[g] == j) {
          for (int c = 0; c < d; ++c)
            out.values[(i * grid.size() + g) * d + c] = acc[c] / b_n;
          ++g;
        }
        if (j == max_idx) break;
        obs.eval(j, batch.at(i, j), gval.data());
        for (int c = 0; c < d; ++c) acc[c] += gval[c];
      }
    }
  });
  return out;
}

PathBatch path_from_prefix(const PrefixSumBatch& prefix, std::size_t n, double b_n,
                           const std::vector<double>& grid) {
  check_grid(grid);
  if (!(b_n > 0.0)) throw std::invalid_argument("path_from_prefix: b_n must be > 0");
  const int d = prefix.dimension;
  PathBatch out;
  out.grid = grid;
  out.n = n;
  out.b_n = b_n;
  out.measure = prefix.measure;
  out.count = prefix.count;
  out.dimension = d;
  out.values.resize(prefix.count * grid.size() * d);

  std::vector<std::size_t> cut_of_grid(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const std::size_t want = floor_index(n, grid[g]);
    const auto it = std::lower_bound(prefix.cuts.begin(), prefix.cuts.end(), want);
    if (it == prefix.cuts.end() || *it != want)
      throw std::invalid_argument("path_from_prefix: cut [n t] missing from the run");
    cut_of_grid[g] = static_cast<std::size_t>(it - prefix.cuts.begin());
  }
  for (std::size_t i = 0; i < prefix.count; ++i)
    for (std::size_t g = 0; g < grid.size(); ++g)
      for (int c = 0; c < d; ++c)
        out.values[(i * grid.size() + g) * d + c] =
            prefix.sum_at(i, cut_of_grid[g], c) / b_n;
  return out;
}

FddDistanceResult fdd_distance(const PathBatch& paths_mu, const PathBatch& paths_nu,
                               const std::vector<double>& times,
                               const std::vector<std::vector<double>>& freq_grid) {
  if (paths_mu.n != paths_nu.n || paths_mu.b_n != paths_nu.b_n ||
      paths_mu.dimension != paths_nu.dimension)
    throw std::invalid_argument("fdd_distance: mismatched path batches");
  if (times.empty()) throw std::invalid_argument("fdd_distance: no times");
  const int d = paths_mu.dimension;
  const std::size_t m = times.size();

  auto grid_index = [](const PathBatch& p, double t) {
    const auto it = std::lower_bound(p.grid.begin(), p.grid.end(), t);
    if (it == p.grid.end() || std::abs(*it - t) > 1e-12)
      throw std::invalid_argument("fdd_distance: time not on the path grid");
    return static_cast<std::size_t>(it - p.grid.begin());
  };
  std::vector<std::size_t> gi_mu(m), gi_nu(m);
  for (std::size_t s = 0; s < m; ++s) {
    gi_mu[s] = grid_index(paths_mu, times[s]);
    gi_nu[s] = grid_index(paths_nu, times[s]);
  }

  auto cf = [&](const PathBatch& p, const std::vector<std::size_t>& gi,
                const std::vector<double>& freq) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < p.count; ++i) {
      double phase = 0.0;
      for (std::size_t s = 0; s < m; ++s)
        for (int c = 0; c < d; ++c)
          phase += freq[s * d + c] * p.at(i, gi[s], c);
      re += std::cos(phase);
      im += std::sin(phase);
    }
    const double nn = static_cast<double>(p.count);
    return std::complex<double>(re / nn, im / nn);
  };

  FddDistanceResult out;
  out.per_frequency.reserve(freq_grid.size());
  for (const auto& freq : freq_grid) {
    if (freq.size() != m * static_cast<std::size_t>(d))
      throw std::invalid_argument("fdd_distance: frequency dimension mismatch");
    const double diff =
        std::abs(cf(paths_mu, gi_mu, freq) - cf(paths_nu, gi_nu, freq));
    out.per_frequency.push_back(diff);
    out.max_abs_diff = std::max(out.max_abs_diff, diff);
  }
  out.radius = 8.0 / std::sqrt(static_cast<double>(
                   std::min(paths_mu.count, paths_nu.count)));
  return out;
}

double cadlag_modulus(std::span<const double> times, std::span<const double> values,
                      double delta) {
  const std::size_t g = times.size();
  if (g != values.size() || g < 2)
    throw std::invalid_argument("cadlag_modulus: bad inputs");
  // f[j] = best achievable max-oscillation over partitions of [t_0, t_j]
  // whose intervals all have length > delta; intervals are [t_i, t_j), the
  // final one closed so the endpoint value participates.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> f(g, kInf);
  f[0] = 0.0;
  for (std::size_t j = 1; j < g; ++j) {
    const bool last = j == g - 1;
    for (std::size_t i_plus = j; i_plus > 0; --i_plus) {
      const std::size_t i = i_plus - 1;
      if (!(times[j] - times[i] > delta)) continue;
      if (f[i] == kInf) continue;
      double lo = values[i], hi = values[i];
      const std::size_t end = last ? j : j - 1;
      for (std::size_t p = i; p <= end; ++p) {
        lo = std::min(lo, values[p]);
        hi = std::max(hi, values[p]);
      }
      f[j] = std::min(f[j], std::max(f[i], hi - lo));
    }
  }
  if (f[g - 1] == kInf) {
    // no delta-sparse partition exists (t_max <= delta): single interval
    double lo = values[0], hi = values[0];
    for (double v : values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return hi - lo;
  }
  return f[g - 1];
}

TightnessDiagnostic tightness_diagnostic(const PathBatch& paths, double eps,
                                         double delta, unsigned workers) {
  if (!(eps > 0.0)) throw std::invalid_argument("tightness_diagnostic: eps must be > 0");
  if (!(delta > 0.0) || delta >= paths.grid.back())
    throw std::invalid_argument("tightness_diagnostic: need 0 < delta < t_max");
  if (paths.dimension != 1)
    throw std::invalid_argument("tightness_diagnostic: scalar paths only");

  // resolution guard: at least 3 grid points per delta window
  const auto& grid = paths.grid;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::size_t count = 0;
    for (std::size_t j = i; j < grid.size() && grid[j] < grid[i] + delta; ++j) ++count;
    if (grid[i] + delta <= grid.back() && count < 3)
      throw std::invalid_argument(
          "tightness_diagnostic: fewer than 3 grid points per delta window");
  }

  TightnessDiagnostic out;
  out.moduli.resize(paths.count);
  parallel_for_blocks(paths.count, workers, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> row(grid.size());
    for (std::size_t i = lo; i < hi; ++i) {
      for (std::size_t gidx = 0; gidx < grid.size(); ++gidx)
        row[gidx] = paths.at(i, gidx);
      out.moduli[i] = cadlag_modulus(grid, row, delta);
    }
  });
  std::size_t hits = 0;
  for (double w : out.moduli)
    if (w >= eps) ++hits;
  const double nn = static_cast<double>(paths.count);
  out.exceedance = static_cast<double>(hits) / nn;
  out.std_error = std::sqrt(out.exceedance * (1.0 - out.exceedance) / nn);
  return out;
}

TightnessTransfer nu_tightness_transfer(double exceedance_mu, const DensityTilt& tilt,
                                        const ProcessModel& model, double C) {
  if (!(C > 0.0)) throw std::invalid_argument("nu_tightness_transfer: C must be > 0");
  TightnessTransfer out;
  out.C = C;
  if (std::holds_alternative<InhomogeneousMarkovChain>(model)) {
    const auto& chain = std::get<InhomogeneousMarkovChain>(model);
    for (std::size_t s = 0; s < chain.state_count(); ++s) {
      const double r = std::abs(tilt(static_cast<double>(s)));
      if (r > C) out.eta += chain.initial()[s] * r;
    }
  } else {
    out.eta = integrate(
                  [&](double x) {
                    const double r = std::abs(tilt(x));
                    return r > C ? r : 0.0;
                  },
                  0.0, 1.0, 1e-11)
                  .value;
  }
  out.bound = out.eta + C * exceedance_mu;
  return out;
}

void write_path_quantiles_csv(std::ostream& os, const PathBatch& paths,
                              std::span<const double> levels) {
  if (paths.dimension != 1)
    throw std::invalid_argument("write_path_quantiles_csv: scalar paths only");
  if (levels.empty() || paths.count == 0)
    throw std::invalid_argument("write_path_quantiles_csv: empty input");
  os << 't';
  for (double q : levels) {
    os << ",q";
    // level printed as percent without a trailing dot, e.g. q5, q97.5
    const double pct = 100.0 * q;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", pct);
    os << buf;
  }
  os << '\n';
  std::vector<double> column(paths.count);
  char buf[64];
  auto put = [&](double v) {
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    os.write(buf, p - buf);
  };
  for (std::size_t g = 0; g < paths.grid.size(); ++g) {
    for (std::size_t i = 0; i < paths.count; ++i) column[i] = paths.at(i, g);
    std::sort(column.begin(), column.end());
    put(paths.grid[g]);
    for (double q : levels) {
      const double pos = q * static_cast<double>(paths.count - 1);
      const std::size_t lo = static_cast<std::size_t>(pos);
      const std::size_t hi = std::min(lo + 1, paths.count - 1);
      const double frac = pos - static_cast<double>(lo);
      os << ',';
      put(column[lo] + frac * (column[hi] - column[lo]));
    }
    os << '\n';
  }
}

TightnessTransfer nu_tightness_transfer_best(double exceedance_mu,
                                             const DensityTilt& tilt,
                                             const ProcessModel& model,
                                             std::span<const double> c_grid) {
  if (c_grid.empty())
    throw std::invalid_argument("nu_tightness_transfer_best: empty C grid");
  TightnessTransfer best;
  bool first = true;
  for (double C : c_grid) {
    const auto cur = nu_tightness_transfer(exceedance_mu, tilt, model, C);
    if (first || cur.bound < best.bound) {
      best = cur;
      first = false;
    }
  }
  return best;
}

}  // namespace eagleson
