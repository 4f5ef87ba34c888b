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
#ifndef EAGLESON_WIP_HPP
#define EAGLESON_WIP_HPP

#include <cstddef>
#include <ostream>
#include <span>
#include <vector>

#include "eagleson/models.hpp"
#include "eagleson/sums.hpp"

namespace eagleson {

/// Rescaled path process S_{[nt]}/b_n sampled at a time grid. Paths are
/// piecewise constant; the value at t = 0 is the empty sum 0.
struct PathBatch {
  std::vector<double> grid;  // strictly increasing, grid.front() == 0
  std::size_t n = 0;
  double b_n = 1.0;
  MeasureTag measure = MeasureTag::Mu;
  std::size_t count = 0;
  int dimension = 1;
  std::vector<double> values;  // count x grid.size() x dimension

  double at(std::size_t i, std::size_t g, int c = 0) const {
    return values[(i * grid.size() + g) * dimension + c];
  }
};

/// Builds paths from a materialized batch: per trajectory, prefix sums at the
/// indices [n t] for every grid time, divided by b_n.
PathBatch path_process(const TrajectoryBatch& batch, const ObservableSequence& obs,
                       std::size_t n, double b_n, const std::vector<double>& grid,
                       unsigned workers = 0);

/// Same construction from a streaming prefix-sum run; the run's cuts must
/// contain [n t] for every grid time (see path_cut_indices).
PathBatch path_from_prefix(const PrefixSumBatch& prefix, std::size_t n, double b_n,
                           const std::vector<double>& grid);

/// The cut indices [n t] for a grid, deduplicated and sorted.
std::vector<std::size_t> path_cut_indices(std::size_t n,
                                          const std::vector<double>& grid);

/// Times 0 < s_1 < ... < s_m and a frequency vector in R^{d m}.
struct FddVector {
  std::vector<double> times;
  std::vector<double> frequency;
};

struct FddDistanceResult {
  double max_abs_diff = 0.0;
  double radius = 0.0;  // 8 / sqrt(min count)
  std::vector<double> per_frequency;
};

/// |phi^_mu - phi^_nu| of (S(s_1), ..., S(s_m)) over a frequency grid.
FddDistanceResult fdd_distance(const PathBatch& paths_mu, const PathBatch& paths_nu,
                               const std::vector<double>& times,
                               const std::vector<std::vector<double>>& freq_grid);

struct TightnessDiagnostic {
  double exceedance = 0.0;  // P^(w'_delta >= eps)
  double std_error = 0.0;
  std::vector<double> moduli;  // per path
};

/// Cadlag modulus w'_delta per path: minimum over partitions of the grid
/// with mesh > delta of the largest oscillation within a partition interval
/// (intervals are [t_i, t_{i+1}) except the last, which is closed), computed
/// exactly by dynamic programming over grid points. Requires at least 3 grid
/// points per delta window.
TightnessDiagnostic tightness_diagnostic(const PathBatch& paths, double eps,
                                         double delta, unsigned workers = 0);

/// Exact modulus of one path given as grid values; exposed for oracle tests.
double cadlag_modulus(std::span<const double> times, std::span<const double> values,
                      double delta);

struct TightnessTransfer {
  double eta = 0.0;    // mu(|r| 1{|r| > C})
  double bound = 0.0;  // eta + C * exceedance_mu
  double C = 0.0;
};

/// Bound on the nu-exceedance from the mu-exceedance: eta_C + C eps.
/// eta is an exact sum for chains and adaptive quadrature for maps.
TightnessTransfer nu_tightness_transfer(double exceedance_mu, const DensityTilt& tilt,
                                        const ProcessModel& model, double C);

/// Scans a C grid and returns the entry minimizing the bound.
TightnessTransfer nu_tightness_transfer_best(double exceedance_mu,
                                             const DensityTilt& tilt,
                                             const ProcessModel& model,
                                             std::span<const double> c_grid);

/// Quantile fan of a path batch: one CSV row per grid time with the given
/// empirical quantiles across trajectories (columns t,q<level>,...).
/// Scalar paths only.
void write_path_quantiles_csv(std::ostream& os, const PathBatch& paths,
                              std::span<const double> levels);

}  // namespace eagleson

#endif  // EAGLESON_WIP_HPP
