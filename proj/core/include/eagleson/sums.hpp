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
#ifndef EAGLESON_SUMS_HPP
#define EAGLESON_SUMS_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "eagleson/mixing.hpp"
#include "eagleson/models.hpp"

namespace eagleson {

enum class Centering { None, MuMean, NuMean };

/// Batch of S_n values, one row per trajectory.
struct PartialSumSample {
  std::size_t count = 0;
  int dimension = 1;
  std::size_t n = 0;
  MeasureTag measure = MeasureTag::Mu;
  Centering centering = Centering::None;
  double normalizer = 1.0;
  bool self_normalized = false;
  std::vector<double> values;  // count x dimension

  double at(std::size_t i, int c = 0) const { return values[i * dimension + c]; }
};

/// S_n(x) = sum_{j<n} g_j(X_j(x)) for every requested n, sliced from one
/// prefix-sum pass per trajectory.
std::vector<PartialSumSample> partial_sums(const TrajectoryBatch& batch,
                                           const ObservableSequence& obs,
                                           const std::vector<std::size_t>& n_list,
                                           unsigned workers = 0);

/// (values - centering) / b.
PartialSumSample center_and_normalize(const PartialSumSample& sample,
                                      const std::vector<double>& centering_values,
                                      double b, Centering tag);

/// Streaming variant of sample_trajectories + partial_sums: prefix sums are
/// recorded at the cut indices without materializing trajectories, using the
/// identical per-trajectory draw sequence. Results equal the two-step path
/// bit for bit when the batch length matches the trajectory horizon
/// (cuts.back() for maps, where paths are backward constructions and thus
/// horizon-dependent; any length >= cuts.back() for forward-sampled chains).
struct PrefixSumBatch {
  std::vector<std::size_t> cuts;  // strictly increasing
  std::size_t count = 0;
  int dimension = 1;
  MeasureTag measure = MeasureTag::Mu;
  std::uint64_t master_seed = 0;
  std::vector<double> sums;     // count x cuts.size() x dimension
  std::vector<double> initial;  // initial coordinate per trajectory

  double sum_at(std::size_t i, std::size_t cut_index, int c = 0) const {
    return sums[(i * cuts.size() + cut_index) * dimension + c];
  }
  PartialSumSample extract(std::size_t cut_index) const;
};

PrefixSumBatch sample_prefix_sums(const ProcessModel& model,
                                  const ObservableSequence& obs,
                                  const DensityTilt* tilt, MeasureTag measure,
                                  std::size_t count,
                                  const std::vector<std::size_t>& cuts,
                                  std::uint64_t master_seed, unsigned workers = 0);

/// Conjugate exponent triple with 1/p1 + 1/p2 + 1/p3 = 1 (1/inf = 0).
struct ExponentTriple {
  double p1 = 0.0, p2 = 0.0, p3 = 0.0;
  void validate() const;
};

/// Evaluated truncation certificate: per-term breakdown of
///   sum_j (M_j delta_j + K_j M_j^(-beta))        (centering, per j)
///   sum_{k<=j} (a_k M_kj + C_kj M_kj^(-beta))    (variance, per pair)
/// with levels either given or optimized in closed form
/// M* = (K beta / delta)^(1/(1+beta)).
struct GapCertificate {
  enum class Quantity { CenteringGap, VarianceGap };

  struct Term {
    std::size_t j = 0;
    std::size_t k = 0;           // == j for the centering certificate
    double level = 0.0;
    bool level_infinite = false;  // delta = 0: tail-only evaluation, term 0
    double truncation = 0.0;
    double tail = 0.0;
  };

  Quantity quantity = Quantity::CenteringGap;
  ExponentTriple exponents;
  std::vector<Term> terms;  // empty when keep_terms was false
  double truncation_total = 0.0;
  double tail_total = 0.0;
  double total = 0.0;
  double comparison_scale = 0.0;  // b_n or b_n^2 when provided, else 0
  bool limiting_level = false;    // some term used the M -> inf limit
};

struct LevelRule {
  bool optimize = true;
  std::vector<double> given;                             // per j (centering)
  std::function<double(std::size_t, std::size_t)> pair;  // per (k,j) (variance)

  static LevelRule optimized() { return {}; }
  static LevelRule explicit_levels(std::vector<double> levels);
  static LevelRule explicit_pair_levels(std::function<double(std::size_t, std::size_t)> fn);
};

GapCertificate centering_gap_certificate(const MixingProfile& delta,
                                         const std::vector<double>& moment_norms,
                                         const ExponentTriple& exponents,
                                         std::size_t n,
                                         const LevelRule& levels = LevelRule::optimized(),
                                         double comparison_scale = 0.0,
                                         bool keep_terms = true);

GapCertificate variance_gap_certificate(
    const MixingProfile& delta,
    const std::function<double(std::size_t, std::size_t)>& pair_norms,
    const ExponentTriple& exponents, double norm_r, double norm_r_plus_one_s1,
    std::size_t n, const LevelRule& levels = LevelRule::optimized(),
    double comparison_scale = 0.0, bool keep_terms = true);

struct EmpiricalGap {
  double mean_gap = 0.0;     // |E^ S_nu - E^ S_mu| (Euclidean for d > 1)
  double mean_gap_se = 0.0;  // jackknife
  double std_ratio = 1.0;    // b^_nu / b^_mu (d = 1 only)
  double std_ratio_se = 0.0;
  double b_mu = 0.0;
  double b_nu = 0.0;
  bool degenerate = false;  // variance below 1e-14 * scale, ratio unusable
};

/// Plug-in gap and ratio between two same-n samples with jackknife errors.
EmpiricalGap empirical_gap(const PartialSumSample& sample_mu,
                           const PartialSumSample& sample_nu);

/// Unbiased sample standard deviation of column c.
double sample_std(const PartialSumSample& sample, int c = 0);
double sample_mean(const PartialSumSample& sample, int c = 0);

/// Exact chain moment norms ||g_j(X_j)||_p under mu_j, per j < n.
std::vector<double> chain_moment_norms(const InhomogeneousMarkovChain& chain,
                                       const ObservableSequence& obs, double p,
                                       std::size_t n);

}  // namespace eagleson

#endif  // EAGLESON_SUMS_HPP
