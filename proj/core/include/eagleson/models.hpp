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
#ifndef EAGLESON_MODELS_HPP
#define EAGLESON_MODELS_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace eagleson {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

enum class MeasureTag { Mu, Nu };

/// Norm class attached to densities and decay profiles. Assumption-style
/// covariance bounds pair a norm with a decay sequence; mixing profiles and
/// tilts carry this tag so mismatched pairings can be rejected.
struct NormSpec {
  enum class Kind { TotalVariation, Lp } kind = Kind::TotalVariation;
  double p = 0.0;  // only meaningful for Lp; may be infinity

  static NormSpec total_variation() { return {Kind::TotalVariation, 0.0}; }
  static NormSpec lp(double p) { return {Kind::Lp, p}; }
  bool operator==(const NormSpec& o) const {
    return kind == o.kind && (kind == Kind::TotalVariation || p == o.p);
  }
};

class InvalidDensityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Piecewise expanding interval maps x -> k_j x mod 1 on [0,1) with integer
/// slopes k_j >= 2, composed in increasing index order:
/// evolve(x, n, m) applies T_{n+m-1} o ... o T_n. Lebesgue is preserved by
/// every step. Slopes are a finite list, optionally repeated periodically.
class SequentialExpandingMap {
 public:
  SequentialExpandingMap(std::vector<int> slopes, bool periodic);

  int slope(std::size_t j) const {
    if (periodic_) return slopes_[j % slopes_.size()];
    if (j >= slopes_.size())
      throw std::out_of_range("SequentialExpandingMap: index beyond slope list");
    return slopes_[j];
  }

  double step(double x, std::size_t j) const {
    const double y = x * static_cast<double>(slope(j));
    return y - std::floor(y);
  }

  /// Precomputed 1/k_j for the backward (inverse-branch) sampler.
  double inv_slope(std::size_t j) const {
    if (periodic_) return inv_slopes_[j % inv_slopes_.size()];
    if (j >= inv_slopes_.size())
      throw std::out_of_range("SequentialExpandingMap: index beyond slope list");
    return inv_slopes_[j];
  }

  /// T_start^steps, i.e. steps applications beginning at index start.
  double evolve(double x, std::size_t start, std::size_t steps) const {
    for (std::size_t i = 0; i < steps; ++i) x = step(x, start + i);
    return x;
  }

  bool periodic() const { return periodic_; }
  const std::vector<int>& slopes() const { return slopes_; }
  std::size_t horizon() const {
    return periodic_ ? std::numeric_limits<std::size_t>::max() : slopes_.size();
  }

 private:
  std::vector<int> slopes_;
  std::vector<double> inv_slopes_;
  bool periodic_;
};

/// Finite-state inhomogeneous Markov chain: initial distribution mu_0 and a
/// (possibly periodic) list of row-stochastic transition matrices P_j, stored
/// row-major. Row sums and mu_0 are checked to 1e-12 on construction.
class InhomogeneousMarkovChain {
 public:
  InhomogeneousMarkovChain(std::size_t state_count,
                           std::vector<std::vector<double>> matrices,
                           bool periodic, std::vector<double> initial);

  std::size_t state_count() const { return state_count_; }
  bool periodic() const { return periodic_; }
  std::size_t matrix_count() const { return matrices_.size(); }
  std::size_t horizon() const {
    return periodic_ ? std::numeric_limits<std::size_t>::max() : matrices_.size();
  }

  const std::vector<double>& matrix(std::size_t j) const {
    if (periodic_) return matrices_[j % matrices_.size()];
    if (j >= matrices_.size())
      throw std::out_of_range("InhomogeneousMarkovChain: index beyond matrix list");
    return matrices_[j];
  }

  double prob(std::size_t j, std::size_t from, std::size_t to) const {
    return matrix(j)[from * state_count_ + to];
  }

  const std::vector<double>& initial() const { return initial_; }

  /// Distribution of X_j: mu_0 P_0 ... P_{j-1}, multiplied left to right.
  std::vector<double> marginal(std::size_t j) const;

  /// Evolves an arbitrary start distribution `steps` transitions from index
  /// `start`; marginal(j + m) == marginal_from(marginal(j), j, m) bitwise.
  std::vector<double> marginal_from(std::vector<double> dist, std::size_t start,
                                    std::size_t steps) const;

 private:
  std::size_t state_count_;
  std::vector<std::vector<double>> matrices_;
  bool periodic_;
  std::vector<double> initial_;
};

using ProcessModel = std::variant<SequentialExpandingMap, InhomogeneousMarkovChain>;

/// The iid fair +-1 baseline: a 2-state chain with identical rows (1/2, 1/2).
InhomogeneousMarkovChain iid_sign_chain();

/// Probability density r of nu = r dmu over the model's initial space.
/// For maps the evaluator takes x in [0,1); for chains it takes the state
/// index (as a double). norm_value is the class-B norm: total variation for
/// maps, L^p(mu) with declared p for chains.
class DensityTilt {
 public:
  using Evaluator = std::function<double(double)>;

  double operator()(double x) const { return eval_(x); }

  static DensityTilt map_identity();
  /// r(x) = 1 + a cos(2 pi x), |a| <= 1. Total variation 4|a|.
  static DensityTilt map_cosine(double amplitude);
  /// Step density: left_value on [0, cut), the mass-balancing value after.
  static DensityTilt map_step(double left_value, double cut);
  static DensityTilt map_custom(Evaluator f, double norm_value, double sup_bound,
                                bool strictly_positive);
  /// Per-state values for a chain; class norm is L^p(mu_0) with declared p.
  static DensityTilt chain_values(std::vector<double> values, double p);

  NormSpec norm_class;
  double norm_value = 0.0;
  double sup_bound = std::numeric_limits<double>::infinity();
  bool strictly_positive = false;
  bool validated = false;

 private:
  Evaluator eval_;
};

/// One validated probe point failure, reported with its witness.
/// validate_tilt checks nonnegativity on the probe set, unit integral within
/// 1e-10 (exact sum for chains, adaptive quadrature for maps) and norm
/// consistency; returns a stamped copy.
DensityTilt validate_tilt(const DensityTilt& tilt, const ProcessModel& model);

/// Sequence of per-index observables g_j mapping the j-th state to R^d.
/// Window width is fixed to 1: g_j sees X_j only.
class ObservableSequence {
 public:
  enum class Kind { MapCos2Pi, MapSin2Pi, MapCenteredX, MapCustom, ChainTable };

  static ObservableSequence map_cos2pi();
  static ObservableSequence map_sin2pi();
  /// g(x) = x - 1/2.
  static ObservableSequence map_centered_x();
  static ObservableSequence map_custom(std::function<double(double)> g,
                                       double sup_norm);
  /// tables[j % tables.size()][state * d + c]; one table per index.
  static ObservableSequence chain_table(std::vector<std::vector<double>> tables,
                                        int dimension);

  int dimension() const { return dimension_; }
  Kind kind() const { return kind_; }

  void eval(std::size_t j, double state, double* out) const;
  double eval1(std::size_t j, double state) const {
    double v;
    eval(j, state, &v);
    return v;
  }

  /// Sup norm of g_j (infinity when unknown).
  double sup_norm(std::size_t j) const;

  /// Declared moment bounds: pairs (p, bound on ||g_j(X_j)||_p uniform in j).
  std::vector<std::pair<double, double>> moment_info;

 private:
  Kind kind_ = Kind::MapCos2Pi;
  int dimension_ = 1;
  std::function<double(double)> map_fn_;
  double map_sup_ = 1.0;
  std::vector<std::vector<double>> tables_;
  std::vector<double> table_sups_;
};

/// count x length array of states; trajectory i is a deterministic function
/// of (master_seed, i) regardless of worker count.
struct TrajectoryBatch {
  std::size_t count = 0;
  std::size_t length = 0;
  MeasureTag measure = MeasureTag::Mu;
  std::uint64_t master_seed = 0;
  std::vector<double> values;  // row-major count x length

  double at(std::size_t trajectory, std::size_t j) const {
    return values[trajectory * length + j];
  }
};

/// Draws the initial state of one chain trajectory: mu_0-categorical for Mu,
/// exact categorical from the tilted vector mu_0 (x) r for Nu.
/// Exposed so streaming kernels share the exact draw sequence with
/// sample_trajectories.
class InitialSampler {
 public:
  InitialSampler(const InhomogeneousMarkovChain& chain, MeasureTag measure,
                 const DensityTilt* tilt);

  template <typename Rng>
  double draw(Rng& rng) const {
    const double u = rng.next_double();
    double acc = 0.0;
    std::size_t last = weights_.size() - 1;
    for (std::size_t s = 0; s <= last; ++s) {
      acc += weights_[s];
      if (u < acc || s == last) return static_cast<double>(s);
    }
    return static_cast<double>(last);
  }

 private:
  std::vector<double> weights_;  // mu_0, tilted for Nu; exact
};

/// Checks the nu-sampling preconditions: validated tilt, and for maps a
/// finite sup_bound for the rejection step.
void require_nu_tilt(const DensityTilt* tilt, bool is_map);

namespace detail {

/// Fills path[0 .. length-1] with one map trajectory sampled under Lebesgue.
/// Forward iteration of integer-slope maps in doubles is degenerate (dyadic
/// states collapse to 0 within ~50 steps), so the path is generated backward
/// through the inverse branches: X_{length-1} is uniform and X_j is uniform
/// on the k_j preimages of X_{j+1}. The joint law equals that of the forward
/// orbit of a Lebesgue-distributed initial point, at every length.
template <typename Rng>
void backward_map_path(const SequentialExpandingMap& map, Rng& rng,
                       std::size_t length, double* path) {
  double x = rng.next_double();
  if (length == 0) return;
  path[length - 1] = x;
  for (std::size_t r = length - 1; r > 0; --r) {
    const std::size_t j = r - 1;  // choosing the branch of T_j
    const int k = map.slope(j);
    double branch = std::floor(rng.next_double() * static_cast<double>(k));
    if (branch > static_cast<double>(k - 1)) branch = static_cast<double>(k - 1);
    x = (x + branch) * map.inv_slope(j);
    path[j] = x;
  }
}

/// Mu: one backward path. Nu: whole-path rejection against sup_bound with
/// the acceptance weight r(X_0); the accepted path law is the nu path law.
template <typename Rng>
void map_path_sample(const SequentialExpandingMap& map, Rng& rng,
                     const DensityTilt* tilt, std::size_t length, double* path) {
  if (!tilt) {
    backward_map_path(map, rng, length, path);
    return;
  }
  const double sup = tilt->sup_bound;
  for (;;) {
    backward_map_path(map, rng, length, path);
    const double u = rng.next_double();
    if (u * sup <= (*tilt)(path[0])) return;
  }
}

}  // namespace detail

TrajectoryBatch sample_trajectories(const ProcessModel& model, std::size_t length,
                                    std::size_t count, std::uint64_t master_seed,
                                    MeasureTag measure,
                                    const DensityTilt* tilt = nullptr,
                                    unsigned workers = 0);

/// mu_j = mu_0 P_0 ... P_{j-1}.
std::vector<double> chain_marginal(const InhomogeneousMarkovChain& chain,
                                   std::size_t j);

}  // namespace eagleson

#endif  // EAGLESON_MODELS_HPP
