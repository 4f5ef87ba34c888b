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
#ifndef EAGLESON_MIXING_HPP
#define EAGLESON_MIXING_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "eagleson/models.hpp"

namespace eagleson {

/// Decay sequence delta_n bounding |Cov(s, f о remote future)| by
/// ||s|| sup|f| delta_n in the attached norm class.
class MixingProfile {
 public:
  enum class Form { ExactArray, Geometric, Polynomial };
  enum class Provenance { Analytic, Synthesized, Measured };

  static MixingProfile exact_array(std::vector<double> values, NormSpec norm,
                                   Provenance provenance);
  /// delta_n = c1 * lambda^n, 0 <= lambda < 1 required for certified decay.
  static MixingProfile geometric(double c1, double lambda, NormSpec norm,
                                 Provenance provenance);
  /// delta_n = c1 * (n+1)^(-theta), theta > 0 required for certified decay.
  static MixingProfile polynomial(double c1, double theta, NormSpec norm,
                                  Provenance provenance);

  double value(std::size_t n) const;
  std::size_t max_index() const;

  /// True when delta_n -> 0 is certified (closed forms) or the stored array
  /// passes the spot check (tail below a tenth of the head, or tiny).
  bool decay_certified() const;

  Form form() const { return form_; }
  Provenance provenance() const { return provenance_; }
  const NormSpec& norm_class() const { return norm_class_; }

 private:
  Form form_ = Form::ExactArray;
  Provenance provenance_ = Provenance::Analytic;
  NormSpec norm_class_;
  std::vector<double> values_;
  double c1_ = 0.0, rate_ = 0.0;
};

/// delta_n = prod_{j<n} 1/k_j for the expanding-map family; the transfer
/// operator contracts variation by 1/k_j per step, so this is an analytic
/// profile for the total-variation norm class.
MixingProfile delta_profile_expanding(const SequentialExpandingMap& map,
                                      std::size_t up_to);

/// alpha-mixing values per gap n. Exact values carry the finite future
/// depth they were computed at (monotone nondecreasing in depth, hence
/// certified lower bounds); upper bounds come from the contraction route.
struct AlphaProfile {
  enum class Kind { ExactDepthCapped, UpperBound };
  std::vector<double> values;  // index n (values[0] unused convention: n >= 1)
  Kind kind = Kind::UpperBound;
  std::size_t depth_cap = 0;
  bool clamped = false;

  double value(std::size_t n) const;
};

/// gamma_n bounding ||r - E[r | X_0..X_n]||_{L1(mu)}.
struct ApproximationProfile {
  std::function<double(std::size_t)> values;

  /// Tilts depending on X_0 only are exactly conditionally measurable:
  /// gamma == 0.
  static ApproximationProfile zero();
  static ApproximationProfile exact_array(std::vector<double> vals);
};

struct AlphaResult {
  double value = 0.0;
  bool exact = true;           // false: flagged fixed-point lower bound
  bool clamped = false;        // clamped into [0, 1/4]
  std::uint32_t iterations = 0;
};

/// Exact alpha(F_{0,k}, F_{k+n, k+n+depth}) by enumeration: for each future
/// event B the optimal past event collects the atoms a with P(B|a) > P(B);
/// the supremum over B enumerates subsets of future atoms when there are at
/// most 14 of them (2^14 subsets), otherwise a two-sided conditional
/// threshold iteration runs to a fixed point and the result is a flagged
/// lower bound. Requires state_count^max(k+1, depth+1) <= 2^14.
AlphaResult alpha_bruteforce(const InhomogeneousMarkovChain& chain, std::size_t k,
                             std::size_t n, std::size_t depth,
                             bool allow_fixed_point = true);

/// (1/4) * prod of per-step Dobrushin contraction coefficients over n
/// consecutive steps, maximized over the window start within one period.
/// Coefficient of a matrix: half the maximal L1 distance between rows.
double alpha_upper_dobrushin(const InhomogeneousMarkovChain& chain, std::size_t n);

double dobrushin_coefficient(const std::vector<double>& matrix, std::size_t states);

/// delta_n = 6 (alpha_[n/2])^(1 - 1/p) + 2 gamma_[n/2], convention 1/inf = 0.
MixingProfile delta_from_alpha(const AlphaProfile& alpha,
                               const ApproximationProfile& gamma, double p,
                               std::size_t up_to);

/// Piecewise-linear function on [0,1], linear between knots. Used as the
/// bounded-variation test class for the map correlation certificate.
struct PiecewiseLinear {
  std::vector<double> knots;   // strictly increasing, knots.front()=0, back()=1
  std::vector<double> values;  // same size as knots

  double operator()(double x) const;
  double integral() const;
  double variation() const;
};

/// Exact integral of s(x) * {cos|sin}(2 pi freq x) over [0,1], closed form
/// per linear segment.
double pl_fourier_integral(const PiecewiseLinear& s, double freq, bool cosine);

/// |int s(x) f(T_0^n x) dx - int s int f| for f(x) = {cos|sin}(2 pi wave x),
/// computed exactly: T_0^n x = frac(Kx) with K the slope product, so the
/// integrand is the wave*K Fourier mode of s. Requires wave*K < 2^52.
double expanding_cov_exact(const SequentialExpandingMap& map,
                           const PiecewiseLinear& s, std::size_t n, double wave,
                           bool cosine);

struct McCovariance {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo estimate of the same covariance (iterating the map n steps),
/// for cross-checking the exact route.
McCovariance expanding_cov_mc(const SequentialExpandingMap& map,
                              const PiecewiseLinear& s, std::size_t n, double wave,
                              bool cosine, std::size_t samples,
                              std::uint64_t seed, unsigned workers = 0);

}  // namespace eagleson

#endif  // EAGLESON_MIXING_HPP
