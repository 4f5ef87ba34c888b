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
#ifndef EAGLESON_SPECTRAL_HPP
#define EAGLESON_SPECTRAL_HPP

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <span>
#include <vector>

#include "eagleson/models.hpp"
#include "eagleson/sums.hpp"

namespace eagleson {

/// Characteristic function: empirical (with a uniform confidence radius) or
/// exact via chain transfer matrices (radius 0). phi(0) = 1 exactly and
/// phi(-t) = conj(phi(t)) for both kinds.
class CharacteristicFunction {
 public:
  enum class Kind { Empirical, ExactChain, Analytic };

  std::complex<double> operator()(double t) const;
  /// Vector frequency; size must equal the sample dimension.
  std::complex<double> operator()(std::span<const double> t) const;

  double confidence_radius(double /*t*/) const { return radius_; }
  Kind kind() const { return kind_; }
  std::size_t sample_count() const { return count_; }
  int dimension() const { return dimension_; }

  static CharacteristicFunction empirical(const PartialSumSample& sample);
  static CharacteristicFunction exact_chain(const InhomogeneousMarkovChain& chain,
                                            const ObservableSequence& obs,
                                            const DensityTilt* tilt, std::size_t n);
  /// Closed-form cf (treated like the exact kind: radius 0).
  static CharacteristicFunction analytic(
      std::function<std::complex<double>(double)> fn);

 private:
  Kind kind_ = Kind::Empirical;
  int dimension_ = 1;
  std::size_t count_ = 0;
  double radius_ = 0.0;
  std::shared_ptr<const std::vector<double>> data_;  // empirical
  std::function<std::complex<double>(double)> exact_;
};

/// phi^(t) = (1/N) sum_i e^{i<t, S_i>}, radius 4/sqrt(N). The t_grid is kept
/// for reporting; the evaluator accepts any frequency.
struct EmpiricalCf {
  CharacteristicFunction cf;
  std::vector<double> t_grid;
  std::vector<std::complex<double>> grid_values;
};

EmpiricalCf empirical_cf(const PartialSumSample& sample,
                         const std::vector<double>& t_grid);

/// mu((r) e^{itS_n}) evaluated exactly: (mu_0 (.) r) D_0 P_0 ... D_{n-1} P_{n-1} 1,
/// where D_j = diag(e^{i t g_j(state)}) applies the phase at the source state
/// of transition j. tilt = nullptr means r == 1.
std::complex<double> exact_cf_chain(const InhomogeneousMarkovChain& chain,
                                    const ObservableSequence& obs,
                                    const DensityTilt* tilt, std::size_t n,
                                    double t);

struct ChainMoments {
  double mean = 0.0;
  double variance = 0.0;
  double second_moment = 0.0;
};

/// Exact E[S_n] and Var(S_n) under mu (tilt = nullptr) or nu. Forward dynamic
/// programming carrying per-state mass and conditional first/second moments
/// of the running sum. order 1 skips the second moment; order > 2 is
/// unsupported.
ChainMoments exact_moments_chain(const InhomogeneousMarkovChain& chain,
                                 const ObservableSequence& obs,
                                 const DensityTilt* tilt, std::size_t n,
                                 int order = 2);

/// Per-step complex factors D_j(t) P_j with a product cache keyed by (t, n).
class FourierTransferOperator {
 public:
  FourierTransferOperator(const InhomogeneousMarkovChain& chain,
                          const ObservableSequence& obs);

  /// Row-major factor D_j(t) P_j.
  std::vector<std::complex<double>> factor(std::size_t j, double t) const;

  /// D_0 P_0 ... D_{n-1} P_{n-1}, cached per (t, n) with idempotent inserts.
  std::vector<std::complex<double>> product(double t, std::size_t n) const;

  /// Induced 2-norm of the product acting on signed measures with zero total
  /// mass (densities s with int s dmu_0 = 0, written in measure coordinates).
  double projected_norm(double t, std::size_t n) const;

  std::size_t states() const { return states_; }

 private:
  const InhomogeneousMarkovChain* chain_;
  const ObservableSequence* obs_;
  std::size_t states_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::pair<double, std::size_t>, std::vector<std::complex<double>>>
      cache_;
};

struct EnvelopeRow {
  double t = 0.0;
  std::size_t n = 0;
  double norm = 0.0;
};

/// Envelope table of the projected operator norms over a (t, n) grid, for
/// downstream fitting of C and R(.) in bounds of the form C|t|R(nt).
std::vector<EnvelopeRow> operator_norm_envelope(
    const InhomogeneousMarkovChain& chain, const ObservableSequence& obs,
    const std::vector<double>& t_grid, const std::vector<std::size_t>& n_list);

/// CSV columns: t,n,norm.
void write_envelope_csv(std::ostream& os, const std::vector<EnvelopeRow>& rows);

}  // namespace eagleson

#endif  // EAGLESON_SPECTRAL_HPP
