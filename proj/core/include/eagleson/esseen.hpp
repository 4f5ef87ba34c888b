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
#ifndef EAGLESON_ESSEEN_HPP
#define EAGLESON_ESSEEN_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "eagleson/spectral.hpp"

namespace eagleson {

/// Reference law Z with a bounded density; the smoothing terms only need its
/// cdf and the sup of the density.
struct ReferenceLaw {
  std::function<double(double)> cdf;
  double density_sup = 0.0;
  std::string name;

  /// cdf via erfc (absolute error ~1e-16), density_sup = 1/sqrt(2 pi).
  static ReferenceLaw standard_normal();
};

/// c with int_0^{c/2} sin^2 x / x^2 dx = pi/4 + 1/8.
struct EsseenConstant {
  double c = 0.0;
  double residual = 0.0;
};

/// Integrand of the defining equation, with the removable singularity at 0.
double esseen_integrand(double x);

/// Root by bisection of the strictly increasing antiderivative, adaptive
/// quadrature at absolute tolerance <= 1e-12.
EsseenConstant esseen_constant();

/// One-sample Kolmogorov distance of a sorted sample against a cdf:
/// max_i max(|i/N - F(x_(i))|, |(i-1)/N - F(x_(i))|).
double kolmogorov_to_cdf(std::span<const double> sorted_sample,
                         const ReferenceLaw& law);

/// Exact two-sample Kolmogorov statistic by merge scan; the sup is computed
/// in integer arithmetic |i*m - j*n| / (n*m).
double kolmogorov_two_sample(std::span<const double> sample_a,
                             std::span<const double> sample_b);

struct EsseenLemmaBound {
  double integral = 0.0;         // int_{-T}^{T} |phi_X - phi_Y| / |t| dt
  double integral_radius = 0.0;  // contribution of the cf confidence radii
  double bound_xy = 0.0;         // on d_K(X, Y)
  double bound_xz = 0.0;         // on d_K(X, Z)
  bool quadrature_converged = true;
  double quadrature_error = 0.0;
};

/// Both forms of the smoothing inequality. Near t = 0 (|t| <= 1e-3 T) the
/// integrand is replaced by the bound |m_X - m_Y| + L|t| with the means and
/// slope estimated from central differences of the cfs at 0.
EsseenLemmaBound esseen_lemma_bound(const CharacteristicFunction& phi_x,
                                    const CharacteristicFunction& phi_y, double T,
                                    double dk_yz, const ReferenceLaw& law,
                                    const EsseenConstant& c);

/// Four-term quantitative change-of-measure bound on d_K(S_{nu,n}/b_n, Z):
///   (4c+1) d_K(S_{mu,n}/b_n, Z) + 2T I(rho)/b_n + 2 delta_rho ||r|| ln T
///   + 2 ||f_Z||_inf c^2 / T,   I(rho) = int |S_rho| (2 + r) dmu.
struct QuantBoundReport {
  double main = 0.0;
  double translation = 0.0;
  double mixing = 0.0;
  double smoothing = 0.0;
  double total = 0.0;
  double total_se = 0.0;  // propagated from the I(rho) standard error
  // inputs echoed
  double dk_mu = 0.0;
  double i_rho = 0.0;
  double i_rho_se = 0.0;
  double delta_rho = 0.0;
  double norm_r = 0.0;
  double b_n = 0.0;
  double T = 0.0;
  std::size_t rho = 0;
};

QuantBoundReport quant_eagleson_bound(double dk_mu, double i_rho, double delta_rho,
                                      double norm_r, double b_n, double T,
                                      const ReferenceLaw& law,
                                      const EsseenConstant& c,
                                      double i_rho_se = 0.0, std::size_t rho = 0);

/// 3 d_K + (1 + 4 ||f_Z||_inf) |E S_nu - E S_mu| / b_n: cost of recentering
/// by the nu-mean instead of the mu-mean.
double recentering_bound(double dk_centered_by_mu, double mean_gap, double b_n,
                         const ReferenceLaw& law);

struct SelectedT {
  double T = 1.0;
  double objective = 0.0;  // a T + b / T at the returned T
  bool clamped = false;
  bool degenerate = false;
};

/// argmin of a T + b / T clamped to [1, T_max].
SelectedT select_T(double linear_coeff, double inverse_coeff, double T_max);

struct BlockingPoint {
  std::size_t n = 0;
  std::size_t a_n = 0;
  double ratio = 0.0;  // c_{a_n} / b_n
  bool saturated = false;
};

/// a_n = largest a <= n-1 with c_a <= sqrt(b_n); c is made nondecreasing by a
/// running max. Guarantees c_{a_n}/b_n <= b_n^{-1/2} and a_n -> infinity for
/// finite-valued c.
std::vector<BlockingPoint> blocking_schedule(
    const std::function<double(std::size_t)>& c_values,
    const std::function<double(std::size_t)>& b_values,
    const std::vector<std::size_t>& n_list);

}  // namespace eagleson

#endif  // EAGLESON_ESSEEN_HPP
