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
#include "eagleson/esseen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "eagleson/quadrature.hpp"

namespace eagleson {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438;
constexpr double kEsseenTarget = kPi / 4.0 + 0.125;
}  // namespace

ReferenceLaw ReferenceLaw::standard_normal() {
  ReferenceLaw law;
  law.cdf = [](double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); };
  law.density_sup = kInvSqrt2Pi;
  law.name = "standard normal";
  return law;
}

double esseen_integrand(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 3.0;
  const double s = std::sin(x);
  return s * s / (x * x);
}

EsseenConstant esseen_constant() {
  auto antideriv = [](double u) {
    return integrate(esseen_integrand, 0.0, u, 1e-13).value;
  };
  // The full integral is pi/2, so the target pi/4 + 1/8 is passed before
  // u = pi/2; the bracket [0.5, 2.0] straddles it comfortably.
  const double u = bisect_increasing(antideriv, 0.5, 2.0, kEsseenTarget, 1e-14);
  EsseenConstant out;
  out.c = 2.0 * u;
  out.residual = std::abs(antideriv(u) - kEsseenTarget);
  return out;
}

double kolmogorov_to_cdf(std::span<const double> sorted_sample,
                         const ReferenceLaw& law) {
  const std::size_t n = sorted_sample.size();
  if (n == 0) throw std::invalid_argument("kolmogorov_to_cdf: empty sample");
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (sorted_sample[i] > sorted_sample[i + 1])
      throw std::invalid_argument("kolmogorov_to_cdf: sample not sorted");
  const double nn = static_cast<double>(n);
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = law.cdf(sorted_sample[i]);
    d = std::max(d, std::abs(static_cast<double>(i + 1) / nn - f));
    d = std::max(d, std::abs(static_cast<double>(i) / nn - f));
  }
  return d;
}

double kolmogorov_two_sample(std::span<const double> sample_a,
                             std::span<const double> sample_b) {
  const std::size_t n = sample_a.size(), m = sample_b.size();
  if (n == 0 || m == 0)
    throw std::invalid_argument("kolmogorov_two_sample: empty sample");
  std::vector<double> a(sample_a.begin(), sample_a.end());
  std::vector<double> b(sample_b.begin(), sample_b.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  std::uint64_t best = 0;
  while (i < n || j < m) {
    const double t = (i < n && (j >= m || a[i] <= b[j])) ? a[i] : b[j];
    while (i < n && a[i] <= t) ++i;
    while (j < m && b[j] <= t) ++j;
    const std::int64_t gap = static_cast<std::int64_t>(i) * static_cast<std::int64_t>(m) -
                             static_cast<std::int64_t>(j) * static_cast<std::int64_t>(n);
    best = std::max<std::uint64_t>(best, static_cast<std::uint64_t>(std::abs(gap)));
  }
  return static_cast<double>(best) /
         (static_cast<double>(n) * static_cast<double>(m));
}

EsseenLemmaBound esseen_lemma_bound(const CharacteristicFunction& phi_x,
                                    const CharacteristicFunction& phi_y, double T,
                                    double dk_yz, const ReferenceLaw& law,
                                    const EsseenConstant& c) {
  if (!(T > 0.0)) throw std::invalid_argument("esseen_lemma_bound: T must be > 0");
  if (dk_yz < 0.0) throw std::invalid_argument("esseen_lemma_bound: negative d_K");

  auto diff = [&](double t) { return std::abs(phi_x(t) - phi_y(t)); };
  const double t0 = 1e-3 * T;

  // removable singularity: replace the integrand on [-t0, t0] by the bound
  // |m_X - m_Y| + L |t|, means from central differences of the cfs at 0
  const double h = t0;
  const double m_x = std::imag(phi_x(h) - phi_x(-h)) / (2.0 * h);
  const double m_y = std::imag(phi_y(h) - phi_y(-h)) / (2.0 * h);
  const double q0 = std::abs(m_x - m_y);
  const double slope = std::max(0.0, (diff(t0) / t0 - q0) / t0);
  const double small_t = 2.0 * t0 * q0 + slope * t0 * t0;

  // conjugate symmetry: the integrand is even in t
  const auto quad = integrate([&](double t) { return diff(t) / t; }, t0, T,
                              1e-10 * std::max(1.0, T));
  EsseenLemmaBound out;
  out.integral = 2.0 * quad.value + small_t;
  out.quadrature_converged = quad.converged;
  out.quadrature_error = 2.0 * quad.error_estimate;

  const double radius_sum =
      phi_x.confidence_radius(0.0) + phi_y.confidence_radius(0.0);
  if (radius_sum > 0.0)
    out.integral_radius =
        2.0 * radius_sum * std::log(T / t0) + 2.0 * radius_sum;

  const double smoothing = 2.0 * law.density_sup * c.c * c.c / T;
  out.bound_xy = 4.0 * c.c * dk_yz + out.integral + smoothing;
  out.bound_xz = (4.0 * c.c + 1.0) * dk_yz + out.integral + smoothing;
  return out;
}

QuantBoundReport quant_eagleson_bound(double dk_mu, double i_rho, double delta_rho,
                                      double norm_r, double b_n, double T,
                                      const ReferenceLaw& law,
                                      const EsseenConstant& c, double i_rho_se,
                                      std::size_t rho) {
  if (T < 1.0)
    throw std::invalid_argument("quant_eagleson_bound: T >= 1 required (ln T >= 0)");
  if (dk_mu < 0.0 || i_rho < 0.0 || delta_rho < 0.0 || norm_r < 0.0)
    throw std::invalid_argument("quant_eagleson_bound: inputs must be >= 0");
  if (!(b_n > 0.0))
    throw std::invalid_argument("quant_eagleson_bound: b_n must be > 0");
  QuantBoundReport r;
  r.main = (4.0 * c.c + 1.0) * dk_mu;
  r.translation = 2.0 * T * i_rho / b_n;
  r.mixing = 2.0 * delta_rho * norm_r * std::log(T);
  r.smoothing = 2.0 * law.density_sup * c.c * c.c / T;
  r.total = r.main + r.translation + r.mixing + r.smoothing;
  r.total_se = 2.0 * T * i_rho_se / b_n;
  r.dk_mu = dk_mu;
  r.i_rho = i_rho;
  r.i_rho_se = i_rho_se;
  r.delta_rho = delta_rho;
  r.norm_r = norm_r;
  r.b_n = b_n;
  r.T = T;
  r.rho = rho;
  return r;
}

double recentering_bound(double dk_centered_by_mu, double mean_gap, double b_n,
                         const ReferenceLaw& law) {
  if (dk_centered_by_mu < 0.0 || mean_gap < 0.0)
    throw std::invalid_argument("recentering_bound: inputs must be >= 0");
  if (!(b_n > 0.0)) throw std::invalid_argument("recentering_bound: b_n must be > 0");
  return 3.0 * dk_centered_by_mu +
         (1.0 + 4.0 * law.density_sup) * mean_gap / b_n;
}

SelectedT select_T(double linear_coeff, double inverse_coeff, double T_max) {
  if (linear_coeff < 0.0 || inverse_coeff < 0.0)
    throw std::invalid_argument("select_T: coefficients must be >= 0");
  if (T_max < 1.0) throw std::invalid_argument("select_T: T_max must be >= 1");
  SelectedT out;
  if (linear_coeff == 0.0 && inverse_coeff == 0.0) {
    out.T = 1.0;
    out.degenerate = true;
  } else if (linear_coeff == 0.0) {
    out.T = T_max;
    out.clamped = true;
  } else {
    const double unclamped = std::sqrt(inverse_coeff / linear_coeff);
    out.T = std::clamp(unclamped, 1.0, T_max);
    out.clamped = out.T != unclamped;
  }
  out.objective = linear_coeff * out.T + inverse_coeff / out.T;
  return out;
}

std::vector<BlockingPoint> blocking_schedule(
    const std::function<double(std::size_t)>& c_values,
    const std::function<double(std::size_t)>& b_values,
    const std::vector<std::size_t>& n_list) {
  std::vector<BlockingPoint> out;
  out.reserve(n_list.size());
  for (std::size_t n : n_list) {
    if (n < 2) throw std::invalid_argument("blocking_schedule: n must be >= 2");
    const double b = b_values(n);
    const double cap = std::sqrt(b);
    BlockingPoint pt;
    pt.n = n;
    double running = 0.0;
    bool found = false;
    double c_at_a = 0.0;
    for (std::size_t a = 0; a <= n - 1; ++a) {
      running = std::max(running, c_values(a));
      if (running <= cap) {
        pt.a_n = a;
        c_at_a = running;
        found = true;
      }
      // running max is nondecreasing: once above the cap it stays above
      if (running > cap) break;
    }
    if (!found) {
      pt.a_n = 1;
      pt.saturated = true;
      c_at_a = std::max(c_values(0), c_values(1));
    }
    pt.ratio = c_at_a / b;
    out.push_back(pt);
  }
  return out;
}

}  // namespace eagleson
