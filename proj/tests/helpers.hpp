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
// Independent oracles used by the unit and acceptance suites. Everything here
// is deliberately brute-force (full enumeration, quadratic scans, series
// expansions) and never calls the implementation path it checks.
#ifndef EAGLESON_TESTS_HELPERS_HPP
#define EAGLESON_TESTS_HELPERS_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "eagleson/mixing.hpp"
#include "eagleson/models.hpp"
#include "eagleson/rng.hpp"

namespace eagleson::testing {

// ---------------------------------------------------------------------------
// series oracles

/// Maclaurin series of Si(z) = int_0^z sin x / x dx; converges fast for
/// moderate z.
inline double si_series(double z) {
  double term = z;  // (-1)^k z^{2k+1} / (2k+1)!
  double sum = z;
  for (int k = 1; k < 60; ++k) {
    term *= -z * z / ((2.0 * k) * (2.0 * k + 1.0));
    sum += term / (2.0 * k + 1.0);
    if (std::abs(term) < 1e-18) break;
  }
  return sum;
}

/// int_0^u sin^2 x / x^2 dx = Si(2u) - sin^2(u)/u  (integration by parts).
inline double esseen_integral_series(double u) {
  if (u == 0.0) return 0.0;
  const double s = std::sin(u);
  return si_series(2.0 * u) - s * s / u;
}

// ---------------------------------------------------------------------------
// chain path enumeration

/// Streams every length-(n+1) state path with its probability, in
/// lexicographic order (no materialization). Initial weights may be tilted.
template <typename Fn>
void for_each_path(const InhomogeneousMarkovChain& chain, std::size_t n,
                   const DensityTilt* tilt, Fn&& fn) {
  const std::size_t s = chain.state_count();
  std::vector<std::size_t> cur(n + 1, 0);
  for (;;) {
    double p = chain.initial()[cur[0]];
    if (tilt) p *= (*tilt)(static_cast<double>(cur[0]));
    for (std::size_t j = 0; j < n; ++j) p *= chain.prob(j, cur[j], cur[j + 1]);
    fn(cur, p);
    std::size_t pos = n + 1;
    while (pos > 0 && ++cur[pos - 1] == s) {
      cur[pos - 1] = 0;
      --pos;
    }
    if (pos == 0) return;
  }
}

inline double path_sum(const ObservableSequence& obs,
                       const std::vector<std::size_t>& states, std::size_t n) {
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    acc += obs.eval1(j, static_cast<double>(states[j]));
  return acc;
}

/// E[e^{itS_n}] (or mu(r e^{itS_n})) by full path enumeration.
inline std::complex<double> cf_enumeration(const InhomogeneousMarkovChain& chain,
                                           const ObservableSequence& obs,
                                           const DensityTilt* tilt, std::size_t n,
                                           double t) {
  std::complex<double> acc(0.0, 0.0);
  for_each_path(chain, n, tilt,
                [&](const std::vector<std::size_t>& states, double p) {
                  acc += p * std::polar(1.0, t * path_sum(obs, states, n));
                });
  return acc;
}

struct EnumMoments {
  double mean = 0.0;
  double second = 0.0;
  double variance = 0.0;
};

inline EnumMoments moments_enumeration(const InhomogeneousMarkovChain& chain,
                                       const ObservableSequence& obs,
                                       const DensityTilt* tilt, std::size_t n) {
  EnumMoments m;
  for_each_path(chain, n, tilt,
                [&](const std::vector<std::size_t>& states, double p) {
                  const double v = path_sum(obs, states, n);
                  m.mean += p * v;
                  m.second += p * v * v;
                });
  m.variance = m.second - m.mean * m.mean;
  return m;
}

// ---------------------------------------------------------------------------
// alpha oracle: enumerate *all* event pairs

/// alpha(F_{0,k}, F_{k+n,k+n+depth}) by enumerating every pair of events
/// (subsets of past atoms x subsets of future atoms). Exponential; keep the
/// atom counts small. Atom probabilities are accumulated in ascending atom
/// order so dyadic instances match the implementation bit for bit.
inline double alpha_enumeration(const InhomogeneousMarkovChain& chain, std::size_t k,
                                std::size_t n, std::size_t depth) {
  const std::size_t s = chain.state_count();
  const std::size_t total = k + n + depth;

  std::size_t past_atoms = 1, future_atoms = 1;
  for (std::size_t i = 0; i <= k; ++i) past_atoms *= s;
  for (std::size_t i = 0; i <= depth; ++i) future_atoms *= s;

  // joint over (past atom, future atom)
  std::vector<double> joint(past_atoms * future_atoms, 0.0);
  for_each_path(chain, total, nullptr,
                [&](const std::vector<std::size_t>& states, double p) {
                  std::size_t a = 0, b = 0;
                  for (std::size_t i = 0; i <= k; ++i) a = a * s + states[i];
                  for (std::size_t i = 0; i <= depth; ++i)
                    b = b * s + states[k + n + i];
                  joint[a * future_atoms + b] += p;
                });
  std::vector<double> pa(past_atoms, 0.0), pb(future_atoms, 0.0);
  for (std::size_t a = 0; a < past_atoms; ++a)
    for (std::size_t b = 0; b < future_atoms; ++b) pa[a] += joint[a * future_atoms + b];
  for (std::size_t b = 0; b < future_atoms; ++b)
    for (std::size_t a = 0; a < past_atoms; ++a) pb[b] += joint[a * future_atoms + b];

  double best = 0.0;
  for (std::size_t bs = 1; bs < (std::size_t{1} << future_atoms); ++bs) {
    for (std::size_t as = 1; as < (std::size_t{1} << past_atoms); ++as) {
      double p_ab = 0.0, p_a = 0.0, p_b = 0.0;
      for (std::size_t a = 0; a < past_atoms; ++a) {
        if (!((as >> a) & 1u)) continue;
        p_a += pa[a];
        for (std::size_t b = 0; b < future_atoms; ++b)
          if ((bs >> b) & 1u) p_ab += joint[a * future_atoms + b];
      }
      for (std::size_t b = 0; b < future_atoms; ++b)
        if ((bs >> b) & 1u) p_b += pb[b];
      best = std::max(best, std::abs(p_ab - p_a * p_b));
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Kolmogorov distance oracles (quadratic, definition-direct)

inline double ks_two_sample_oracle(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const std::int64_t n = static_cast<std::int64_t>(a.size());
  const std::int64_t m = static_cast<std::int64_t>(b.size());
  std::vector<double> points = a;
  points.insert(points.end(), b.begin(), b.end());
  std::uint64_t best = 0;
  for (double t : points) {
    std::int64_t i = 0, j = 0;
    for (double x : a)
      if (x <= t) ++i;
    for (double x : b)
      if (x <= t) ++j;
    best = std::max<std::uint64_t>(best, static_cast<std::uint64_t>(std::abs(i * m - j * n)));
  }
  return static_cast<double>(best) / (static_cast<double>(n) * static_cast<double>(m));
}

inline double ks_one_sample_oracle(std::vector<double> sample,
                                   const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double best = 0.0;
  for (double t : sample) {
    std::size_t le = 0, lt = 0;
    for (double x : sample) {
      if (x <= t) ++le;
      if (x < t) ++lt;
    }
    const double f = cdf(t);
    best = std::max(best, std::abs(static_cast<double>(le) / n - f));
    best = std::max(best, std::abs(static_cast<double>(lt) / n - f));
  }
  return best;
}

// ---------------------------------------------------------------------------
// grid search oracle for the truncation-level optimizer

/// min over M in {2^-10 .. 2^10} at 1% multiplicative resolution of
/// delta M + K M^(-beta).
inline double level_grid_search(double delta, double coeff, double beta) {
  double best = std::numeric_limits<double>::infinity();
  for (double m = 0x1p-10; m <= 0x1p10; m *= 1.01)
    best = std::min(best, delta * m + coeff * std::pow(m, -beta));
  return best;
}

// ---------------------------------------------------------------------------
// cadlag modulus oracle: explicit partition enumeration

/// Recursively enumerates every delta-sparse partition of the grid and takes
/// the minimal max-oscillation. Same interval convention as the
/// implementation: [t_i, t_j), last interval closed.
inline double modulus_partition_oracle(const std::vector<double>& times,
                                       const std::vector<double>& values,
                                       double delta) {
  const std::size_t g = times.size();
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> cuts = {0};
  const std::function<void()> recurse = [&] {
    const std::size_t last = cuts.back();
    if (last == g - 1) {
      double worst = 0.0;
      for (std::size_t ci = 0; ci + 1 < cuts.size(); ++ci) {
        const std::size_t lo = cuts[ci];
        const std::size_t hi_excl = cuts[ci + 1];
        const bool final_interval = hi_excl == g - 1;
        double mn = values[lo], mx = values[lo];
        for (std::size_t p = lo; p <= (final_interval ? hi_excl : hi_excl - 1); ++p) {
          mn = std::min(mn, values[p]);
          mx = std::max(mx, values[p]);
        }
        worst = std::max(worst, mx - mn);
      }
      best = std::min(best, worst);
      return;
    }
    for (std::size_t next = last + 1; next < g; ++next) {
      if (!(times[next] - times[last] > delta)) continue;
      cuts.push_back(next);
      recurse();
      cuts.pop_back();
    }
  };
  recurse();
  if (best == std::numeric_limits<double>::infinity()) {
    double mn = values[0], mx = values[0];
    for (double v : values) {
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
    return mx - mn;
  }
  return best;
}

// ---------------------------------------------------------------------------
// random instance generators (fixed seeds, hand-rolled)

inline InhomogeneousMarkovChain random_two_state_chain(std::uint64_t seed,
                                                       bool dyadic = false) {
  SplitMix64 rng(seed);
  auto u = [&] {
    if (!dyadic) return 0.05 + 0.9 * rng.next_double();
    return (1.0 + static_cast<double>(rng.next_u64() % 14)) / 16.0;
  };
  const double p = u(), q = u(), m0 = u();
  return InhomogeneousMarkovChain(2, {{p, 1.0 - p, q, 1.0 - q}}, true,
                                  {m0, 1.0 - m0});
}

inline PiecewiseLinear random_unit_density_pl(std::uint64_t seed, int segments) {
  SplitMix64 rng(seed);
  PiecewiseLinear s;
  s.knots.push_back(0.0);
  for (int i = 1; i < segments; ++i) s.knots.push_back(rng.next_double());
  s.knots.push_back(1.0);
  std::sort(s.knots.begin(), s.knots.end());
  // enforce distinct knots
  for (std::size_t i = 1; i < s.knots.size(); ++i)
    if (s.knots[i] - s.knots[i - 1] < 1e-4) s.knots[i] = s.knots[i - 1] + 1e-4;
  s.knots.back() = 1.0;
  s.values.clear();
  for (std::size_t i = 0; i < s.knots.size(); ++i)
    s.values.push_back(0.1 + 2.0 * rng.next_double());
  const double mass = s.integral();
  for (auto& v : s.values) v /= mass;
  return s;
}

}  // namespace eagleson::testing

#endif  // EAGLESON_TESTS_HELPERS_HPP
