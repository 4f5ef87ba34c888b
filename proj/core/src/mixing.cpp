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
#include "eagleson/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "eagleson/parallel.hpp"
#include "eagleson/rng.hpp"

namespace eagleson {

namespace {
constexpr double kAlphaMax = 0.25;
constexpr std::size_t kAtomCap = 1u << 14;
constexpr std::size_t kSubsetEnumAtomCap = 14;  // 2^14 subsets
}  // namespace

MixingProfile MixingProfile::exact_array(std::vector<double> values, NormSpec norm,
                                         Provenance provenance) {
  for (double v : values)
    if (v < 0.0) throw std::invalid_argument("MixingProfile: negative delta");
  MixingProfile p;
  p.form_ = Form::ExactArray;
  p.provenance_ = provenance;
  p.norm_class_ = norm;
  p.values_ = std::move(values);
  if (p.values_.empty()) throw std::invalid_argument("MixingProfile: empty array");
  return p;
}

MixingProfile MixingProfile::geometric(double c1, double lambda, NormSpec norm,
                                       Provenance provenance) {
  if (c1 < 0.0 || lambda < 0.0)
    throw std::invalid_argument("MixingProfile: negative parameters");
  MixingProfile p;
  p.form_ = Form::Geometric;
  p.provenance_ = provenance;
  p.norm_class_ = norm;
  p.c1_ = c1;
  p.rate_ = lambda;
  return p;
}

MixingProfile MixingProfile::polynomial(double c1, double theta, NormSpec norm,
                                        Provenance provenance) {
  if (c1 < 0.0) throw std::invalid_argument("MixingProfile: negative parameters");
  MixingProfile p;
  p.form_ = Form::Polynomial;
  p.provenance_ = provenance;
  p.norm_class_ = norm;
  p.c1_ = c1;
  p.rate_ = theta;
  return p;
}

double MixingProfile::value(std::size_t n) const {
  switch (form_) {
    case Form::ExactArray:
      if (n >= values_.size())
        throw std::out_of_range("MixingProfile: index beyond stored array");
      return values_[n];
    case Form::Geometric:
      return c1_ * std::pow(rate_, static_cast<double>(n));
    case Form::Polynomial:
      return c1_ * std::pow(static_cast<double>(n) + 1.0, -rate_);
  }
  return 0.0;
}

std::size_t MixingProfile::max_index() const {
  if (form_ == Form::ExactArray) return values_.size() - 1;
  return static_cast<std::size_t>(-1);
}

bool MixingProfile::decay_certified() const {
  switch (form_) {
    case Form::Geometric:
      return rate_ < 1.0;
    case Form::Polynomial:
      return rate_ > 0.0;
    case Form::ExactArray: {
      const double head = values_.front();
      const double tail = values_.back();
      return tail <= std::max(0.1 * head, 1e-9);
    }
  }
  return false;
}

MixingProfile delta_profile_expanding(const SequentialExpandingMap& map,
                                      std::size_t up_to) {
  std::vector<double> vals(up_to + 1);
  double prod = 1.0;
  vals[0] = 1.0;
  for (std::size_t n = 1; n <= up_to; ++n) {
    prod /= static_cast<double>(map.slope(n - 1));
    vals[n] = prod;  // underflows to 0 for very large n, which is fine in sums
  }
  return MixingProfile::exact_array(std::move(vals), NormSpec::total_variation(),
                                    MixingProfile::Provenance::Analytic);
}

double AlphaProfile::value(std::size_t n) const {
  if (n >= values.size())
    throw std::out_of_range("AlphaProfile: index beyond stored array");
  return values[n];
}

ApproximationProfile ApproximationProfile::zero() {
  return {[](std::size_t) { return 0.0; }};
}

ApproximationProfile ApproximationProfile::exact_array(std::vector<double> vals) {
  return {[v = std::move(vals)](std::size_t n) {
    if (n >= v.size())
      throw std::out_of_range("ApproximationProfile: index beyond stored array");
    return v[n];
  }};
}

namespace {

// Enumerates state tuples of the given length as an odometer; calls fn with
// the tuple.
template <typename Fn>
void for_each_tuple(std::size_t states, std::size_t length, Fn&& fn) {
  std::vector<std::size_t> tuple(length, 0);
  for (;;) {
    fn(tuple);
    std::size_t pos = 0;
    while (pos < length && ++tuple[pos] == states) {
      tuple[pos] = 0;
      ++pos;
    }
    if (pos == length) return;
  }
}

std::vector<double> matrix_window_product(const InhomogeneousMarkovChain& chain,
                                          std::size_t start, std::size_t steps) {
  const std::size_t s = chain.state_count();
  std::vector<double> prod(s * s, 0.0);
  for (std::size_t i = 0; i < s; ++i) prod[i * s + i] = 1.0;
  std::vector<double> next(s * s);
  for (std::size_t step = 0; step < steps; ++step) {
    const auto& m = chain.matrix(start + step);
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t r = 0; r < s; ++r)
      for (std::size_t k = 0; k < s; ++k) {
        const double v = prod[r * s + k];
        if (v == 0.0) continue;
        for (std::size_t c = 0; c < s; ++c) next[r * s + c] += v * m[k * s + c];
      }
    prod.swap(next);
  }
  return prod;
}

struct EventSpace {
  std::vector<double> past_prob;             // P(a)
  std::vector<double> future_prob;           // P(b)
  std::vector<std::vector<double>> joint;    // joint[b][a] = P(a and b)
};

// value of the optimal past event for a fixed future event, as positive-part
// sums; covers both signs because complements flip the sign.
double best_past_value(const EventSpace& ev, const std::vector<double>& joint_b,
                       double prob_b) {
  double acc = 0.0;
  for (std::size_t a = 0; a < ev.past_prob.size(); ++a) {
    const double excess = joint_b[a] - ev.past_prob[a] * prob_b;
    if (excess > 0.0) acc += excess;
  }
  return acc;
}

EventSpace build_event_space(const InhomogeneousMarkovChain& chain, std::size_t k,
                             std::size_t n, std::size_t depth) {
  const std::size_t s = chain.state_count();
  const std::size_t past_atoms = [&] {
    std::size_t v = 1;
    for (std::size_t i = 0; i <= k; ++i) {
      v *= s;
      if (v > kAtomCap) throw std::invalid_argument("alpha_bruteforce: past atoms exceed 2^14");
    }
    return v;
  }();
  const std::size_t future_atoms = [&] {
    std::size_t v = 1;
    for (std::size_t i = 0; i <= depth; ++i) {
      v *= s;
      if (v > kAtomCap)
        throw std::invalid_argument("alpha_bruteforce: future atoms exceed 2^14");
    }
    return v;
  }();

  EventSpace ev;
  ev.past_prob.reserve(past_atoms);
  std::vector<std::size_t> past_last;
  past_last.reserve(past_atoms);
  const auto& mu0 = chain.initial();
  for_each_tuple(s, k + 1, [&](const std::vector<std::size_t>& t) {
    double p = mu0[t[0]];
    for (std::size_t i = 0; i + 1 <= k; ++i) p *= chain.prob(i, t[i], t[i + 1]);
    ev.past_prob.push_back(p);
    past_last.push_back(t[k]);
  });

  // bridge over the gap: X_k -> X_{k+n}
  const auto bridge = matrix_window_product(chain, k, n);

  std::vector<double> future_weight;  // P(b | X_{k+n} = first state of b)
  std::vector<std::size_t> future_first;
  future_weight.reserve(future_atoms);
  future_first.reserve(future_atoms);
  for_each_tuple(s, depth + 1, [&](const std::vector<std::size_t>& t) {
    double w = 1.0;
    for (std::size_t i = 0; i + 1 <= depth; ++i)
      w *= chain.prob(k + n + i, t[i], t[i + 1]);
    future_weight.push_back(w);
    future_first.push_back(t[0]);
  });

  ev.joint.assign(future_atoms, std::vector<double>(ev.past_prob.size(), 0.0));
  ev.future_prob.assign(future_atoms, 0.0);
  for (std::size_t b = 0; b < future_atoms; ++b) {
    double pb = 0.0;
    for (std::size_t a = 0; a < ev.past_prob.size(); ++a) {
      const double j =
          ev.past_prob[a] * bridge[past_last[a] * s + future_first[b]] * future_weight[b];
      ev.joint[b][a] = j;
      pb += j;
    }
    ev.future_prob[b] = pb;
  }
  return ev;
}

}  // namespace

AlphaResult alpha_bruteforce(const InhomogeneousMarkovChain& chain, std::size_t k,
                             std::size_t n, std::size_t depth,
                             bool allow_fixed_point) {
  if (n == 0) throw std::invalid_argument("alpha_bruteforce: gap must be >= 1");
  const EventSpace ev = build_event_space(chain, k, n, depth);
  const std::size_t na = ev.past_prob.size();
  const std::size_t nb = ev.future_prob.size();

  AlphaResult res;
  if (nb <= kSubsetEnumAtomCap) {
    // Gray-code walk over all future-atom subsets.
    std::vector<double> joint_acc(na, 0.0);
    double prob_acc = 0.0;
    std::size_t gray_prev = 0;
    const std::size_t total = std::size_t{1} << nb;
    for (std::size_t i = 1; i < total; ++i) {
      const std::size_t gray = i ^ (i >> 1);
      const std::size_t flipped = gray ^ gray_prev;
      std::size_t bit = 0;
      while (!((flipped >> bit) & 1u)) ++bit;
      const double sign = (gray >> bit) & 1u ? 1.0 : -1.0;
      const auto& col = ev.joint[bit];
      for (std::size_t a = 0; a < na; ++a) joint_acc[a] += sign * col[a];
      prob_acc += sign * ev.future_prob[bit];
      gray_prev = gray;
      res.value = std::max(res.value, best_past_value(ev, joint_acc, prob_acc));
    }
    res.exact = true;
  } else {
    if (!allow_fixed_point)
      throw std::invalid_argument(
          "alpha_bruteforce: subset enumeration cap exceeded and fallback not permitted");
    // Coordinate ascent between the two conditional-threshold updates,
    // started from each single future atom; certified lower bound only.
    res.exact = false;
    std::vector<char> in_b(nb, 0);
    for (std::size_t seed_atom = 0; seed_atom < nb; ++seed_atom) {
      std::fill(in_b.begin(), in_b.end(), 0);
      in_b[seed_atom] = 1;
      double best = 0.0;
      for (std::uint32_t iter = 0; iter < 64; ++iter) {
        // optimal past set for current B
        double pb = 0.0;
        std::vector<double> joint_b(na, 0.0);
        for (std::size_t b = 0; b < nb; ++b) {
          if (!in_b[b]) continue;
          pb += ev.future_prob[b];
          for (std::size_t a = 0; a < na; ++a) joint_b[a] += ev.joint[b][a];
        }
        std::vector<char> in_a(na, 0);
        double pa = 0.0;
        for (std::size_t a = 0; a < na; ++a)
          if (joint_b[a] > ev.past_prob[a] * pb) {
            in_a[a] = 1;
            pa += ev.past_prob[a];
          }
        // optimal future set for that past set
        double value = 0.0;
        bool changed = false;
        for (std::size_t b = 0; b < nb; ++b) {
          double jab = 0.0;
          for (std::size_t a = 0; a < na; ++a)
            if (in_a[a]) jab += ev.joint[b][a];
          const char keep = jab > pa * ev.future_prob[b] ? 1 : 0;
          if (keep != in_b[b]) changed = true;
          in_b[b] = keep;
          if (keep) value += jab - pa * ev.future_prob[b];
        }
        res.iterations = iter + 1;
        if (value <= best + 1e-18 && !changed) break;
        best = std::max(best, value);
      }
      res.value = std::max(res.value, best);
    }
  }

  if (res.value > kAlphaMax) {
    res.clamped = true;
    res.value = kAlphaMax;
  }
  if (res.value < 0.0) res.value = 0.0;
  return res;
}

double dobrushin_coefficient(const std::vector<double>& matrix, std::size_t states) {
  double worst = 0.0;
  for (std::size_t r1 = 0; r1 < states; ++r1)
    for (std::size_t r2 = r1 + 1; r2 < states; ++r2) {
      double l1 = 0.0;
      for (std::size_t c = 0; c < states; ++c)
        l1 += std::abs(matrix[r1 * states + c] - matrix[r2 * states + c]);
      worst = std::max(worst, l1);
    }
  return 0.5 * worst;
}

double alpha_upper_dobrushin(const InhomogeneousMarkovChain& chain, std::size_t n) {
  if (n == 0) throw std::invalid_argument("alpha_upper_dobrushin: n must be >= 1");
  const std::size_t s = chain.state_count();
  const std::size_t starts =
      chain.periodic() ? chain.matrix_count()
                       : (chain.matrix_count() >= n ? chain.matrix_count() - n + 1 : 1);
  double worst = 0.0;
  for (std::size_t start = 0; start < starts; ++start) {
    double prod = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!chain.periodic() && start + i >= chain.matrix_count()) break;
      prod *= dobrushin_coefficient(chain.matrix(start + i), s);
    }
    worst = std::max(worst, prod);
  }
  return kAlphaMax * worst;
}

MixingProfile delta_from_alpha(const AlphaProfile& alpha,
                               const ApproximationProfile& gamma, double p,
                               std::size_t up_to) {
  if (p < 1.0) throw std::invalid_argument("delta_from_alpha: p must be >= 1");
  const double exponent = std::isinf(p) ? 1.0 : 1.0 - 1.0 / p;
  std::vector<double> vals(up_to + 1);
  for (std::size_t m = 0; m <= up_to; ++m) {
    const std::size_t half = m / 2;
    vals[m] = 6.0 * std::pow(alpha.value(half), exponent) + 2.0 * gamma.values(half);
  }
  return MixingProfile::exact_array(std::move(vals), NormSpec::lp(p),
                                    MixingProfile::Provenance::Synthesized);
}

double PiecewiseLinear::operator()(double x) const {
  if (x <= knots.front()) return values.front();
  if (x >= knots.back()) return values.back();
  const auto it = std::upper_bound(knots.begin(), knots.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - knots.begin()) - 1;
  const double t = (x - knots[i]) / (knots[i + 1] - knots[i]);
  return values[i] + t * (values[i + 1] - values[i]);
}

double PiecewiseLinear::integral() const {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i)
    acc += 0.5 * (values[i] + values[i + 1]) * (knots[i + 1] - knots[i]);
  return acc;
}

double PiecewiseLinear::variation() const {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < values.size(); ++i)
    acc += std::abs(values[i + 1] - values[i]);
  return acc;
}

double pl_fourier_integral(const PiecewiseLinear& s, double freq, bool cosine) {
  const double w = kTwoPi * freq;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < s.knots.size(); ++i) {
    const double x0 = s.knots[i], x1 = s.knots[i + 1];
    if (x1 <= x0) continue;
    const double beta = (s.values[i + 1] - s.values[i]) / (x1 - x0);
    const double alpha = s.values[i] - beta * x0;
    auto antideriv = [&](double x) {
      const double sx = std::sin(w * x), cx = std::cos(w * x);
      if (cosine) return (alpha + beta * x) * sx / w + beta * cx / (w * w);
      return -(alpha + beta * x) * cx / w + beta * sx / (w * w);
    };
    acc += antideriv(x1) - antideriv(x0);
  }
  return acc;
}

double expanding_cov_exact(const SequentialExpandingMap& map,
                           const PiecewiseLinear& s, std::size_t n, double wave,
                           bool cosine) {
  double slope_product = 1.0;
  for (std::size_t j = 0; j < n; ++j) slope_product *= map.slope(j);
  const double freq = wave * slope_product;
  if (freq >= 0x1p52)
    throw std::invalid_argument("expanding_cov_exact: frequency exceeds exact range");
  // f has integer frequency, so int f dmu = 0; T_0^n x = frac(Kx) and the
  // 1-periodicity of f turns the covariance into the K*wave Fourier mode.
  return std::abs(pl_fourier_integral(s, freq, cosine));
}

McCovariance expanding_cov_mc(const SequentialExpandingMap& map,
                              const PiecewiseLinear& s, std::size_t n, double wave,
                              bool cosine, std::size_t samples, std::uint64_t seed,
                              unsigned workers) {
  const std::size_t nblocks = (samples + kParallelBlock - 1) / kParallelBlock;
  std::vector<double> block_sum(nblocks, 0.0), block_sumsq(nblocks, 0.0);
  std::vector<double> block_s(nblocks, 0.0), block_f(nblocks, 0.0);
  parallel_for_blocks(samples, workers, [&](std::size_t lo, std::size_t hi) {
    const std::size_t b = lo / kParallelBlock;
    double acc = 0.0, accsq = 0.0, acc_s = 0.0, acc_f = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      SplitMix64 rng = trajectory_stream(seed, i);
      const double x0 = rng.next_double();
      const double xn = map.evolve(x0, 0, n);
      const double sv = s(x0);
      const double arg = kTwoPi * wave * xn;
      const double fv = cosine ? std::cos(arg) : std::sin(arg);
      const double prod = sv * fv;
      acc += prod;
      accsq += prod * prod;
      acc_s += sv;
      acc_f += fv;
    }
    block_sum[b] = acc;
    block_sumsq[b] = accsq;
    block_s[b] = acc_s;
    block_f[b] = acc_f;
  });
  double sum = 0.0, sumsq = 0.0, sum_s = 0.0, sum_f = 0.0;
  for (std::size_t b = 0; b < nblocks; ++b) {
    sum += block_sum[b];
    sumsq += block_sumsq[b];
    sum_s += block_s[b];
    sum_f += block_f[b];
  }
  const double nn = static_cast<double>(samples);
  const double mean = sum / nn;
  const double var = std::max(0.0, sumsq / nn - mean * mean);
  McCovariance out;
  out.estimate = std::abs(mean - (sum_s / nn) * (sum_f / nn));
  out.std_error = std::sqrt(var / nn);
  return out;
}

}  // namespace eagleson
