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
#include "eagleson/sums.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "eagleson/parallel.hpp"
#include "eagleson/rng.hpp"

namespace eagleson {

namespace {

bool strictly_increasing(const std::vector<std::size_t>& v) {
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    if (v[i + 1] <= v[i]) return false;
  return true;
}

}  // namespace

std::vector<PartialSumSample> partial_sums(const TrajectoryBatch& batch,
                                           const ObservableSequence& obs,
                                           const std::vector<std::size_t>& n_list,
                                           unsigned workers) {
  if (n_list.empty()) throw std::invalid_argument("partial_sums: empty n_list");
  for (std::size_t n : n_list)
    if (n > batch.length)
      throw std::out_of_range("partial_sums: n exceeds batch length");

  const int d = obs.dimension();
  std::vector<PartialSumSample> out(n_list.size());
  for (std::size_t s = 0; s < n_list.size(); ++s) {
    out[s].count = batch.count;
    out[s].dimension = d;
    out[s].n = n_list[s];
    out[s].measure = batch.measure;
    out[s].values.resize(batch.count * d);
  }

  // slices may come in any order; walk them sorted
  std::vector<std::size_t> order(n_list.size());
  for (std::size_t s = 0; s < order.size(); ++s) order[s] = s;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return n_list[a] < n_list[b]; });

  const std::size_t n_max = *std::max_element(n_list.begin(), n_list.end());
  parallel_for_blocks(batch.count, workers, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> acc(d), g(d);
    for (std::size_t i = lo; i < hi; ++i) {
      std::fill(acc.begin(), acc.end(), 0.0);
      std::size_t slice = 0;
      for (std::size_t j = 0; j <= n_max; ++j) {
        while (slice < order.size() && n_list[order[slice]] == j) {
          for (int c = 0; c < d; ++c) out[order[slice]].values[i * d + c] = acc[c];
          ++slice;
        }
        if (j == n_max) break;
        obs.eval(j, batch.at(i, j), g.data());
        for (int c = 0; c < d; ++c) acc[c] += g[c];
      }
    }
  });
  return out;
}

PartialSumSample center_and_normalize(const PartialSumSample& sample,
                                      const std::vector<double>& centering_values,
                                      double b, Centering tag) {
  if (!(b > 0.0)) throw std::invalid_argument("center_and_normalize: b must be > 0");
  if (centering_values.size() != static_cast<std::size_t>(sample.dimension))
    throw std::invalid_argument("center_and_normalize: centering dimension mismatch");
  for (double c : centering_values)
    if (!std::isfinite(c))
      throw std::invalid_argument("center_and_normalize: non-finite centering");
  PartialSumSample out = sample;
  out.centering = tag;
  out.normalizer = sample.normalizer * b;
  const int d = sample.dimension;
  for (std::size_t i = 0; i < sample.count; ++i)
    for (int c = 0; c < d; ++c)
      out.values[i * d + c] = (sample.values[i * d + c] - centering_values[c]) / b;
  return out;
}

PartialSumSample PrefixSumBatch::extract(std::size_t cut_index) const {
  if (cut_index >= cuts.size())
    throw std::out_of_range("PrefixSumBatch: cut index out of range");
  PartialSumSample s;
  s.count = count;
  s.dimension = dimension;
  s.n = cuts[cut_index];
  s.measure = measure;
  s.values.resize(count * dimension);
  for (std::size_t i = 0; i < count; ++i)
    for (int c = 0; c < dimension; ++c)
      s.values[i * dimension + c] = sum_at(i, cut_index, c);
  return s;
}

namespace {

// Hot path: scalar map observables with the trig call inlined per step.
// The trajectory is drawn backward into a scratch buffer (see models.hpp),
// then summed in ascending j so the slices match partial_sums bit for bit.
template <typename StepObs>
void map_prefix_scan(const SequentialExpandingMap& map, const DensityTilt* nu_tilt,
                     const std::vector<std::size_t>& cuts, std::uint64_t master_seed,
                     std::size_t lo, std::size_t hi, PrefixSumBatch& out,
                     std::vector<double>& scratch, StepObs&& step_obs) {
  const std::size_t n_max = cuts.back();
  const std::size_t ncuts = cuts.size();
  const std::size_t path_len = std::max<std::size_t>(n_max, 1);
  scratch.resize(path_len);
  for (std::size_t i = lo; i < hi; ++i) {
    SplitMix64 rng = trajectory_stream(master_seed, i);
    detail::map_path_sample(map, rng, nu_tilt, path_len, scratch.data());
    out.initial[i] = scratch[0];
    double acc = 0.0;
    std::size_t slice = 0;
    double* row = out.sums.data() + i * ncuts;
    for (std::size_t j = 0;; ++j) {
      while (slice < ncuts && cuts[slice] == j) row[slice++] = acc;
      if (j == n_max) break;
      acc += step_obs(scratch[j]);
    }
  }
}

}  // namespace

PrefixSumBatch sample_prefix_sums(const ProcessModel& model,
                                  const ObservableSequence& obs,
                                  const DensityTilt* tilt, MeasureTag measure,
                                  std::size_t count,
                                  const std::vector<std::size_t>& cuts,
                                  std::uint64_t master_seed, unsigned workers) {
  if (cuts.empty() || !strictly_increasing(cuts))
    throw std::invalid_argument("sample_prefix_sums: cuts must be strictly increasing");
  if (count == 0) throw std::invalid_argument("sample_prefix_sums: count must be >= 1");
  const int d = obs.dimension();

  PrefixSumBatch out;
  out.cuts = cuts;
  out.count = count;
  out.dimension = d;
  out.measure = measure;
  out.master_seed = master_seed;
  out.sums.resize(count * cuts.size() * d);
  out.initial.resize(count);

  if (std::holds_alternative<SequentialExpandingMap>(model)) {
    const auto& map = std::get<SequentialExpandingMap>(model);
    if (cuts.back() > 0 && cuts.back() - 1 > map.horizon())
      throw std::invalid_argument("sample_prefix_sums: cut beyond slope horizon");
    const DensityTilt* nu_tilt = measure == MeasureTag::Nu ? tilt : nullptr;
    if (measure == MeasureTag::Nu) require_nu_tilt(tilt, /*is_map=*/true);
    using Kind = ObservableSequence::Kind;
    const Kind kind = obs.kind();
    parallel_for_blocks(count, workers, [&](std::size_t lo, std::size_t hi) {
      std::vector<double> scratch;
      if (d == 1 && kind == Kind::MapCos2Pi) {
        map_prefix_scan(map, nu_tilt, cuts, master_seed, lo, hi, out, scratch,
                        [](double x) { return std::cos(kTwoPi * x); });
      } else if (d == 1 && kind == Kind::MapSin2Pi) {
        map_prefix_scan(map, nu_tilt, cuts, master_seed, lo, hi, out, scratch,
                        [](double x) { return std::sin(kTwoPi * x); });
      } else if (d == 1 && kind == Kind::MapCenteredX) {
        map_prefix_scan(map, nu_tilt, cuts, master_seed, lo, hi, out, scratch,
                        [](double x) { return x - 0.5; });
      } else {
        const std::size_t n_max = cuts.back();
        const std::size_t path_len = std::max<std::size_t>(n_max, 1);
        scratch.resize(path_len);
        std::vector<double> acc(d), g(d);
        for (std::size_t i = lo; i < hi; ++i) {
          SplitMix64 rng = trajectory_stream(master_seed, i);
          detail::map_path_sample(map, rng, nu_tilt, path_len, scratch.data());
          out.initial[i] = scratch[0];
          std::fill(acc.begin(), acc.end(), 0.0);
          std::size_t slice = 0;
          for (std::size_t j = 0;; ++j) {
            while (slice < cuts.size() && cuts[slice] == j) {
              for (int c = 0; c < d; ++c)
                out.sums[(i * cuts.size() + slice) * d + c] = acc[c];
              ++slice;
            }
            if (j == n_max) break;
            obs.eval(j, scratch[j], g.data());
            for (int c = 0; c < d; ++c) acc[c] += g[c];
          }
        }
      }
    });
  } else {
    const auto& chain = std::get<InhomogeneousMarkovChain>(model);
    if (cuts.back() > 0 && cuts.back() - 1 > chain.horizon())
      throw std::invalid_argument("sample_prefix_sums: cut beyond matrix horizon");
    const InitialSampler initial(chain, measure, tilt);
    const std::size_t s = chain.state_count();
    const std::size_t n_max = cuts.back();
    parallel_for_blocks(count, workers, [&](std::size_t lo, std::size_t hi) {
      std::vector<double> acc(d), g(d);
      for (std::size_t i = lo; i < hi; ++i) {
        SplitMix64 rng = trajectory_stream(master_seed, i);
        double state = initial.draw(rng);
        out.initial[i] = state;
        std::fill(acc.begin(), acc.end(), 0.0);
        std::size_t slice = 0;
        for (std::size_t j = 0;; ++j) {
          while (slice < cuts.size() && cuts[slice] == j) {
            for (int c = 0; c < d; ++c)
              out.sums[(i * cuts.size() + slice) * d + c] = acc[c];
            ++slice;
          }
          if (j == n_max) break;
          obs.eval(j, state, g.data());
          for (int c = 0; c < d; ++c) acc[c] += g[c];
          const auto& m = chain.matrix(j);
          const auto from = static_cast<std::size_t>(state);
          const double u = rng.next_double();
          double cum = 0.0;
          std::size_t next = s - 1;
          for (std::size_t c = 0; c < s; ++c) {
            cum += m[from * s + c];
            if (u < cum) {
              next = c;
              break;
            }
          }
          state = static_cast<double>(next);
        }
      }
    });
  }
  return out;
}

void ExponentTriple::validate() const {
  auto inv = [](double p) {
    if (std::isinf(p)) return 0.0;
    if (p < 1.0) throw std::invalid_argument("exponents must be >= 1");
    return 1.0 / p;
  };
  const double sum = inv(p1) + inv(p2) + inv(p3);
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("exponent triple must satisfy 1/p1+1/p2+1/p3 = 1");
}

LevelRule LevelRule::explicit_levels(std::vector<double> levels) {
  LevelRule r;
  r.optimize = false;
  r.given = std::move(levels);
  return r;
}

LevelRule LevelRule::explicit_pair_levels(
    std::function<double(std::size_t, std::size_t)> fn) {
  LevelRule r;
  r.optimize = false;
  r.pair = std::move(fn);
  return r;
}

namespace {

// One term M*delta + K*M^(-beta), with the level chosen in closed form when
// optimizing: M* = (K beta / delta)^(1/(1+beta)).
GapCertificate::Term evaluate_term(double delta, double coeff, double beta,
                                   std::size_t k, std::size_t j, bool optimize,
                                   double given_level, bool* limiting) {
  if (delta < 0.0) throw std::invalid_argument("gap certificate: negative delta");
  GapCertificate::Term t;
  t.k = k;
  t.j = j;
  if (!optimize) {
    t.level = given_level;
    if (!(given_level > 0.0))
      throw std::invalid_argument("gap certificate: explicit level must be > 0");
    t.truncation = given_level * delta;
    t.tail = beta == 0.0 ? coeff : coeff * std::pow(given_level, -beta);
    return t;
  }
  if (delta == 0.0) {
    // M -> inf limit: truncation stays 0 and the tail vanishes (beta > 0).
    t.level_infinite = true;
    t.level = std::numeric_limits<double>::infinity();
    t.truncation = 0.0;
    t.tail = beta == 0.0 ? coeff : 0.0;
    *limiting = true;
    return t;
  }
  if (coeff == 0.0 || beta == 0.0) {
    // tail independent of (or absent from) the level: M -> 0 limit
    t.level = 0.0;
    t.truncation = 0.0;
    t.tail = coeff;
    *limiting = true;
    return t;
  }
  const double inv = 1.0 / (1.0 + beta);
  t.level = std::pow(coeff * beta / delta, inv);
  // algebraically M* delta and K M*^(-beta); written in the form that stays
  // finite when delta is subnormal and M* overflows
  t.truncation = std::pow(coeff * beta, inv) * std::pow(delta, beta * inv);
  t.tail = t.truncation / beta;
  return t;
}

}  // namespace

GapCertificate centering_gap_certificate(const MixingProfile& delta,
                                         const std::vector<double>& moment_norms,
                                         const ExponentTriple& exponents,
                                         std::size_t n, const LevelRule& levels,
                                         double comparison_scale, bool keep_terms) {
  exponents.validate();
  if (moment_norms.size() < n)
    throw std::invalid_argument("centering_gap_certificate: missing moment norms");
  if (!levels.optimize && levels.given.size() < n)
    throw std::invalid_argument("centering_gap_certificate: missing explicit levels");
  const double beta = std::isinf(exponents.p3) ? 0.0 : exponents.p2 / exponents.p3;

  GapCertificate cert;
  cert.quantity = GapCertificate::Quantity::CenteringGap;
  cert.exponents = exponents;
  cert.comparison_scale = comparison_scale;
  for (std::size_t j = 0; j < n; ++j) {
    const double K = std::pow(moment_norms[j], 1.0 + beta);
    auto term = evaluate_term(delta.value(j), K, beta, j, j, levels.optimize,
                              levels.optimize ? 0.0 : levels.given[j],
                              &cert.limiting_level);
    cert.truncation_total += term.truncation;
    cert.tail_total += term.tail;
    if (keep_terms) cert.terms.push_back(term);
  }
  cert.total = cert.truncation_total + cert.tail_total;
  return cert;
}

GapCertificate variance_gap_certificate(
    const MixingProfile& delta,
    const std::function<double(std::size_t, std::size_t)>& pair_norms,
    const ExponentTriple& exponents, double norm_r, double norm_r_plus_one_s1,
    std::size_t n, const LevelRule& levels, double comparison_scale,
    bool keep_terms) {
  exponents.validate();
  if (norm_r < 0.0 || norm_r_plus_one_s1 < 0.0)
    throw std::invalid_argument("variance_gap_certificate: negative norms");
  const double beta = std::isinf(exponents.p3) ? 0.0 : exponents.p2 / exponents.p3;

  GapCertificate cert;
  cert.quantity = GapCertificate::Quantity::VarianceGap;
  cert.exponents = exponents;
  cert.comparison_scale = comparison_scale;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k <= j; ++k) {
      const double a = norm_r * delta.value(k);
      const double coeff =
          norm_r_plus_one_s1 * std::pow(pair_norms(k, j), 1.0 + beta);
      auto term = evaluate_term(a, coeff, beta, k, j, levels.optimize,
                                levels.optimize ? 0.0 : levels.pair(k, j),
                                &cert.limiting_level);
      cert.truncation_total += term.truncation;
      cert.tail_total += term.tail;
      if (keep_terms) cert.terms.push_back(term);
    }
  }
  cert.total = cert.truncation_total + cert.tail_total;
  return cert;
}

double sample_mean(const PartialSumSample& sample, int c) {
  double acc = 0.0;
  for (std::size_t i = 0; i < sample.count; ++i) acc += sample.at(i, c);
  return acc / static_cast<double>(sample.count);
}

double sample_std(const PartialSumSample& sample, int c) {
  const double m = sample_mean(sample, c);
  double acc = 0.0;
  for (std::size_t i = 0; i < sample.count; ++i) {
    const double dlt = sample.at(i, c) - m;
    acc += dlt * dlt;
  }
  return std::sqrt(acc / static_cast<double>(sample.count - 1));
}

namespace {

struct MomentSums {
  double s1 = 0.0, s2 = 0.0;
  std::size_t n = 0;
};

MomentSums column_sums(const PartialSumSample& s, int c) {
  MomentSums m;
  m.n = s.count;
  for (std::size_t i = 0; i < s.count; ++i) {
    const double v = s.at(i, c);
    m.s1 += v;
    m.s2 += v * v;
  }
  return m;
}

// Jackknife standard error of the sample standard deviation via leave-one-out
// closed forms on the running sums.
double jackknife_se_std(const PartialSumSample& s, int c) {
  const MomentSums m = column_sums(s, c);
  const double nn = static_cast<double>(m.n);
  std::vector<double> loo(m.n);
  double mean_loo = 0.0;
  for (std::size_t i = 0; i < m.n; ++i) {
    const double x = s.at(i, c);
    const double mu = (m.s1 - x) / (nn - 1.0);
    const double ss = m.s2 - x * x - (nn - 1.0) * mu * mu;
    loo[i] = std::sqrt(std::max(0.0, ss / (nn - 2.0)));
    mean_loo += loo[i];
  }
  mean_loo /= nn;
  double acc = 0.0;
  for (double v : loo) acc += (v - mean_loo) * (v - mean_loo);
  return std::sqrt((nn - 1.0) / nn * acc);
}

}  // namespace

EmpiricalGap empirical_gap(const PartialSumSample& sample_mu,
                           const PartialSumSample& sample_nu) {
  if (sample_mu.n != sample_nu.n)
    throw std::invalid_argument("empirical_gap: samples at different n");
  if (sample_mu.dimension != sample_nu.dimension)
    throw std::invalid_argument("empirical_gap: dimension mismatch");
  const int d = sample_mu.dimension;

  EmpiricalGap out;
  double gap2 = 0.0, se2 = 0.0;
  for (int c = 0; c < d; ++c) {
    const double dm = sample_mean(sample_nu, c) - sample_mean(sample_mu, c);
    gap2 += dm * dm;
    const double vmu = sample_std(sample_mu, c);
    const double vnu = sample_std(sample_nu, c);
    se2 += vmu * vmu / static_cast<double>(sample_mu.count) +
           vnu * vnu / static_cast<double>(sample_nu.count);
  }
  out.mean_gap = std::sqrt(gap2);
  out.mean_gap_se = std::sqrt(se2);

  if (d == 1) {
    out.b_mu = sample_std(sample_mu, 0);
    out.b_nu = sample_std(sample_nu, 0);
    double scale = 0.0;
    const double mmu = sample_mean(sample_mu, 0);
    for (std::size_t i = 0; i < sample_mu.count; ++i)
      scale = std::max(scale, std::abs(sample_mu.at(i) - mmu));
    if (sample_mu.count < 3 || sample_nu.count < 3 ||
        out.b_mu * out.b_mu <= 1e-14 * std::max(1.0, scale * scale)) {
      out.degenerate = true;
      out.std_ratio = std::numeric_limits<double>::quiet_NaN();
    } else {
      out.std_ratio = out.b_nu / out.b_mu;
      const double se_mu = jackknife_se_std(sample_mu, 0);
      const double se_nu = jackknife_se_std(sample_nu, 0);
      // independent samples: first-order error propagation on the ratio
      out.std_ratio_se = std::abs(out.std_ratio) *
                         std::sqrt(se_nu * se_nu / (out.b_nu * out.b_nu) +
                                   se_mu * se_mu / (out.b_mu * out.b_mu));
    }
  }
  return out;
}

std::vector<double> chain_moment_norms(const InhomogeneousMarkovChain& chain,
                                       const ObservableSequence& obs, double p,
                                       std::size_t n) {
  if (obs.dimension() != 1)
    throw std::invalid_argument("chain_moment_norms: scalar observables only");
  std::vector<double> out(n);
  std::vector<double> dist = chain.initial();
  for (std::size_t j = 0; j < n; ++j) {
    if (j > 0) dist = chain.marginal_from(dist, j - 1, 1);
    double acc = 0.0;
    double sup = 0.0;
    for (std::size_t s = 0; s < chain.state_count(); ++s) {
      const double g = obs.eval1(j, static_cast<double>(s));
      if (std::isinf(p)) {
        if (dist[s] > 0.0) sup = std::max(sup, std::abs(g));
      } else {
        acc += dist[s] * std::pow(std::abs(g), p);
      }
    }
    out[j] = std::isinf(p) ? sup : std::pow(acc, 1.0 / p);
  }
  return out;
}

}  // namespace eagleson
