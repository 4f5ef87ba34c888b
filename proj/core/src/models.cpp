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
#include "eagleson/models.hpp"

#include <algorithm>
#include <cmath>

#include "eagleson/parallel.hpp"
#include "eagleson/quadrature.hpp"
#include "eagleson/rng.hpp"

namespace eagleson {

namespace {
constexpr double kRowSumTol = 1e-12;
constexpr double kIntegralTol = 1e-10;
constexpr std::uint64_t kProbeSeed = UINT64_C(0x5EED0FDE9157BEEF);
constexpr std::size_t kEquispacedProbes = 4096;  // 2^12
constexpr std::size_t kRandomProbes = 1024;      // 2^10
}  // namespace

SequentialExpandingMap::SequentialExpandingMap(std::vector<int> slopes,
                                               bool periodic)
    : slopes_(std::move(slopes)), periodic_(periodic) {
  if (slopes_.empty())
    throw std::invalid_argument("SequentialExpandingMap: empty slope list");
  inv_slopes_.reserve(slopes_.size());
  for (int k : slopes_) {
    if (k < 2)
      throw std::invalid_argument("SequentialExpandingMap: every slope must be >= 2");
    inv_slopes_.push_back(1.0 / static_cast<double>(k));
  }
}

InhomogeneousMarkovChain::InhomogeneousMarkovChain(
    std::size_t state_count, std::vector<std::vector<double>> matrices,
    bool periodic, std::vector<double> initial)
    : state_count_(state_count),
      matrices_(std::move(matrices)),
      periodic_(periodic),
      initial_(std::move(initial)) {
  if (state_count_ == 0)
    throw std::invalid_argument("InhomogeneousMarkovChain: state_count must be positive");
  if (matrices_.empty())
    throw std::invalid_argument("InhomogeneousMarkovChain: empty matrix list");
  for (const auto& m : matrices_) {
    if (m.size() != state_count_ * state_count_)
      throw std::invalid_argument("InhomogeneousMarkovChain: matrix size mismatch");
    for (std::size_t r = 0; r < state_count_; ++r) {
      double sum = 0.0;
      for (std::size_t c = 0; c < state_count_; ++c) {
        const double v = m[r * state_count_ + c];
        if (v < 0.0)
          throw std::invalid_argument("InhomogeneousMarkovChain: negative entry");
        sum += v;
      }
      if (std::abs(sum - 1.0) > kRowSumTol)
        throw std::invalid_argument("InhomogeneousMarkovChain: row sum " +
                                    std::to_string(sum) + " not 1 within 1e-12");
    }
  }
  if (initial_.size() != state_count_)
    throw std::invalid_argument("InhomogeneousMarkovChain: initial size mismatch");
  double s0 = 0.0;
  for (double v : initial_) {
    if (v < 0.0)
      throw std::invalid_argument("InhomogeneousMarkovChain: negative initial mass");
    s0 += v;
  }
  if (std::abs(s0 - 1.0) > kRowSumTol)
    throw std::invalid_argument("InhomogeneousMarkovChain: initial sums to " +
                                std::to_string(s0));
}

std::vector<double> InhomogeneousMarkovChain::marginal_from(
    std::vector<double> dist, std::size_t start, std::size_t steps) const {
  std::vector<double> next(state_count_);
  for (std::size_t i = 0; i < steps; ++i) {
    const auto& m = matrix(start + i);
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t r = 0; r < state_count_; ++r) {
      const double w = dist[r];
      if (w == 0.0) continue;
      for (std::size_t c = 0; c < state_count_; ++c)
        next[c] += w * m[r * state_count_ + c];
    }
    dist.swap(next);
  }
  return dist;
}

std::vector<double> InhomogeneousMarkovChain::marginal(std::size_t j) const {
  return marginal_from(initial_, 0, j);
}

std::vector<double> chain_marginal(const InhomogeneousMarkovChain& chain,
                                   std::size_t j) {
  return chain.marginal(j);
}

InhomogeneousMarkovChain iid_sign_chain() {
  return InhomogeneousMarkovChain(2, {{0.5, 0.5, 0.5, 0.5}}, true, {0.5, 0.5});
}

DensityTilt DensityTilt::map_identity() {
  DensityTilt t;
  t.eval_ = [](double) { return 1.0; };
  t.norm_class = NormSpec::total_variation();
  t.norm_value = 0.0;
  t.sup_bound = 1.0;
  t.strictly_positive = true;
  return t;
}

DensityTilt DensityTilt::map_cosine(double amplitude) {
  if (std::abs(amplitude) > 1.0)
    throw std::invalid_argument("map_cosine: |amplitude| must be <= 1 for nonnegativity");
  DensityTilt t;
  t.eval_ = [amplitude](double x) { return 1.0 + amplitude * std::cos(kTwoPi * x); };
  t.norm_class = NormSpec::total_variation();
  t.norm_value = 4.0 * std::abs(amplitude);
  t.sup_bound = 1.0 + std::abs(amplitude);
  t.strictly_positive = std::abs(amplitude) < 1.0;
  return t;
}

DensityTilt DensityTilt::map_step(double left_value, double cut) {
  if (!(cut > 0.0 && cut < 1.0))
    throw std::invalid_argument("map_step: cut must lie in (0,1)");
  if (left_value < 0.0) throw std::invalid_argument("map_step: negative density");
  const double right_value = (1.0 - left_value * cut) / (1.0 - cut);
  if (right_value < 0.0)
    throw std::invalid_argument("map_step: right value negative, not a density");
  DensityTilt t;
  t.eval_ = [left_value, right_value, cut](double x) {
    return x < cut ? left_value : right_value;
  };
  t.norm_class = NormSpec::total_variation();
  t.norm_value = std::abs(left_value - right_value);
  t.sup_bound = std::max(left_value, right_value);
  t.strictly_positive = left_value > 0.0 && right_value > 0.0;
  return t;
}

DensityTilt DensityTilt::map_custom(Evaluator f, double norm_value,
                                    double sup_bound, bool strictly_positive) {
  DensityTilt t;
  t.eval_ = std::move(f);
  t.norm_class = NormSpec::total_variation();
  t.norm_value = norm_value;
  t.sup_bound = sup_bound;
  t.strictly_positive = strictly_positive;
  return t;
}

DensityTilt DensityTilt::chain_values(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("chain_values: empty");
  DensityTilt t;
  double sup = 0.0;
  bool pos = true;
  for (double v : values) {
    sup = std::max(sup, v);
    pos = pos && v > 0.0;
  }
  t.eval_ = [vals = std::move(values)](double state) {
    const auto s = static_cast<std::size_t>(state);
    if (s >= vals.size())
      throw std::out_of_range("chain tilt: state out of range");
    return vals[s];
  };
  t.norm_class = NormSpec::lp(p);
  t.norm_value = std::numeric_limits<double>::quiet_NaN();  // filled by validation
  t.sup_bound = sup;
  t.strictly_positive = pos;
  return t;
}

namespace {

double lp_norm_chain(const DensityTilt& tilt, const std::vector<double>& mu0,
                     double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (std::size_t s = 0; s < mu0.size(); ++s)
      if (mu0[s] > 0.0) m = std::max(m, std::abs(tilt(static_cast<double>(s))));
    return m;
  }
  double acc = 0.0;
  for (std::size_t s = 0; s < mu0.size(); ++s)
    acc += mu0[s] * std::pow(std::abs(tilt(static_cast<double>(s))), p);
  return std::pow(acc, 1.0 / p);
}

}  // namespace

DensityTilt validate_tilt(const DensityTilt& tilt, const ProcessModel& model) {
  DensityTilt out = tilt;
  if (std::holds_alternative<InhomogeneousMarkovChain>(model)) {
    const auto& chain = std::get<InhomogeneousMarkovChain>(model);
    const auto& mu0 = chain.initial();
    double integral = 0.0;
    for (std::size_t s = 0; s < chain.state_count(); ++s) {
      const double v = tilt(static_cast<double>(s));
      if (v < 0.0)
        throw InvalidDensityError("tilt negative at state " + std::to_string(s) +
                                  ": " + std::to_string(v));
      integral += mu0[s] * v;
    }
    if (std::abs(integral - 1.0) > kIntegralTol)
      throw InvalidDensityError("tilt integral " + std::to_string(integral) +
                                " differs from 1 by more than 1e-10");
    if (out.norm_class.kind != NormSpec::Kind::Lp)
      throw InvalidDensityError("chain tilt must carry an L^p norm class");
    const double exact = lp_norm_chain(tilt, mu0, out.norm_class.p);
    if (std::isnan(out.norm_value)) {
      out.norm_value = exact;
    } else if (std::abs(out.norm_value - exact) >
               1e-9 * std::max(1.0, std::abs(exact))) {
      throw InvalidDensityError("declared L^p norm " + std::to_string(out.norm_value) +
                                " inconsistent with exact value " + std::to_string(exact));
    }
    out.validated = true;
    return out;
  }

  // Interval map model: probe for sign, quadrature for the integral,
  // grid variation as a lower bound for the declared norm.
  std::vector<double> probes;
  probes.reserve(kEquispacedProbes + kRandomProbes);
  for (std::size_t i = 0; i < kEquispacedProbes; ++i)
    probes.push_back(static_cast<double>(i) / kEquispacedProbes);
  SplitMix64 rng(kProbeSeed);
  for (std::size_t i = 0; i < kRandomProbes; ++i) probes.push_back(rng.next_double());

  double sup_seen = 0.0;
  for (double x : probes) {
    const double v = tilt(x);
    if (v < 0.0)
      throw InvalidDensityError("tilt negative at x = " + std::to_string(x) +
                                ": " + std::to_string(v));
    sup_seen = std::max(sup_seen, v);
  }
  if (sup_seen > tilt.sup_bound * (1.0 + 1e-12))
    throw InvalidDensityError("tilt exceeds declared sup_bound at a probe point");

  const auto quad = integrate([&tilt](double x) { return tilt(x); }, 0.0, 1.0, 1e-12);
  if (std::abs(quad.value - 1.0) > kIntegralTol)
    throw InvalidDensityError("tilt integral " + std::to_string(quad.value) +
                              " differs from 1 by more than 1e-10");

  double grid_variation = 0.0;
  double prev = tilt(0.0);
  for (std::size_t i = 1; i < kEquispacedProbes; ++i) {
    const double cur = tilt(static_cast<double>(i) / kEquispacedProbes);
    grid_variation += std::abs(cur - prev);
    prev = cur;
  }
  if (out.norm_class.kind != NormSpec::Kind::TotalVariation)
    throw InvalidDensityError("map tilt must carry the total-variation norm class");
  if (out.norm_value < grid_variation - 1e-9)
    throw InvalidDensityError("declared variation " + std::to_string(out.norm_value) +
                              " below grid estimate " + std::to_string(grid_variation));
  out.validated = true;
  return out;
}

ObservableSequence ObservableSequence::map_cos2pi() {
  ObservableSequence o;
  o.kind_ = Kind::MapCos2Pi;
  o.map_sup_ = 1.0;
  return o;
}

ObservableSequence ObservableSequence::map_sin2pi() {
  ObservableSequence o;
  o.kind_ = Kind::MapSin2Pi;
  o.map_sup_ = 1.0;
  return o;
}

ObservableSequence ObservableSequence::map_centered_x() {
  ObservableSequence o;
  o.kind_ = Kind::MapCenteredX;
  o.map_sup_ = 0.5;
  return o;
}

ObservableSequence ObservableSequence::map_custom(std::function<double(double)> g,
                                                  double sup_norm) {
  ObservableSequence o;
  o.kind_ = Kind::MapCustom;
  o.map_fn_ = std::move(g);
  o.map_sup_ = sup_norm;
  return o;
}

ObservableSequence ObservableSequence::chain_table(
    std::vector<std::vector<double>> tables, int dimension) {
  if (tables.empty()) throw std::invalid_argument("chain_table: empty");
  ObservableSequence o;
  o.kind_ = Kind::ChainTable;
  o.dimension_ = dimension;
  for (const auto& t : tables) {
    if (t.empty() || t.size() % static_cast<std::size_t>(dimension) != 0)
      throw std::invalid_argument("chain_table: table size not a multiple of d");
    double sup = 0.0;
    const std::size_t states = t.size() / static_cast<std::size_t>(dimension);
    for (std::size_t s = 0; s < states; ++s) {
      double norm2 = 0.0;
      for (int c = 0; c < dimension; ++c) norm2 += t[s * dimension + c] * t[s * dimension + c];
      sup = std::max(sup, std::sqrt(norm2));
    }
    o.table_sups_.push_back(sup);
  }
  o.tables_ = std::move(tables);
  return o;
}

void ObservableSequence::eval(std::size_t j, double state, double* out) const {
  switch (kind_) {
    case Kind::MapCos2Pi:
      *out = std::cos(kTwoPi * state);
      return;
    case Kind::MapSin2Pi:
      *out = std::sin(kTwoPi * state);
      return;
    case Kind::MapCenteredX:
      *out = state - 0.5;
      return;
    case Kind::MapCustom:
      *out = map_fn_(state);
      return;
    case Kind::ChainTable: {
      const auto& t = tables_[j % tables_.size()];
      const auto s = static_cast<std::size_t>(state);
      const std::size_t states = t.size() / static_cast<std::size_t>(dimension_);
      if (s >= states) throw std::out_of_range("chain observable: state out of range");
      for (int c = 0; c < dimension_; ++c) out[c] = t[s * dimension_ + c];
      return;
    }
  }
}

double ObservableSequence::sup_norm(std::size_t j) const {
  if (kind_ == Kind::ChainTable) return table_sups_[j % table_sups_.size()];
  return map_sup_;
}

void require_nu_tilt(const DensityTilt* tilt, bool is_map) {
  if (!tilt) throw std::invalid_argument("nu-sampling requires a tilt");
  if (!tilt->validated)
    throw std::invalid_argument("nu-sampling requires a validated tilt");
  if (is_map && !(tilt->sup_bound < std::numeric_limits<double>::infinity()))
    throw std::invalid_argument(
        "nu-sampling for maps requires a finite sup_bound for rejection");
}

InitialSampler::InitialSampler(const InhomogeneousMarkovChain& chain,
                               MeasureTag measure, const DensityTilt* tilt) {
  weights_ = chain.initial();
  if (measure == MeasureTag::Nu) {
    require_nu_tilt(tilt, /*is_map=*/false);
    for (std::size_t s = 0; s < weights_.size(); ++s)
      weights_[s] *= (*tilt)(static_cast<double>(s));
  }
}

TrajectoryBatch sample_trajectories(const ProcessModel& model, std::size_t length,
                                    std::size_t count, std::uint64_t master_seed,
                                    MeasureTag measure, const DensityTilt* tilt,
                                    unsigned workers) {
  if (length == 0 || count == 0)
    throw std::invalid_argument("sample_trajectories: length and count must be >= 1");

  TrajectoryBatch batch;
  batch.count = count;
  batch.length = length;
  batch.measure = measure;
  batch.master_seed = master_seed;
  batch.values.resize(count * length);

  if (std::holds_alternative<SequentialExpandingMap>(model)) {
    const auto& map = std::get<SequentialExpandingMap>(model);
    if (length - 1 > map.horizon())
      throw std::invalid_argument("sample_trajectories: length beyond slope horizon");
    const DensityTilt* nu_tilt = measure == MeasureTag::Nu ? tilt : nullptr;
    if (measure == MeasureTag::Nu) require_nu_tilt(tilt, /*is_map=*/true);
    parallel_for_blocks(count, workers, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        SplitMix64 rng = trajectory_stream(master_seed, i);
        detail::map_path_sample(map, rng, nu_tilt, length,
                                batch.values.data() + i * length);
      }
    });
  } else {
    const auto& chain = std::get<InhomogeneousMarkovChain>(model);
    const InitialSampler initial(chain, measure, tilt);
    if (length - 1 > chain.horizon())
      throw std::invalid_argument("sample_trajectories: length beyond matrix horizon");
    const std::size_t s = chain.state_count();
    parallel_for_blocks(count, workers, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        SplitMix64 rng = trajectory_stream(master_seed, i);
        double state = initial.draw(rng);
        double* row = batch.values.data() + i * length;
        for (std::size_t j = 0; j < length; ++j) {
          row[j] = state;
          if (j + 1 < length) {
            const auto& m = chain.matrix(j);
            const auto from = static_cast<std::size_t>(state);
            const double u = rng.next_double();
            double acc = 0.0;
            std::size_t next = s - 1;
            for (std::size_t c = 0; c < s; ++c) {
              acc += m[from * s + c];
              if (u < acc) {
                next = c;
                break;
              }
            }
            state = static_cast<double>(next);
          }
        }
      }
    });
  }
  return batch;
}

}  // namespace eagleson
