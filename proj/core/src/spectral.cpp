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
#include "eagleson/spectral.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace eagleson {

std::complex<double> CharacteristicFunction::operator()(double t) const {
  if (kind_ != Kind::Empirical) return exact_(t);
  const std::span<const double> tv(&t, 1);
  return (*this)(tv);
}

std::complex<double> CharacteristicFunction::operator()(
    std::span<const double> t) const {
  if (kind_ != Kind::Empirical) {
    if (t.size() != 1)
      throw std::invalid_argument("non-empirical cf: scalar frequencies only");
    return exact_(t[0]);
  }
  if (t.size() != static_cast<std::size_t>(dimension_))
    throw std::invalid_argument("empirical cf: frequency dimension mismatch");
  const auto& data = *data_;
  const int d = dimension_;
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < count_; ++i) {
    double phase = 0.0;
    for (int c = 0; c < d; ++c) phase += t[c] * data[i * d + c];
    re += std::cos(phase);
    im += std::sin(phase);
  }
  const double nn = static_cast<double>(count_);
  return {re / nn, im / nn};
}

CharacteristicFunction CharacteristicFunction::empirical(
    const PartialSumSample& sample) {
  if (sample.count == 0)
    throw std::invalid_argument("empirical cf: empty sample");
  CharacteristicFunction cf;
  cf.kind_ = Kind::Empirical;
  cf.dimension_ = sample.dimension;
  cf.count_ = sample.count;
  cf.radius_ = 4.0 / std::sqrt(static_cast<double>(sample.count));
  cf.data_ = std::make_shared<const std::vector<double>>(sample.values);
  return cf;
}

CharacteristicFunction CharacteristicFunction::exact_chain(
    const InhomogeneousMarkovChain& chain, const ObservableSequence& obs,
    const DensityTilt* tilt, std::size_t n) {
  CharacteristicFunction cf;
  cf.kind_ = Kind::ExactChain;
  cf.dimension_ = 1;
  cf.count_ = 0;
  cf.radius_ = 0.0;
  // copies keep the evaluator self-contained
  auto chain_copy = std::make_shared<InhomogeneousMarkovChain>(chain);
  auto obs_copy = std::make_shared<ObservableSequence>(obs);
  std::shared_ptr<DensityTilt> tilt_copy =
      tilt ? std::make_shared<DensityTilt>(*tilt) : nullptr;
  cf.exact_ = [chain_copy, obs_copy, tilt_copy, n](double t) {
    return exact_cf_chain(*chain_copy, *obs_copy, tilt_copy.get(), n, t);
  };
  return cf;
}

CharacteristicFunction CharacteristicFunction::analytic(
    std::function<std::complex<double>(double)> fn) {
  CharacteristicFunction cf;
  cf.kind_ = Kind::Analytic;
  cf.dimension_ = 1;
  cf.radius_ = 0.0;
  cf.exact_ = std::move(fn);
  return cf;
}

EmpiricalCf empirical_cf(const PartialSumSample& sample,
                         const std::vector<double>& t_grid) {
  EmpiricalCf out;
  out.cf = CharacteristicFunction::empirical(sample);
  out.t_grid = t_grid;
  out.grid_values.reserve(t_grid.size());
  for (double t : t_grid) out.grid_values.push_back(out.cf(t));
  return out;
}

std::complex<double> exact_cf_chain(const InhomogeneousMarkovChain& chain,
                                    const ObservableSequence& obs,
                                    const DensityTilt* tilt, std::size_t n,
                                    double t) {
  if (obs.dimension() != 1)
    throw std::invalid_argument("exact_cf_chain: scalar observables only");
  const std::size_t s = chain.state_count();
  std::vector<std::complex<double>> v(s);
  for (std::size_t r = 0; r < s; ++r) {
    double w = chain.initial()[r];
    if (tilt) w *= (*tilt)(static_cast<double>(r));
    v[r] = w;
  }
  std::vector<std::complex<double>> next(s);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& m = chain.matrix(j);
    std::fill(next.begin(), next.end(), std::complex<double>(0.0, 0.0));
    for (std::size_t r = 0; r < s; ++r) {
      const double g = obs.eval1(j, static_cast<double>(r));
      const std::complex<double> w = v[r] * std::polar(1.0, t * g);
      if (w == std::complex<double>(0.0, 0.0)) continue;
      for (std::size_t c = 0; c < s; ++c) next[c] += w * m[r * s + c];
    }
    v.swap(next);
  }
  std::complex<double> acc(0.0, 0.0);
  for (const auto& z : v) acc += z;
  return acc;
}

ChainMoments exact_moments_chain(const InhomogeneousMarkovChain& chain,
                                 const ObservableSequence& obs,
                                 const DensityTilt* tilt, std::size_t n,
                                 int order) {
  if (order > 2 || order < 1)
    throw std::invalid_argument("exact_moments_chain: order must be 1 or 2");
  if (obs.dimension() != 1)
    throw std::invalid_argument("exact_moments_chain: scalar observables only");
  const std::size_t s = chain.state_count();
  std::vector<double> mass(s), first(s, 0.0), second(s, 0.0);
  for (std::size_t r = 0; r < s; ++r) {
    mass[r] = chain.initial()[r];
    if (tilt) mass[r] *= (*tilt)(static_cast<double>(r));
  }
  std::vector<double> nmass(s), nfirst(s), nsecond(s);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& m = chain.matrix(j);
    std::fill(nmass.begin(), nmass.end(), 0.0);
    std::fill(nfirst.begin(), nfirst.end(), 0.0);
    std::fill(nsecond.begin(), nsecond.end(), 0.0);
    for (std::size_t r = 0; r < s; ++r) {
      if (mass[r] == 0.0 && first[r] == 0.0 && second[r] == 0.0) continue;
      const double g = obs.eval1(j, static_cast<double>(r));
      const double a = first[r] + g * mass[r];
      const double q = second[r] + 2.0 * g * first[r] + g * g * mass[r];
      for (std::size_t c = 0; c < s; ++c) {
        const double p = m[r * s + c];
        if (p == 0.0) continue;
        nmass[c] += mass[r] * p;
        nfirst[c] += a * p;
        if (order >= 2) nsecond[c] += q * p;
      }
    }
    mass.swap(nmass);
    first.swap(nfirst);
    second.swap(nsecond);
  }
  ChainMoments out;
  double total_mass = 0.0;
  for (std::size_t r = 0; r < s; ++r) {
    total_mass += mass[r];
    out.mean += first[r];
    out.second_moment += second[r];
  }
  (void)total_mass;  // equals int r dmu = 1 for validated tilts
  if (order >= 2) out.variance = out.second_moment - out.mean * out.mean;
  return out;
}

FourierTransferOperator::FourierTransferOperator(
    const InhomogeneousMarkovChain& chain, const ObservableSequence& obs)
    : chain_(&chain), obs_(&obs), states_(chain.state_count()) {
  if (obs.dimension() != 1)
    throw std::invalid_argument("FourierTransferOperator: scalar observables only");
}

std::vector<std::complex<double>> FourierTransferOperator::factor(std::size_t j,
                                                                  double t) const {
  const std::size_t s = states_;
  const auto& m = chain_->matrix(j);
  std::vector<std::complex<double>> f(s * s);
  for (std::size_t r = 0; r < s; ++r) {
    const std::complex<double> phase =
        std::polar(1.0, t * obs_->eval1(j, static_cast<double>(r)));
    for (std::size_t c = 0; c < s; ++c) f[r * s + c] = phase * m[r * s + c];
  }
  return f;
}

std::vector<std::complex<double>> FourierTransferOperator::product(
    double t, std::size_t n) const {
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = cache_.find({t, n});
    if (it != cache_.end()) return it->second;
  }
  const std::size_t s = states_;
  std::vector<std::complex<double>> prod(s * s, {0.0, 0.0});
  for (std::size_t i = 0; i < s; ++i) prod[i * s + i] = 1.0;
  std::vector<std::complex<double>> next(s * s);
  for (std::size_t j = 0; j < n; ++j) {
    const auto f = factor(j, t);
    std::fill(next.begin(), next.end(), std::complex<double>(0.0, 0.0));
    for (std::size_t r = 0; r < s; ++r)
      for (std::size_t k = 0; k < s; ++k) {
        const std::complex<double> v = prod[r * s + k];
        if (v == std::complex<double>(0.0, 0.0)) continue;
        for (std::size_t c = 0; c < s; ++c) next[r * s + c] += v * f[k * s + c];
      }
    prod.swap(next);
  }
  std::lock_guard<std::mutex> lock(cache_mutex_);
  auto [it, _] = cache_.emplace(std::make_pair(t, n), std::move(prod));
  return it->second;
}

double FourierTransferOperator::projected_norm(double t, std::size_t n) const {
  const std::size_t s = states_;
  const auto prod = product(t, n);
  // mass-zero measures are the density functions with int s dmu_0 = 0 written
  // in measure coordinates; an orthonormal basis of that subspace comes from
  // the QR factorization of the all-ones vector.
  Eigen::MatrixXd ones(s, 1);
  ones.setOnes();
  const Eigen::MatrixXd qfull =
      Eigen::HouseholderQR<Eigen::MatrixXd>(ones).householderQ();
  const Eigen::MatrixXd basis = qfull.rightCols(s - 1);

  Eigen::MatrixXcd g(s, s);
  for (std::size_t r = 0; r < s; ++r)
    for (std::size_t c = 0; c < s; ++c) g(r, c) = prod[r * s + c];
  const Eigen::MatrixXcd restricted = g.transpose() * basis;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(restricted);
  return svd.singularValues()(0);
}

std::vector<EnvelopeRow> operator_norm_envelope(
    const InhomogeneousMarkovChain& chain, const ObservableSequence& obs,
    const std::vector<double>& t_grid, const std::vector<std::size_t>& n_list) {
  FourierTransferOperator op(chain, obs);
  std::vector<EnvelopeRow> rows;
  rows.reserve(t_grid.size() * n_list.size());
  for (double t : t_grid)
    for (std::size_t n : n_list)
      rows.push_back({t, n, op.projected_norm(t, n)});
  return rows;
}

void write_envelope_csv(std::ostream& os, const std::vector<EnvelopeRow>& rows) {
  os << "t,n,norm\n";
  char buf[64];
  auto put = [&](double v) {
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    os.write(buf, p - buf);
  };
  for (const auto& r : rows) {
    put(r.t);
    os << ',' << r.n << ',';
    put(r.norm);
    os << '\n';
  }
}

}  // namespace eagleson
