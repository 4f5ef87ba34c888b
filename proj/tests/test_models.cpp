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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "eagleson/esseen.hpp"
#include "eagleson/models.hpp"
#include "helpers.hpp"

using namespace eagleson;

TEST_CASE("expanding map rejects bad slopes") {
  CHECK_THROWS_AS(SequentialExpandingMap({2, 1}, true), std::invalid_argument);
  CHECK_THROWS_AS(SequentialExpandingMap({}, true), std::invalid_argument);
  SequentialExpandingMap ok({2, 3}, true);
  CHECK(ok.slope(0) == 2);
  CHECK(ok.slope(5) == 3);
}

TEST_CASE("map composition order is T_{n+m-1} o ... o T_n, bitwise") {
  SequentialExpandingMap map({2, 3, 5, 2, 7}, true);
  SplitMix64 rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    const double x = rng.next_double();
    const double oneshot = map.evolve(x, 0, 5);
    const double split = map.evolve(map.evolve(x, 0, 2), 2, 3);
    CHECK(oneshot == split);
  }
}

TEST_CASE("chain constructor validates stochasticity") {
  CHECK_THROWS_AS(InhomogeneousMarkovChain(2, {{0.5, 0.6, 0.5, 0.5}}, true, {0.5, 0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(InhomogeneousMarkovChain(2, {{-0.1, 1.1, 0.5, 0.5}}, true, {0.5, 0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(InhomogeneousMarkovChain(2, {{0.5, 0.5, 0.5, 0.5}}, true, {0.7, 0.2}),
                  std::invalid_argument);
}

TEST_CASE("chain marginals") {
  SUBCASE("j = 0 is the initial distribution") {
    const auto chain = iid_sign_chain();
    const auto m0 = chain_marginal(chain, 0);
    CHECK(m0[0] == 0.5);
    CHECK(m0[1] == 0.5);
  }
  SUBCASE("identical rows project onto the row") {
    InhomogeneousMarkovChain chain(2, {{0.3, 0.7, 0.3, 0.7}}, true, {0.9, 0.1});
    for (std::size_t j : {1, 2, 5}) {
      const auto m = chain_marginal(chain, j);
      CHECK(m[0] == doctest::Approx(0.3).epsilon(1e-15));
      CHECK(m[1] == doctest::Approx(0.7).epsilon(1e-15));
    }
  }
  SUBCASE("direct multiplication") {
    InhomogeneousMarkovChain chain(2, {{0.5, 0.5, 0.5, 0.5}}, true, {1.0, 0.0});
    const auto m = chain_marginal(chain, 1);
    CHECK(m[0] == 0.5);
    CHECK(m[1] == 0.5);
  }
  SUBCASE("composition is bitwise associative left to right") {
    const auto chain = testing::random_two_state_chain(11);
    const auto direct = chain_marginal(chain, 7);
    const auto split = chain.marginal_from(chain_marginal(chain, 3), 3, 4);
    CHECK(direct[0] == split[0]);
    CHECK(direct[1] == split[1]);
  }
}

TEST_CASE("trajectories are deterministic functions of (seed, index)") {
  const ProcessModel model = iid_sign_chain();
  const auto b1 = sample_trajectories(model, 3, 1, 123, MeasureTag::Mu);
  const auto b2 = sample_trajectories(model, 3, 1, 123, MeasureTag::Mu);
  CHECK(b1.values == b2.values);
  for (double v : b1.values) CHECK((v == 0.0 || v == 1.0));

  // worker count must not matter
  const auto w1 = sample_trajectories(model, 16, 500, 99, MeasureTag::Mu, nullptr, 1);
  const auto w4 = sample_trajectories(model, 16, 500, 99, MeasureTag::Mu, nullptr, 4);
  CHECK(w1.values == w4.values);
}

TEST_CASE("identity-matrix chain with point mass stays in state 0") {
  InhomogeneousMarkovChain chain(2, {{1.0, 0.0, 0.0, 1.0}}, true, {1.0, 0.0});
  const auto batch = sample_trajectories(chain, 9, 4, 5, MeasureTag::Mu);
  for (double v : batch.values) CHECK(v == 0.0);
}

TEST_CASE("tilt validation") {
  const ProcessModel map_model = SequentialExpandingMap({2}, true);
  SUBCASE("identity is valid with consistent norm") {
    const auto t = validate_tilt(DensityTilt::map_identity(), map_model);
    CHECK(t.validated);
    CHECK(t.norm_value == 0.0);
  }
  SUBCASE("step density has variation 2") {
    const auto t = validate_tilt(DensityTilt::map_step(2.0, 0.5), map_model);
    CHECK(t.validated);
    CHECK(t.norm_value == doctest::Approx(2.0));
  }
  SUBCASE("negative density is rejected with a witness") {
    const auto bad = DensityTilt::map_custom(
        [](double x) { return std::cos(kTwoPi * x); }, 4.0, 1.0, false);
    CHECK_THROWS_AS(validate_tilt(bad, map_model), InvalidDensityError);
  }
  SUBCASE("integral off by more than 1e-10 is rejected") {
    const auto off =
        DensityTilt::map_custom([](double) { return 1.001; }, 0.0, 1.001, true);
    CHECK_THROWS_WITH_AS(validate_tilt(off, map_model),
                         doctest::Contains("integral"), InvalidDensityError);
  }
  SUBCASE("declared variation below the grid estimate is rejected") {
    const auto lied = DensityTilt::map_custom(
        [](double x) { return 1.0 + 0.5 * std::cos(kTwoPi * x); }, 0.5, 1.5, true);
    CHECK_THROWS_AS(validate_tilt(lied, map_model), InvalidDensityError);
  }
  SUBCASE("chain tilt gets its exact L^p norm filled in") {
    const ProcessModel chain_model = iid_sign_chain();
    const auto t =
        validate_tilt(DensityTilt::chain_values({1.5, 0.5}, 2.0), chain_model);
    CHECK(t.validated);
    // (0.5 * 1.5^2 + 0.5 * 0.5^2)^(1/2)
    CHECK(t.norm_value == doctest::Approx(std::sqrt(1.25)).epsilon(1e-14));
  }
}

TEST_CASE("nu-sampling requires a validated tilt and a finite sup bound") {
  const ProcessModel model = SequentialExpandingMap({2}, true);
  auto tilt = DensityTilt::map_cosine(0.5);
  CHECK_THROWS_AS(
      sample_trajectories(model, 4, 10, 1, MeasureTag::Nu, &tilt),
      std::invalid_argument);
  auto validated = validate_tilt(tilt, model);
  validated.sup_bound = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(
      sample_trajectories(model, 4, 10, 1, MeasureTag::Nu, &validated),
      std::invalid_argument);
}

TEST_CASE("nu-sampled initial coordinate follows r dmu (DKW check)") {
  const ProcessModel model = SequentialExpandingMap({2}, true);
  const auto tilt = validate_tilt(DensityTilt::map_cosine(0.5), model);
  const std::size_t n_samples = 100000;
  const auto batch =
      sample_trajectories(model, 1, n_samples, 2024, MeasureTag::Nu, &tilt);
  std::vector<double> x0(batch.count);
  for (std::size_t i = 0; i < batch.count; ++i) x0[i] = batch.at(i, 0);
  std::sort(x0.begin(), x0.end());
  ReferenceLaw law;
  law.cdf = [](double x) { return x + std::sin(kTwoPi * x) / (2.0 * kTwoPi); };
  law.density_sup = 1.5;
  CHECK(kolmogorov_to_cdf(x0, law) < 0.01);
}

TEST_CASE("chain nu-sampling matches the tilted vector frequencies") {
  const ProcessModel model = iid_sign_chain();
  const auto tilt = validate_tilt(DensityTilt::chain_values({1.4, 0.6}, 2.0), model);
  const std::size_t n_samples = 100000;
  const auto batch = sample_trajectories(model, 1, n_samples, 31, MeasureTag::Nu, &tilt);
  double freq0 = 0.0;
  for (std::size_t i = 0; i < batch.count; ++i)
    if (batch.at(i, 0) == 0.0) freq0 += 1.0;
  freq0 /= static_cast<double>(n_samples);
  const double p = 0.5 * 1.4;
  const double tol = 4.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n_samples));
  CHECK(std::abs(freq0 - p) <= tol);
}

TEST_CASE("Lebesgue preservation along the trajectory") {
  const ProcessModel model = SequentialExpandingMap({2, 3}, true);
  const std::size_t n_samples = 100000;
  const auto batch = sample_trajectories(model, 7, n_samples, 77, MeasureTag::Mu);
  ReferenceLaw uniform;
  uniform.cdf = [](double x) { return std::clamp(x, 0.0, 1.0); };
  uniform.density_sup = 1.0;
  for (std::size_t j : {std::size_t{1}, std::size_t{3}, std::size_t{6}}) {
    std::vector<double> xj(batch.count);
    for (std::size_t i = 0; i < batch.count; ++i) xj[i] = batch.at(i, j);
    std::sort(xj.begin(), xj.end());
    CHECK(kolmogorov_to_cdf(xj, uniform) < 0.01);
  }
}

TEST_CASE("seed splitting: initial coordinates of distinct trajectories decorrelate") {
  const ProcessModel model = SequentialExpandingMap({2}, true);
  const auto batch = sample_trajectories(model, 1, 20000, 3141, MeasureTag::Mu);
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  const std::size_t pairs = 10000;
  for (std::size_t i = 0; i < pairs; ++i) {
    const double x = batch.at(2 * i, 0), y = batch.at(2 * i + 1, 0);
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
  }
  const double n = static_cast<double>(pairs);
  const double cov = sxy / n - (sx / n) * (sy / n);
  const double corr = cov / std::sqrt((sxx / n - sx / n * sx / n) *
                                      (syy / n - sy / n * sy / n));
  CHECK(std::abs(corr) <= 4.0 / std::sqrt(n));
}

TEST_CASE("observable sequences") {
  const auto cos_obs = ObservableSequence::map_cos2pi();
  CHECK(cos_obs.eval1(0, 0.25) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(cos_obs.sup_norm(3) == 1.0);

  const auto table = ObservableSequence::chain_table({{1.0, -1.0}, {2.0, 0.0}}, 1);
  CHECK(table.eval1(0, 1.0) == -1.0);
  CHECK(table.eval1(1, 0.0) == 2.0);
  CHECK(table.eval1(2, 0.0) == 1.0);  // periodic
  CHECK(table.sup_norm(1) == 2.0);
  CHECK_THROWS_AS(ObservableSequence::chain_table({}, 1), std::invalid_argument);
}

TEST_CASE("forward step pushes a fine uniform grid to an exactly uniform grid") {
  // N = 3 * 2^16 is divisible by both slopes, so frac(k i / N) permutes the
  // grid residues and every histogram bin stays exactly uniform
  SequentialExpandingMap map({2, 3}, true);
  const std::size_t n_grid = 3u << 16;
  const std::size_t bins = 64;
  for (std::size_t j : {std::size_t{0}, std::size_t{1}}) {
    std::vector<std::size_t> hist(bins, 0);
    for (std::size_t i = 0; i < n_grid; ++i) {
      const double y = map.step(static_cast<double>(i) / static_cast<double>(n_grid), j);
      ++hist[std::min(bins - 1, static_cast<std::size_t>(y * bins))];
    }
    for (std::size_t b = 0; b < bins; ++b) CHECK(hist[b] == n_grid / bins);
  }
}

TEST_CASE("sampled map trajectories satisfy the forward dynamics pathwise") {
  // backward construction: k_j X_j - X_{j+1} must be an integer up to
  // rounding, i.e. the path lies on the graph of the composed map
  const ProcessModel model = SequentialExpandingMap({2, 3}, true);
  const auto tilt = validate_tilt(DensityTilt::map_cosine(0.5), model);
  for (bool use_nu : {false, true}) {
    const auto batch =
        sample_trajectories(model, 12, 200, 55, use_nu ? MeasureTag::Nu : MeasureTag::Mu,
                            use_nu ? &tilt : nullptr);
    const auto& map = std::get<SequentialExpandingMap>(model);
    for (std::size_t i = 0; i < batch.count; ++i) {
      for (std::size_t j = 0; j + 1 < batch.length; ++j) {
        const double image = static_cast<double>(map.slope(j)) * batch.at(i, j) -
                             batch.at(i, j + 1);
        CHECK(std::abs(image - std::round(image)) <= 1e-11);
      }
    }
  }
}
