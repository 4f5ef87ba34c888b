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
#include "eagleson/mixing.hpp"
#include "eagleson/quadrature.hpp"
#include "helpers.hpp"

using namespace eagleson;

TEST_CASE("expanding-map delta profile is the slope product") {
  SequentialExpandingMap all2({2}, true);
  auto d2 = delta_profile_expanding(all2, 8);
  CHECK(d2.value(0) == 1.0);
  CHECK(d2.value(3) == 0.125);

  SequentialExpandingMap mixed({2, 3, 4}, false);
  auto dm = delta_profile_expanding(mixed, 3);
  CHECK(dm.value(3) == doctest::Approx(1.0 / 24.0).epsilon(1e-15));
  CHECK(dm.norm_class() == NormSpec::total_variation());
  CHECK(dm.provenance() == MixingProfile::Provenance::Analytic);

  SUBCASE("monotone decay: delta_{n+1} <= delta_n / 2") {
    SequentialExpandingMap map({2, 3}, true);
    auto d = delta_profile_expanding(map, 30);
    for (std::size_t n = 0; n < 30; ++n) CHECK(d.value(n + 1) <= d.value(n) / 2.0);
    CHECK(d.decay_certified());
  }
}

TEST_CASE("alpha brute force") {
  SUBCASE("independence gives exactly zero") {
    // dyadic entries keep every product and sum exact
    InhomogeneousMarkovChain ind(2, {{0.5, 0.5, 0.5, 0.5}}, true, {0.5, 0.5});
    for (std::size_t n : {1, 2, 3}) {
      const auto r = alpha_bruteforce(ind, 0, n, 1);
      CHECK(r.exact);
      CHECK(r.value == 0.0);
    }
  }
  SUBCASE("identity chain at half-half start attains the 1/4 cap") {
    InhomogeneousMarkovChain id(2, {{1.0, 0.0, 0.0, 1.0}}, true, {0.5, 0.5});
    const auto r = alpha_bruteforce(id, 0, 1, 0);
    CHECK(r.exact);
    CHECK(r.value == 0.25);
  }
  SUBCASE("matches the all-event-pairs oracle") {
    InhomogeneousMarkovChain mix(2, {{0.9, 0.1, 0.1, 0.9}}, true, {0.5, 0.5});
    const auto r = alpha_bruteforce(mix, 0, 1, 0);
    const double oracle = testing::alpha_enumeration(mix, 0, 1, 0);
    CHECK(r.value == oracle);
    // randomized suite
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto chain = testing::random_two_state_chain(seed);
      for (std::size_t n : {1, 2}) {
        for (std::size_t depth : {0, 1}) {
          const auto got = alpha_bruteforce(chain, 0, n, depth);
          const double want = testing::alpha_enumeration(chain, 0, n, depth);
          CHECK(got.value == doctest::Approx(want).epsilon(1e-13));
          CHECK(got.exact);
        }
      }
    }
  }
  SUBCASE("alpha values stay in [0, 1/4]") {
    for (std::uint64_t seed = 40; seed < 60; ++seed) {
      const auto chain = testing::random_two_state_chain(seed);
      const auto r = alpha_bruteforce(chain, 1, 1, 1);
      CHECK(r.value >= 0.0);
      CHECK(r.value <= 0.25);
    }
  }
  SUBCASE("finite-depth alpha is nondecreasing in depth") {
    const auto chain = testing::random_two_state_chain(123);
    double prev = -1.0;
    for (std::size_t depth : {0, 1, 2, 3}) {
      const auto r = alpha_bruteforce(chain, 0, 1, depth);
      CHECK(r.value >= prev - 1e-15);
      prev = r.value;
    }
  }
  SUBCASE("fixed-point fallback reports a flagged lower bound") {
    const auto chain = testing::random_two_state_chain(7);
    // depth 3 -> 16 future atoms > 14: subset enumeration cap exceeded
    CHECK_THROWS_AS(alpha_bruteforce(chain, 0, 1, 3, /*allow_fixed_point=*/false),
                    std::invalid_argument);
    const auto fp = alpha_bruteforce(chain, 0, 1, 3, true);
    CHECK_FALSE(fp.exact);
    const double oracle = testing::alpha_enumeration(chain, 0, 1, 3);
    CHECK(fp.value <= oracle + 1e-14);
    CHECK(fp.value >= 0.0);
  }
  SUBCASE("atom cap is enforced") {
    const auto chain = testing::random_two_state_chain(9);
    CHECK_THROWS_AS(alpha_bruteforce(chain, 20, 1, 0), std::invalid_argument);
  }
}

TEST_CASE("Dobrushin upper bound") {
  SUBCASE("identical rows give coefficient 0") {
    InhomogeneousMarkovChain ind(2, {{0.3, 0.7, 0.3, 0.7}}, true, {0.5, 0.5});
    CHECK(dobrushin_coefficient(ind.matrix(0), 2) == 0.0);
    CHECK(alpha_upper_dobrushin(ind, 3) == 0.0);
  }
  SUBCASE("identity matrix is vacuous") {
    InhomogeneousMarkovChain id(2, {{1.0, 0.0, 0.0, 1.0}}, true, {0.5, 0.5});
    CHECK(dobrushin_coefficient(id.matrix(0), 2) == 1.0);
    CHECK(alpha_upper_dobrushin(id, 5) == 0.25);
  }
  SUBCASE("0.9/0.1 rows contract by 0.8 per step") {
    InhomogeneousMarkovChain mix(2, {{0.9, 0.1, 0.1, 0.9}}, true, {0.5, 0.5});
    CHECK(dobrushin_coefficient(mix.matrix(0), 2) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(alpha_upper_dobrushin(mix, 2) == doctest::Approx(0.16).epsilon(1e-14));
    const auto bf = alpha_bruteforce(mix, 0, 2, 0);
    CHECK(alpha_upper_dobrushin(mix, 2) >= bf.value);
  }
  SUBCASE("dominates brute force on random chains") {
    for (std::uint64_t seed = 100; seed < 150; ++seed) {
      const auto chain = testing::random_two_state_chain(seed);
      for (std::size_t n : {1, 2, 3}) {
        double lower = 0.0;
        for (std::size_t depth : {0, 1, 2})
          lower = std::max(lower, alpha_bruteforce(chain, 0, n, depth).value);
        CHECK(alpha_upper_dobrushin(chain, n) >= lower - 1e-12);
      }
    }
  }
}

TEST_CASE("delta synthesis from alpha and gamma") {
  SUBCASE("zero profiles give zero delta") {
    AlphaProfile zero{std::vector<double>(9, 0.0), AlphaProfile::Kind::UpperBound, 0,
                      false};
    auto d = delta_from_alpha(zero, ApproximationProfile::zero(), 2.0, 8);
    for (std::size_t n = 0; n <= 8; ++n) CHECK(d.value(n) == 0.0);
  }
  SUBCASE("p = 2 square root") {
    AlphaProfile a{std::vector<double>(5, 0.04), AlphaProfile::Kind::UpperBound, 0,
                   false};
    auto d = delta_from_alpha(a, ApproximationProfile::zero(), 2.0, 4);
    CHECK(d.value(4) == doctest::Approx(1.2).epsilon(1e-15));
    CHECK(d.norm_class() == NormSpec::lp(2.0));
    CHECK(d.provenance() == MixingProfile::Provenance::Synthesized);
  }
  SUBCASE("p = infinity uses the 1/inf = 0 convention") {
    AlphaProfile a{std::vector<double>(3, 0.01), AlphaProfile::Kind::UpperBound, 0,
                   false};
    auto g = ApproximationProfile::exact_array({0.005, 0.005, 0.005});
    auto d = delta_from_alpha(a, g, std::numeric_limits<double>::infinity(), 2);
    CHECK(d.value(2) == doctest::Approx(0.07).epsilon(1e-15));
  }
  SUBCASE("p below 1 is rejected") {
    AlphaProfile a{{0.0, 0.0}, AlphaProfile::Kind::UpperBound, 0, false};
    CHECK_THROWS_AS(delta_from_alpha(a, ApproximationProfile::zero(), 0.5, 1),
                    std::invalid_argument);
  }
}

TEST_CASE("piecewise-linear Fourier integrals") {
  PiecewiseLinear flat{{0.0, 1.0}, {1.0, 1.0}};
  CHECK(pl_fourier_integral(flat, 1.0, true) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(pl_fourier_integral(flat, 1.0, false) == doctest::Approx(0.0).epsilon(1e-15));

  PiecewiseLinear ramp{{0.0, 1.0}, {0.0, 1.0}};
  // int_0^1 x sin(2 pi x) dx = -1/(2 pi)
  CHECK(pl_fourier_integral(ramp, 1.0, false) ==
        doctest::Approx(-1.0 / kTwoPi).epsilon(1e-12));
  CHECK(pl_fourier_integral(ramp, 1.0, true) == doctest::Approx(0.0).epsilon(1e-14));

  SUBCASE("matches adaptive quadrature on a random density") {
    const auto s = testing::random_unit_density_pl(5, 4);
    for (double freq : {1.0, 2.0, 7.0}) {
      const auto quad = integrate(
          [&](double x) { return s(x) * std::cos(kTwoPi * freq * x); }, 0.0, 1.0,
          1e-12);
      CHECK(pl_fourier_integral(s, freq, true) ==
            doctest::Approx(quad.value).epsilon(1e-10));
    }
  }
}

TEST_CASE("map correlation certificate") {
  SequentialExpandingMap map({2, 3}, true);
  const auto delta = delta_profile_expanding(map, 20);

  SUBCASE("exact covariance obeys Var(s) sup|f| delta_n") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto s = testing::random_unit_density_pl(seed, 3 + seed % 4);
      const std::size_t n = 1 + seed % 20;
      const bool cosine = seed % 2 == 0;
      const double wave = 1.0 + static_cast<double>(seed % 3);
      const double cov = expanding_cov_exact(map, s, n, wave, cosine);
      CHECK(cov <= s.variation() * delta.value(n) + 1e-12);
    }
  }
  SUBCASE("Monte Carlo route agrees with the exact route") {
    const auto s = testing::random_unit_density_pl(3, 4);
    const double exact = expanding_cov_exact(map, s, 3, 1.0, true);
    const auto mc = expanding_cov_mc(map, s, 3, 1.0, true, 200000, 17);
    CHECK(std::abs(mc.estimate - exact) <= 4.0 * mc.std_error + 1e-6);
  }
}

TEST_CASE("series and quadrature evaluations of Si agree") {
  for (double u : {0.25, 0.7, 1.0, 1.5}) {
    const auto quad = integrate(esseen_integrand, 0.0, u, 1e-13);
    CHECK(quad.value ==
          doctest::Approx(testing::esseen_integral_series(u)).epsilon(1e-11));
  }
}

TEST_CASE("closed-form profile families") {
  auto geo = MixingProfile::geometric(2.0, 0.5, NormSpec::total_variation(),
                                      MixingProfile::Provenance::Analytic);
  CHECK(geo.value(3) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(geo.decay_certified());
  auto poly = MixingProfile::polynomial(3.0, 2.0, NormSpec::lp(2.0),
                                        MixingProfile::Provenance::Measured);
  CHECK(poly.value(2) == doctest::Approx(3.0 / 9.0).epsilon(1e-15));
  CHECK(poly.decay_certified());
  auto flat = MixingProfile::geometric(1.0, 1.0, NormSpec::total_variation(),
                                       MixingProfile::Provenance::Analytic);
  CHECK_FALSE(flat.decay_certified());
}
