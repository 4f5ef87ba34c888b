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

#include <sstream>

#include "eagleson/config.hpp"
#include "eagleson/experiments.hpp"
#include "eagleson/spectral.hpp"
#include "eagleson/wip.hpp"
#include "helpers.hpp"

using namespace eagleson;

namespace {

PathBatch single_path(const std::vector<double>& grid, std::vector<double> values) {
  PathBatch p;
  p.grid = grid;
  p.n = 1;
  p.b_n = 1.0;
  p.count = 1;
  p.dimension = 1;
  p.values = std::move(values);
  return p;
}

std::vector<double> uniform_grid(std::size_t points) {
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i)
    g[i] = static_cast<double>(i) / static_cast<double>(points - 1);
  return g;
}

}  // namespace

TEST_CASE("path process") {
  // per-index observable: g_j(state 0) = j + 1 gives S_m = m(m+1)/2
  const auto obs =
      ObservableSequence::chain_table({{1.0}, {2.0}, {3.0}, {4.0}}, 1);
  TrajectoryBatch batch;
  batch.count = 1;
  batch.length = 4;
  batch.values = {0.0, 0.0, 0.0, 0.0};

  SUBCASE("value at t = 0 is the empty sum") {
    const auto paths = path_process(batch, obs, 4, 2.0, {0.0, 0.5});
    CHECK(paths.at(0, 0) == 0.0);
  }
  SUBCASE("S_[nt]/b at the grid times") {
    const auto paths = path_process(batch, obs, 4, 2.0, {0.0, 0.5, 1.0});
    CHECK(paths.at(0, 1) == doctest::Approx(3.0 / 2.0));   // S_2 = 1 + 2
    CHECK(paths.at(0, 2) == doctest::Approx(10.0 / 2.0));  // S_4
  }
  SUBCASE("counting observable gives [nt]/b") {
    const auto ones = ObservableSequence::chain_table({{1.0}}, 1);
    const auto paths = path_process(batch, ones, 4, 1.0, {0.0, 0.3, 0.6, 1.0});
    CHECK(paths.at(0, 1) == 1.0);  // [4 * 0.3] = 1
    CHECK(paths.at(0, 2) == 2.0);
    CHECK(paths.at(0, 3) == 4.0);
  }
  SUBCASE("grid beyond the available length is rejected") {
    CHECK_THROWS_AS(path_process(batch, obs, 8, 1.0, {0.0, 1.0}), std::out_of_range);
  }
}

TEST_CASE("paths from a streaming run equal path_process exactly") {
  const ProcessModel model = SequentialExpandingMap({2, 3}, true);
  const auto obs = ObservableSequence::map_cos2pi();
  const std::size_t n = 32;
  const auto grid = uniform_grid(9);
  const auto cuts = path_cut_indices(n, grid);
  const auto run =
      sample_prefix_sums(model, obs, nullptr, MeasureTag::Mu, 64, cuts, 17);
  const auto from_prefix = path_from_prefix(run, n, 3.0, grid);
  const auto batch = sample_trajectories(model, n, 64, 17, MeasureTag::Mu);
  const auto direct = path_process(batch, obs, n, 3.0, grid);
  CHECK(from_prefix.values == direct.values);

  SUBCASE("path value at t = 1 equals S_n / b from the sums module") {
    const auto sums = partial_sums(batch, obs, {n});
    for (std::size_t i = 0; i < 64; ++i)
      CHECK(direct.at(i, grid.size() - 1) == sums[0].at(i) / 3.0);
  }
}

TEST_CASE("cadlag modulus") {
  const auto grid = uniform_grid(21);
  SUBCASE("constant paths have modulus 0") {
    const auto p = single_path(grid, std::vector<double>(21, 2.5));
    const auto diag = tightness_diagnostic(p, 0.01, 0.2);
    CHECK(diag.exceedance == 0.0);
    CHECK(diag.moduli[0] == 0.0);
  }
  SUBCASE("a single jump is absorbed by a partition point") {
    std::vector<double> vals(21, 0.0);
    for (std::size_t i = 10; i < 21; ++i) vals[i] = 5.0;
    CHECK(cadlag_modulus(grid, vals, 0.2) == 0.0);
    const auto p = single_path(grid, vals);
    const auto diag = tightness_diagnostic(p, 1e-9, 0.2);
    CHECK(diag.exceedance == 0.0);
  }
  SUBCASE("two jumps inside one delta window are not separable") {
    std::vector<double> vals(21, 0.0);
    for (std::size_t i = 10; i < 12; ++i) vals[i] = 2.0;
    for (std::size_t i = 12; i < 21; ++i) vals[i] = 4.0;
    // jumps at t = 0.50 and t = 0.60, delta = 0.15
    CHECK(cadlag_modulus(grid, vals, 0.15) >= 2.0);
    const auto p = single_path(grid, vals);
    const auto diag = tightness_diagnostic(p, 2.0, 0.15);
    CHECK(diag.exceedance == 1.0);
  }
  SUBCASE("equals the partition-enumeration oracle on random small grids") {
    SplitMix64 rng(404);
    for (int rep = 0; rep < 60; ++rep) {
      const std::size_t g = 5 + rng.next_u64() % 16;  // up to 20 points
      std::vector<double> times = {0.0};
      for (std::size_t i = 1; i + 1 < g; ++i) times.push_back(rng.next_double());
      times.push_back(1.0);
      std::sort(times.begin(), times.end());
      for (std::size_t i = 1; i < times.size(); ++i)
        if (times[i] <= times[i - 1]) times[i] = times[i - 1] + 1e-6;
      std::vector<double> vals(times.size());
      for (auto& v : vals)
        v = std::floor(6.0 * rng.next_double());  // discrete levels force ties
      const double delta = 0.05 + 0.3 * rng.next_double();
      CHECK(cadlag_modulus(times, vals, delta) ==
            testing::modulus_partition_oracle(times, vals, delta));
    }
  }
  SUBCASE("resolution guard rejects coarse grids") {
    const auto p = single_path(uniform_grid(5), std::vector<double>(5, 0.0));
    CHECK_THROWS_AS(tightness_diagnostic(p, 0.1, 0.3), std::invalid_argument);
  }
}

TEST_CASE("fdd distance") {
  const ProcessModel model = SequentialExpandingMap({2}, true);
  const auto obs = ObservableSequence::map_cos2pi();
  const std::size_t n = 16;
  const auto grid = std::vector<double>{0.0, 0.5, 1.0};
  const auto cuts = path_cut_indices(n, grid);
  const auto tilt = validate_tilt(DensityTilt::map_identity(), model);

  const auto run_mu =
      sample_prefix_sums(model, obs, nullptr, MeasureTag::Mu, 400, cuts, 5);
  const auto run_nu =
      sample_prefix_sums(model, obs, &tilt, MeasureTag::Nu, 400, cuts, 5);
  const auto paths_mu = path_from_prefix(run_mu, n, 2.0, grid);
  const auto paths_nu = path_from_prefix(run_nu, n, 2.0, grid);

  SUBCASE("identical batches give 0") {
    const auto r = fdd_distance(paths_mu, paths_mu, {0.5, 1.0},
                                {{1.0, 0.0}, {0.3, -0.7}});
    CHECK(r.max_abs_diff == 0.0);
    CHECK(r.radius == doctest::Approx(8.0 / std::sqrt(400.0)));
  }
  SUBCASE("identity tilt under shared seeds gives 0 exactly") {
    const auto r = fdd_distance(paths_mu, paths_nu, {0.5, 1.0},
                                {{1.0, 0.0}, {0.3, -0.7}, {1.0, 1.0}});
    CHECK(r.max_abs_diff == 0.0);
  }
  SUBCASE("m = 1 reduces to the scalar empirical cf comparison") {
    const double t = 0.8;
    const auto r = fdd_distance(paths_mu, paths_nu, {1.0}, {{t}});
    const auto cf_mu = CharacteristicFunction::empirical(
        center_and_normalize(run_mu.extract(cuts.size() - 1), {0.0}, 2.0,
                             Centering::None));
    const auto cf_nu = CharacteristicFunction::empirical(
        center_and_normalize(run_nu.extract(cuts.size() - 1), {0.0}, 2.0,
                             Centering::None));
    CHECK(r.max_abs_diff == std::abs(cf_mu(t) - cf_nu(t)));
  }
  SUBCASE("mismatched metadata is rejected") {
    auto other = paths_nu;
    other.b_n = 1.0;
    CHECK_THROWS_AS(fdd_distance(paths_mu, other, {0.5}, {{1.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(fdd_distance(paths_mu, paths_nu, {0.37}, {{1.0}}),
                    std::invalid_argument);
  }
}

TEST_CASE("nu tightness transfer") {
  const ProcessModel model = SequentialExpandingMap({2}, true);
  SUBCASE("bounded density below C has eta = 0") {
    const auto tilt = validate_tilt(DensityTilt::map_cosine(0.5), model);
    const auto r = nu_tightness_transfer(0.1, tilt, model, 1.5);
    CHECK(r.eta == 0.0);
    CHECK(r.bound == doctest::Approx(0.15).epsilon(1e-14));
  }
  SUBCASE("identity tilt with C = 1 passes the exceedance through") {
    const auto tilt = validate_tilt(DensityTilt::map_identity(), model);
    const auto r = nu_tightness_transfer(0.07, tilt, model, 1.0);
    CHECK(r.eta == 0.0);
    CHECK(r.bound == doctest::Approx(0.07).epsilon(1e-14));
  }
  SUBCASE("closed-form eta for the cosine tilt at C = 1.25") {
    const auto tilt = validate_tilt(DensityTilt::map_cosine(0.5), model);
    const auto r = nu_tightness_transfer(0.0, tilt, model, 1.25);
    // r > 1.25 on (-1/6, 1/6) mod 1: eta = 1/3 + sqrt(3) / (4 pi)
    const double closed = 1.0 / 3.0 + std::sqrt(3.0) / (4.0 * 3.14159265358979323846);
    CHECK(std::abs(r.eta - closed) <= 1e-10);
  }
  SUBCASE("chain eta is an exact sum") {
    const ProcessModel chain = iid_sign_chain();
    const auto tilt = validate_tilt(DensityTilt::chain_values({1.5, 0.5}, 2.0), chain);
    const auto r = nu_tightness_transfer(0.0, tilt, chain, 1.2);
    CHECK(r.eta == doctest::Approx(0.75).epsilon(1e-15));  // 0.5 * 1.5
  }
  SUBCASE("monotone in C on the eta term, linear in the exceedance") {
    const auto tilt = validate_tilt(DensityTilt::map_cosine(0.5), model);
    SplitMix64 rng(8);
    double prev_eta = std::numeric_limits<double>::infinity();
    for (double C : {0.8, 1.0, 1.2, 1.4, 1.6}) {
      const auto r = nu_tightness_transfer(0.0, tilt, model, C);
      CHECK(r.eta <= prev_eta + 1e-12);
      prev_eta = r.eta;
      const double e1 = rng.next_double(), e2 = rng.next_double();
      const auto a = nu_tightness_transfer(e1, tilt, model, C);
      const auto b = nu_tightness_transfer(e2, tilt, model, C);
      CHECK(a.bound - a.eta == doctest::Approx(C * e1).epsilon(1e-12));
      CHECK(b.bound - b.eta == doctest::Approx(C * e2).epsilon(1e-12));
    }
  }
  SUBCASE("grid optimizer returns the minimizing C") {
    const auto tilt = validate_tilt(DensityTilt::map_cosine(0.5), model);
    const std::vector<double> cs = {1.0, 1.25, 1.5, 2.0};
    const auto best = nu_tightness_transfer_best(0.01, tilt, model, cs);
    double manual = std::numeric_limits<double>::infinity();
    for (double C : cs)
      manual = std::min(manual, nu_tightness_transfer(0.01, tilt, model, C).bound);
    CHECK(best.bound == manual);
  }
}

TEST_CASE("path quantile fan CSV") {
  std::vector<double> grid = {0.0, 0.5, 1.0};
  PathBatch p;
  p.grid = grid;
  p.n = 2;
  p.b_n = 1.0;
  p.count = 5;
  p.dimension = 1;
  // per time: values 0..4 shuffled
  p.values = {0, 3, 1,  1, 0, 4,  2, 4, 0,  3, 1, 3,  4, 2, 2};
  std::ostringstream os;
  const std::vector<double> levels = {0.0, 0.5, 1.0};
  write_path_quantiles_csv(os, p, levels);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,q0,q50,q100");
  std::getline(in, line);
  CHECK(line == "0,0,2,4");  // min/median/max at t = 0
  std::getline(in, line);
  CHECK(line == "0.5,0,2,4");
  std::getline(in, line);
  CHECK(line == "1,0,2,4");
}

TEST_CASE("wip pipeline emits fdd, tightness and quantile fans") {
  const char* cc = R"({
    "format_version": 1,
    "experiment": "wip",
    "model": {"type": "expanding-map", "slopes": [2, 3], "periodic": true},
    "tilt": {"type": "cosine", "amplitude": 0.5},
    "observable": {"type": "cos2pi"},
    "n_list": [64],
    "samples": 500,
    "seed": 3,
    "wip": {"grid_points": 33, "eps": 0.9, "delta": 0.125,
             "tightness_samples": 400}
  })";
  const auto v = validate_config_text(cc);
  REQUIRE(v.errors.empty());
  const auto r = run_experiment(*v.config);
  CHECK(r.csv_rows.size() == 1);
  REQUIRE(r.extra_files.size() == 2);
  CHECK(r.extra_files[0].first == "paths_mu_quantiles.csv");
  CHECK(r.extra_files[1].first == "paths_nu_quantiles.csv");
  CHECK(r.extra_files[0].second.substr(0, 2) == "t,");
}
