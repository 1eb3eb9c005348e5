#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "support/oracles.hpp"
#include "varalpha/rng.hpp"
#include "varalpha/stats.hpp"

using namespace varalpha;

TEST_CASE("geometric grid hits decade marks exactly") {
  std::vector<double> g = geometric_grid(1e4, 4, 6);
  REQUIRE(g.size() == 25);
  CHECK(g.front() == 1.0);
  CHECK(g[6] == 10.0);
  CHECK(g[12] == 100.0);
  CHECK(g[18] == 1000.0);
  CHECK(g.back() == 10000.0);
  bool ascending = true;
  for (std::size_t i = 1; i < g.size(); ++i) ascending = ascending && g[i] > g[i - 1];
  CHECK(ascending);
  // uniform in log10: consecutive ratios all equal 10^(1/6)
  for (std::size_t i = 1; i < g.size(); ++i)
    CHECK(g[i] / g[i - 1] == doctest::Approx(std::pow(10.0, 1.0 / 6.0)).epsilon(1e-12));
}

TEST_CASE("two-sample KS statistic on tiny hand samples") {
  KsResult same = ks_two_sample({1.0, 2.0, 3.0, 4.0}, {1.0, 2.0, 3.0, 4.0});
  CHECK(same.d == doctest::Approx(0.0));
  CHECK(same.p_value > 0.99);

  KsResult shifted = ks_two_sample({1.0, 2.0, 3.0, 4.0}, {1.5, 2.5, 3.5, 4.5});
  CHECK(shifted.d == doctest::Approx(0.25));

  KsResult disjoint = ks_two_sample({0.0, 0.1, 0.2}, {5.0, 5.1, 5.2});
  CHECK(disjoint.d == doctest::Approx(1.0));
}

TEST_CASE("two-sample KS separates what it should and only that") {
  RandomStream rs(77, 0);
  const int n = 4000;
  std::vector<double> a(n), b(n), c(n);
  for (int i = 0; i < n; ++i) {
    a[i] = rs.gaussian();
    b[i] = rs.gaussian();
    c[i] = rs.gaussian() + 0.25;
  }
  CHECK(ks_two_sample(a, b).p_value > 1e-3);
  CHECK(ks_two_sample(a, c).p_value < 1e-6);
}

TEST_CASE("growth-exponent fit recovers a synthetic power law") {
  std::vector<double> grid = geometric_grid(1e4, 4, 6);
  RandomStream rs(5, 5);
  std::vector<GrowthSeries> series(50);
  for (auto& s : series) {
    s.t = grid;
    for (double t : grid) {
      const double jitter = std::pow(10.0, 0.02 * rs.gaussian());
      s.occupation.push_back(std::pow(t, 1.7) * jitter);
      s.sigma1.push_back(std::pow(t, 0.6) * jitter);
      s.sigma2.push_back(0.0);  // all-zero series must be dropped gracefully
    }
  }
  SlopeFit occ = fit_growth_exponent(series, GrowthQuantity::Occupation);
  CHECK(occ.quantity == GrowthQuantity::Occupation);
  CHECK(occ.n_paths_used == 50);
  CHECK(occ.slope_stderr > 0.0);
  CHECK(std::fabs(occ.slope - 1.7) <= 5.0 * occ.slope_stderr + 1e-6);
  CHECK(occ.log10_t.size() == grid.size());

  SlopeFit s1 = fit_growth_exponent(series, GrowthQuantity::Sigma1);
  CHECK(std::fabs(s1.slope - 0.6) <= 5.0 * s1.slope_stderr + 1e-6);

  SlopeFit med = fit_growth_exponent(series, GrowthQuantity::Occupation, true);
  CHECK(std::fabs(med.slope - 1.7) < 0.02);

  // an independent straight-line fit of the mean ordinates agrees
  CHECK(std::fabs(varalpha_test::ols_slope(occ.log10_t, occ.mean_log10_q) - 1.7) <
        0.02);
}

TEST_CASE("growth fit refuses ranges too short to calibrate") {
  std::vector<GrowthSeries> series(3);
  for (auto& s : series) {
    s.t = geometric_grid(10.0, 1, 12);  // one decade only
    for (double t : s.t) {
      s.occupation.push_back(t);
      s.sigma1.push_back(t);
      s.sigma2.push_back(t);
    }
  }
  CHECK_THROWS_AS(
      (void)fit_growth_exponent(series, GrowthQuantity::Occupation),
      InsufficientRange);

  std::vector<GrowthSeries> sparse(3);
  for (auto& s : sparse) {
    s.t = geometric_grid(100.0, 2, 2);  // two decades but only 5 points
    for (double t : s.t) {
      s.occupation.push_back(t);
      s.sigma1.push_back(t);
      s.sigma2.push_back(t);
    }
  }
  CHECK_THROWS_AS((void)fit_growth_exponent(sparse, GrowthQuantity::Occupation),
                  InsufficientRange);
}

TEST_CASE("ensemble occupation of the whole line is exactly one") {
  AlphaField field = AlphaField::constant(0.5);
  SimConfig cfg;
  cfg.dt = 0.01;
  cfg.target_external_time = 10.0;
  EnsembleOptions opts;
  opts.n_paths = 20;
  opts.base_seed = 40;
  std::vector<double> grid = {0.1, 1.0, 10.0};

  EnsembleSummary onto = run_ensemble(field, cfg, opts, IntervalUnion::whole_line(), grid);
  CHECK(onto.n_paths == 20);
  CHECK(onto.n_complete == 20);
  CHECK(onto.n_incomplete == 0);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    CHECK(onto.occ_mean[j] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(onto.hit_prob[j] == 1.0);
  }

  EnsembleSummary off = run_ensemble(field, cfg, opts, IntervalUnion{}, grid);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    CHECK(off.occ_mean[j] == 0.0);
    CHECK(off.hit_prob[j] == 0.0);
  }
}

TEST_CASE("ensemble reduction is identical for any thread count") {
  AlphaField field = AlphaField::two_level(0.3, 0.7, 0.0, 1.0);
  SimConfig cfg;
  cfg.dt = 0.02;
  cfg.x0 = 0.5;
  cfg.target_external_time = 100.0;
  IntervalUnion target{{0.0, 1.0}};
  std::vector<double> grid = {1.0, 10.0, 100.0};

  EnsembleOptions serial;
  serial.n_paths = 30;
  serial.base_seed = 12;
  serial.threads = 1;
  EnsembleOptions parallel = serial;
  parallel.threads = 4;

  EnsembleSummary a = run_ensemble(field, cfg, serial, target, grid);
  EnsembleSummary b = run_ensemble(field, cfg, parallel, target, grid);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    CHECK(a.occ_mean[j] == b.occ_mean[j]);  // bitwise: sorted-sum reduction
    CHECK(a.occ_ci_halfwidth[j] == b.occ_ci_halfwidth[j]);
    CHECK(a.hit_prob[j] == b.hit_prob[j]);
    CHECK(a.hit_ci_halfwidth[j] == b.hit_ci_halfwidth[j]);
  }
  CHECK(a.occ_mean[0] > 0.0);
  CHECK(a.occ_mean[0] < 1.0);
  CHECK(a.occ_ci_halfwidth[0] > 0.0);
}

TEST_CASE("a single path cannot fake a confidence interval") {
  AlphaField field = AlphaField::constant(0.5);
  SimConfig cfg;
  cfg.dt = 0.05;
  cfg.target_external_time = 1.0;
  EnsembleOptions opts;
  opts.n_paths = 1;
  EnsembleSummary s =
      run_ensemble(field, cfg, opts, IntervalUnion{{0.0, 1.0}}, {1.0});
  CHECK(std::isinf(s.occ_ci_halfwidth[0]));
}

TEST_CASE("too many truncated paths abort the ensemble") {
  AlphaField field = AlphaField::constant(0.5);
  SimConfig cfg;
  cfg.dt = 0.01;
  cfg.target_external_time = 1e6;
  cfg.max_steps = 50;  // nowhere near enough
  EnsembleOptions opts;
  opts.n_paths = 10;
  CHECK_THROWS_AS((void)run_ensemble(field, cfg, opts,
                                     IntervalUnion{{0.0, 1.0}}, {1.0}),
                  EnsembleError);
}

TEST_CASE("growth ensemble on a constant field tracks internal time") {
  // with the split set covering everything, occupation is internal time
  // itself, recorded at the first step past each grid value
  AlphaField field = AlphaField::constant(0.5);
  SimConfig cfg;
  cfg.dt = 0.25;
  cfg.target_external_time = 1e290;
  cfg.target_internal_time = 1100.0;
  EnsembleOptions opts;
  opts.n_paths = 30;
  opts.base_seed = 3;
  std::vector<double> grid = geometric_grid(1000.0, 3, 4);

  std::vector<GrowthSeries> series =
      run_growth_ensemble(field, cfg, opts, IntervalUnion::whole_line(), grid);
  REQUIRE(series.size() == 30);
  for (const auto& s : series) {
    REQUIRE(s.t.size() == grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
      CHECK(s.occupation[j] >= grid[j] - 1e-9);
      CHECK(s.occupation[j] <= grid[j] + cfg.dt + 1e-9);
      CHECK(s.sigma2[j] == 0.0);
      CHECK(s.sigma1[j] > 0.0);
    }
  }

  SlopeFit occ = fit_growth_exponent(series, GrowthQuantity::Occupation);
  CHECK(occ.slope == doctest::Approx(1.0).epsilon(0.01));

  // sigma over a constant-order region is self-similar with exponent 1/a = 2
  SlopeFit s1 = fit_growth_exponent(series, GrowthQuantity::Sigma1);
  CHECK(std::fabs(s1.slope - 2.0) <= 5.0 * s1.slope_stderr + 0.05);
}

TEST_CASE("regime verification refuses a field on the critical line") {
  AlphaField field = AlphaField::two_level(0.35, 0.7, 0.0, 1.0);
  SimConfig cfg;
  cfg.dt = 0.05;
  cfg.target_external_time = 100.0;
  EnsembleOptions opts;
  opts.n_paths = 4;
  CHECK_THROWS((void)verify_regime(field, cfg, opts));
}

TEST_CASE("enum labels are distinct and printable") {
  CHECK(std::string(to_string(GrowthQuantity::Occupation)) !=
        std::string(to_string(GrowthQuantity::Sigma1)));
  CHECK(std::string(to_string(Verdict::Consistent)) !=
        std::string(to_string(Verdict::Inconsistent)));
  CHECK(std::string(to_string(Verdict::Inconclusive)).size() > 0);
}
