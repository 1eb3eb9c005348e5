#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "varalpha/alpha_field.hpp"
#include "varalpha/intervals.hpp"
#include "varalpha/rng.hpp"
#include "varalpha/sim.hpp"

using namespace varalpha;

namespace {

// Hand-built path. Holding intervals of the clock and their owners:
//   [0, 2)  owned by 0.5,  [2, 3) owned by 1.5,  [3, 7) owned by -0.7.
CoupledPath toy_path() {
  CoupledPath p;
  p.steps = {{0.0, 0.5, 0.0}, {0.1, 1.5, 2.0}, {0.2, -0.7, 3.0}, {0.3, 2.2, 7.0}};
  return p;
}

}  // namespace

TEST_CASE("inversion picks the owner of the holding interval") {
  const CoupledPath p = toy_path();
  TimeChangedSample s = invert_time_change(p, {0.0, 0.5, 2.0, 2.5, 3.0, 6.9});
  REQUIRE(s.positions.size() == 6);
  CHECK(s.positions[0] == 0.5);  // value at time zero is the start point
  CHECK(s.positions[1] == 0.5);
  CHECK(s.positions[2] == 1.5);  // [2,3) belongs to the point that made it
  CHECK(s.positions[3] == 1.5);
  CHECK(s.positions[4] == -0.7);
  CHECK(s.positions[5] == -0.7);

  CHECK(s.g_values[1] == 0.0);
  CHECK(s.h_values[1] == 2.0);
  CHECK(s.g_values[3] == 2.0);
  CHECK(s.h_values[3] == 3.0);
  CHECK(s.l_values[1] == doctest::Approx(0.1));
  CHECK(s.l_values[2] == doctest::Approx(0.2));

  CHECK(s.ages[1] == doctest::Approx(0.5));
  CHECK(s.ages[2] == doctest::Approx(0.0));
  CHECK(s.ages[5] == doctest::Approx(3.9));
}

TEST_CASE("ages coalesce runs of equal values") {
  CoupledPath p;
  p.steps = {{0.0, 2.0, 0.0}, {0.1, 2.0, 1.5}, {0.2, 5.0, 4.0}, {0.3, 6.0, 9.0}};
  TimeChangedSample s = invert_time_change(p, {3.0, 5.0});
  CHECK(s.positions[0] == 2.0);
  CHECK(s.g_values[0] == 1.5);
  CHECK(s.h_values[0] == 4.0);
  // the value 2.0 has been in force since clock 0, across two holding
  // intervals, so the age looks through the seam
  CHECK(s.ages[0] == doctest::Approx(3.0));
  CHECK(s.positions[1] == 5.0);
  CHECK(s.ages[1] == doctest::Approx(1.0));
}

TEST_CASE("inversion rejects bad grids") {
  const CoupledPath p = toy_path();
  CHECK_THROWS_AS((void)invert_time_change(p, {1.0, 8.0}), PathTooShort);
  CHECK_THROWS_AS((void)invert_time_change(p, {7.0}), PathTooShort);  // not strict
  CHECK_THROWS((void)invert_time_change(p, {2.0, 1.0}));
  CHECK_THROWS((void)invert_time_change(p, {-1.0, 1.0}));
}

TEST_CASE("exact occupation fraction on a known path") {
  const CoupledPath p = toy_path();
  IntervalUnion a{{1.0, 2.0}};  // contains only the owner 1.5
  CHECK(occupation_fraction(p, a, 1.0) == doctest::Approx(0.0));
  CHECK(occupation_fraction(p, a, 2.5) == doctest::Approx(0.2));
  CHECK(occupation_fraction(p, a, 6.0) == doctest::Approx(1.0 / 6.0));
  CHECK(occupation_fraction(p, a, 7.0) == doctest::Approx(1.0 / 7.0));

  IntervalUnion b{{0.0, 1.0}};  // contains only the owner 0.5
  CHECK(occupation_fraction(p, b, 1.0) == doctest::Approx(1.0));
  CHECK(occupation_fraction(p, b, 3.0) == doctest::Approx(2.0 / 3.0));

  CHECK_THROWS((void)occupation_fraction(p, a, 7.5));
  CHECK_THROWS((void)occupation_fraction(p, a, 0.0));
}

TEST_CASE("grid quadrature approaches the exact fraction") {
  const CoupledPath p = toy_path();
  std::vector<double> grid;
  for (int i = 0; i < 690; ++i) grid.push_back(0.01 * i);
  TimeChangedSample s = invert_time_change(p, grid);
  IntervalUnion a{{1.0, 2.0}};
  CHECK(occupation_fraction(s, a, 6.0) ==
        doctest::Approx(occupation_fraction(p, a, 6.0)).epsilon(0.01));
}

TEST_CASE("simulated paths satisfy the structural invariants") {
  AlphaField field = AlphaField::two_level(0.3, 0.7, 0.0, 1.0);
  SimConfig cfg;
  cfg.dt = 0.01;
  cfg.x0 = 0.5;
  cfg.target_external_time = 50.0;
  IntervalUnion split{{0.0, 1.0}};
  std::vector<NamedSet> named = {{"left", IntervalUnion{{-1e308, 0.0}}},
                                 {"right", IntervalUnion{{0.0, 1e308}}}};
  RandomStream rs(101, 0);
  CoupledPath p = simulate_coupled(field, cfg, rs, &split, named);

  REQUIRE(p.status == PathStatus::Complete);
  REQUIRE(p.steps.size() >= 2);
  CHECK(p.steps[0].s == 0.0);
  CHECK(p.steps[0].b == 0.5);
  CHECK(p.steps[0].sigma == 0.0);
  CHECK(p.final_sigma() > cfg.target_external_time);

  bool clock_increasing = true, internal_uniform = true;
  for (std::size_t k = 1; k < p.steps.size(); ++k) {
    clock_increasing = clock_increasing && p.steps[k].sigma > p.steps[k - 1].sigma;
    internal_uniform =
        internal_uniform &&
        std::fabs(p.steps[k].s - p.steps[k - 1].s - cfg.dt) < 1e-12;
  }
  CHECK(clock_increasing);
  CHECK(internal_uniform);

  // recompute the accumulators from the stored steps: each clock jump and
  // each slice of internal time belongs to the pre-move position
  double s1 = 0.0, s2 = 0.0, occ = 0.0, occ_l = 0.0, occ_r = 0.0;
  for (std::size_t k = 1; k < p.steps.size(); ++k) {
    const double jump = p.steps[k].sigma - p.steps[k - 1].sigma;
    const double owner = p.steps[k - 1].b;
    (split.contains(owner) ? s1 : s2) += jump;
    if (split.contains(owner)) occ += cfg.dt;
    if (named[0].set.contains(owner)) occ_l += cfg.dt;
    if (named[1].set.contains(owner)) occ_r += cfg.dt;
  }
  CHECK(p.sigma1 == doctest::Approx(s1).epsilon(1e-12));
  CHECK(p.sigma2 == doctest::Approx(s2).epsilon(1e-12));
  CHECK(p.sigma1 + p.sigma2 == doctest::Approx(p.final_sigma()).epsilon(1e-12));
  CHECK(p.split_occupation == doctest::Approx(occ).epsilon(1e-12));
  REQUIRE(p.occupation.size() == 2);
  CHECK(p.occupation[0].first == "left");
  CHECK(p.occupation[0].second == doctest::Approx(occ_l).epsilon(1e-12));
  CHECK(p.occupation[1].second == doctest::Approx(occ_r).epsilon(1e-12));
  CHECK(p.occupation[0].second + p.occupation[1].second ==
        doctest::Approx(p.final_internal_time()).epsilon(1e-12));
}

TEST_CASE("same seed and stream replays the path bit for bit") {
  AlphaField field = AlphaField::constant(0.5);
  SimConfig cfg;
  cfg.dt = 0.05;
  cfg.target_external_time = 10.0;
  RandomStream r1(7, 3), r2(7, 3), r3(7, 4);
  CoupledPath a = simulate_coupled(field, cfg, r1);
  CoupledPath b = simulate_coupled(field, cfg, r2);
  CoupledPath c = simulate_coupled(field, cfg, r3);
  REQUIRE(a.steps.size() == b.steps.size());
  bool identical = true;
  for (std::size_t k = 0; k < a.steps.size(); ++k)
    identical = identical && a.steps[k].s == b.steps[k].s &&
                a.steps[k].b == b.steps[k].b && a.steps[k].sigma == b.steps[k].sigma;
  CHECK(identical);
  CHECK(r1.counter() == r2.counter());
  CHECK(a.final_sigma() != c.final_sigma());
}

TEST_CASE("streaming run equals store-then-invert") {
  AlphaField field = AlphaField::two_level(0.3, 0.7, 0.0, 1.0);
  SimConfig cfg;
  cfg.dt = 0.02;
  cfg.x0 = 0.5;
  cfg.target_external_time = 200.0;
  IntervalUnion split{{0.0, 1.0}};
  std::vector<double> grid = {0.5, 2.0, 10.0, 50.0, 150.0, 200.0};

  RandomStream r1(2025, 11), r2(2025, 11);
  CoupledPath stored = simulate_coupled(field, cfg, r1, &split);
  TimeChangedSample inv = invert_time_change(stored, grid);
  StreamedPath live = simulate_streaming(field, cfg, r2, grid, &split);

  CHECK(r1.counter() == r2.counter());
  CHECK(live.status == stored.status);
  CHECK(live.sigma1 == stored.sigma1);
  CHECK(live.sigma2 == stored.sigma2);
  CHECK(live.split_occupation == stored.split_occupation);
  CHECK(live.final_sigma == stored.final_sigma());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    CHECK(live.sample.positions[j] == inv.positions[j]);
    CHECK(live.sample.g_values[j] == inv.g_values[j]);
    CHECK(live.sample.h_values[j] == inv.h_values[j]);
    CHECK(live.sample.l_values[j] == inv.l_values[j]);
    CHECK(live.sample.ages[j] == inv.ages[j]);
    // the streamed coverage equals the exact occupation from the full path
    CHECK(live.split_coverage[j] ==
          doctest::Approx(occupation_fraction(stored, split, grid[j]) * grid[j])
              .epsilon(1e-12));
  }
}

TEST_CASE("exhausted step budget is reported, not papered over") {
  AlphaField field = AlphaField::constant(0.5);
  SimConfig cfg;
  cfg.dt = 0.01;
  cfg.target_external_time = 2000.0;
  cfg.max_steps = 5;

  RandomStream r1(3, 0);
  CoupledPath p = simulate_coupled(field, cfg, r1);
  CHECK(p.status == PathStatus::StepBudgetExhausted);
  CHECK(p.steps.size() == 6);  // start point plus 5 steps

  RandomStream r2(3, 0);
  StreamedPath sp = simulate_streaming(field, cfg, r2, {1e-7, 1000.0});
  CHECK(sp.status == PathStatus::StepBudgetExhausted);
  CHECK(std::isfinite(sp.sample.positions[0]));
  CHECK(std::isnan(sp.sample.positions[1]));  // never reached
}

TEST_CASE("clock overflow past the cap is reported") {
  FieldLimits wide{0.05, 0.95};
  AlphaField field = AlphaField::constant(0.05, wide);
  SimConfig cfg;
  cfg.dt = 10.0;
  cfg.target_external_time = 1e250;
  cfg.overflow_cap = 1e30;  // cannot complete: the cap sits below the target
  RandomStream rs(11, 2);
  CoupledPath p = simulate_coupled(field, cfg, rs);
  CHECK(p.status == PathStatus::TimeOverflow);
  CHECK(std::isfinite(p.final_sigma()));
  CHECK(p.final_sigma() <= cfg.overflow_cap);
  CHECK(std::string(to_string(p.status)) != "");
}

TEST_CASE("streaming grid beyond the target is rejected") {
  AlphaField field = AlphaField::constant(0.5);
  SimConfig cfg;
  cfg.target_external_time = 10.0;
  RandomStream rs(1, 1);
  CHECK_THROWS((void)simulate_streaming(field, cfg, rs, {1.0, 11.0}));
}

TEST_CASE("constant order: clock increments carry the exact stable law") {
  // With dt a power of two the internal horizon 1.0 is hit exactly, and by
  // self-similarity sigma(1) has E exp(-l sigma) = exp(-l^a). This pins the
  // composition of per-step scalings across the whole run.
  const double a = 0.5;
  AlphaField field = AlphaField::constant(a);
  SimConfig cfg;
  cfg.dt = 0.0625;
  cfg.target_external_time = 1e290;
  cfg.target_internal_time = 1.0;
  const int n = 3000;
  std::vector<double> sig(n), endpoint(n);
  for (int i = 0; i < n; ++i) {
    RandomStream rs(909, static_cast<std::uint64_t>(i));
    CoupledPath p = simulate_coupled(field, cfg, rs);
    REQUIRE(p.status == PathStatus::Complete);
    REQUIRE(p.final_internal_time() == doctest::Approx(1.0).epsilon(1e-12));
    sig[i] = p.final_sigma();
    endpoint[i] = p.steps.back().b;
  }
  for (double l : {0.5, 1.0, 2.0}) {
    double sum = 0.0, ss = 0.0;
    for (double v : sig) {
      const double e = std::exp(-l * v);
      sum += e;
      ss += e * e;
    }
    const double mean = sum / n;
    const double se = std::sqrt((ss / n - mean * mean) / (n - 1));
    CHECK(std::fabs(mean - std::exp(-std::pow(l, a))) <= 4.5 * se);
  }
  // the driving motion at internal time 1 is N(x0, 1)
  double m1 = 0.0, m2 = 0.0;
  for (double b : endpoint) {
    m1 += b;
    m2 += b * b;
  }
  m1 /= n;
  m2 = m2 / n - m1 * m1;
  CHECK(std::fabs(m1 - cfg.x0) < 5.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::fabs(m2 - 1.0) < 5.0 * std::sqrt(2.0 / n));
}

TEST_CASE("path dumps round-trip exactly") {
  AlphaField field = AlphaField::two_level(0.3, 0.7, 0.0, 1.0);
  SimConfig cfg;
  cfg.dt = 0.05;
  cfg.x0 = 0.5;
  cfg.target_external_time = 5.0;
  IntervalUnion split{{0.0, 1.0}};
  RandomStream rs(55, 9);
  CoupledPath p = simulate_coupled(field, cfg, rs, &split);

  std::stringstream buf;
  write_path_dump(p, cfg.dt, 0xfeedfaceULL, buf);
  double dt_back = 0.0;
  std::uint64_t hash_back = 0;
  CoupledPath q = read_path_dump(buf, &dt_back, &hash_back);

  CHECK(dt_back == cfg.dt);
  CHECK(hash_back == 0xfeedfaceULL);
  CHECK(q.status == p.status);
  CHECK(q.sigma1 == p.sigma1);
  CHECK(q.sigma2 == p.sigma2);
  CHECK(q.split_occupation == p.split_occupation);
  REQUIRE(q.steps.size() == p.steps.size());
  bool identical = true;
  for (std::size_t k = 0; k < p.steps.size(); ++k)
    identical = identical && q.steps[k].s == p.steps[k].s &&
                q.steps[k].b == p.steps[k].b && q.steps[k].sigma == p.steps[k].sigma;
  CHECK(identical);

  std::stringstream bad("not a dump");
  CHECK_THROWS((void)read_path_dump(bad));
}
