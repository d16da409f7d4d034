#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "dbond/binaries.hpp"
#include "dbond/error.hpp"
#include "dbond/pde_oracle.hpp"
#include "dbond/pricer.hpp"

using namespace dbond;

namespace
{

const MarketParams base_market{0.1, 0.05, 1.0};
const DefaultSchedule base_schedule{{0, 3, 6}, {0.002, 0.005}, {100, 100}};
const BsCoefficients rel{0.0, 0.05, 1.0};

GridSpec grid_of(std::size_t n, std::size_t m)
{
  GridSpec g;
  g.n_space = n;
  g.n_time_per_interval = m;
  return g;
}

double extreme(const CascadeSolution& s, bool want_max)
{
  double v = want_max ? -INFINITY : INFINITY;
  for (const auto& slab : s.slabs)
    for (double u : slab.values)
      v = want_max ? std::max(v, u) : std::min(v, u);
  return v;
}

double first_order(BinaryKind kind, int sign, double K, double T, double x, double t)
{
  return price_binary({kind, SignVector(std::vector<int>{sign}), {K}, {T}, rel}, x, t).value;
}

} // namespace

TEST_CASE("constant solutions")
{
  const DefaultSchedule free{{0, 3, 6}, {0, 0}, {0, 0}};
  const CascadeSolution endo =
      solve_endogenous_cascade(base_market, free, {RecoveryMode::endogenous, 0.4, 2}, grid_of(256, 64));
  CHECK(std::abs(extreme(endo, true) - 1.0) <= 1e-10);
  CHECK(std::abs(extreme(endo, false) - 1.0) <= 1e-10);

  const CascadeSolution full =
      solve_exogenous_cascade(base_market, base_schedule, {RecoveryMode::exogenous, 1.0, 1}, grid_of(256, 64));
  CHECK(std::abs(extreme(full, true) - 1.0) <= 1e-10);
  CHECK(std::abs(extreme(full, false) - 1.0) <= 1e-10);
}

TEST_CASE("single interval against closed forms")
{
  const DefaultSchedule one{{0, 6}, {0}, {100}};
  const RecoveryModel rec{RecoveryMode::endogenous, 0.5, 100};
  GridSpec g = grid_of(2048, 2048);
  g.probes = {30, 500};
  const CascadeSolution u = solve_endogenous_cascade(base_market, one, rec, g);
  const CascadeSolution W = solve_survival_cascade(base_market, one, g);
  for (double x : {30.0, 70.0, 100.0, 140.0, 500.0})
    for (double t : {0.0, 2.0, 5.0})
    {
      CAPTURE(x);
      CAPTURE(t);
      const double bplus = first_order(BinaryKind::bond, 1, 100, 6, x, t);
      const double closed = bplus + 0.005 * first_order(BinaryKind::asset, -1, 100, 6, x, t);
      CHECK(std::abs(sample(u, x, t) - closed) <= 5e-4);
      CHECK(std::abs(sample(W, x, t) - bplus) <= 5e-4);
    }
}

TEST_CASE("exogenous cascade against the closed form, both forms")
{
  GridSpec g = grid_of(2048, 2048);
  g.probes = {200};
  const RecoveryModel rec{RecoveryMode::exogenous, 0.5, 1};
  const CascadeSolution direct = solve_exogenous_cascade(base_market, base_schedule, rec, g);
  const CascadeSolution via_w =
      solve_exogenous_cascade(base_market, base_schedule, rec, g, ExogenousForm::survival);
  const CascadeSolution W = solve_survival_cascade(base_market, base_schedule, g);
  for (double t : {0.0, 1.5, 3.0, 4.5})
  {
    const double w = survival_probability(base_market, base_schedule, 200, t).value;
    CHECK(std::abs(sample(W, 200, t) - w) <= 1e-3);
    CHECK(std::abs(sample(direct, 200, t) - (0.5 + 0.5 * w)) <= 1e-3);
    CHECK(std::abs(sample(direct, 200, t) - sample(via_w, 200, t)) <= 1e-6);
  }
}

TEST_CASE("second order convergence away from the barrier")
{
  const DefaultSchedule one{{0, 4}, {0.1}, {100}};
  std::vector<double> probes;
  for (int k = 0; k < 5; ++k)
  {
    probes.push_back(100 * std::exp(-0.4 - 0.15 * k));
    probes.push_back(100 * std::exp(0.4 + 0.15 * k));
  }
  const auto worst = [&](std::size_t n) {
    GridSpec g = grid_of(n, n);
    g.x_min = 100 * std::exp(-7.0);
    g.x_max = 100 * std::exp(7.0);
    const CascadeSolution W = solve_survival_cascade(base_market, one, g);
    double e = 0.0;
    for (double x : probes)
    {
      const double closed = std::exp(-0.4) * first_order(BinaryKind::bond, 1, 100, 4, x, 0);
      e = std::max(e, std::abs(sample(W, x, 0) - closed));
    }
    return e;
  };
  const double e1 = worst(256), e2 = worst(512), e3 = worst(1024);
  MESSAGE("errors ", e1, " ", e2, " ", e3);
  CHECK(e1 / e2 > 3.0);
  CHECK(e1 / e2 < 5.5);
  CHECK(e2 / e3 > 3.0);
  CHECK(e2 / e3 < 5.5);
}

TEST_CASE("sampling")
{
  CascadeSolution s;
  s.dates = {0, 1};
  s.y_min = -1.0;
  s.dy = 0.5;
  s.n_space = 5;
  CascadeSolution::Slab slab;
  slab.times = {0, 0.5, 1};
  for (double t : slab.times)
    for (std::size_t j = 0; j < 5; ++j)
      slab.values.push_back(2.0 * (s.y_min + s.dy * static_cast<double>(j)) + 3.0 * t);
  s.slabs.push_back(slab);

  CHECK(sample(s, std::exp(0.0), 0.5) == slab.values[5 + 2]);
  CHECK(sample(s, std::exp(-1.0), 0.0) == slab.values[0]);
  CHECK(sample(s, std::exp(-0.25), 0.25) == doctest::Approx(2.0 * -0.25 + 0.75).epsilon(1e-14));
  CHECK(sample(s, std::exp(0.75), 0.75) == doctest::Approx(0.5 * (slab.values[5 + 3] + slab.values[5 + 4]) + 0.75)
                                               .epsilon(1e-14));
  CHECK_THROWS_AS(sample(s, std::exp(1.5), 0.5), DomainError);
  CHECK_THROWS_AS(sample(s, 1.0, 1.5), DomainError);
  CHECK_THROWS_AS(sample(s, 0.0, 0.5), DomainError);
  CHECK_THROWS_AS(sample(CascadeSolution{}, 1.0, 0.0), DomainError);
}

TEST_CASE("refinement of off-grid samples")
{
  const RecoveryModel rec{RecoveryMode::endogenous, 0.5, 100};
  GridSpec coarse = grid_of(512, 512), fine = grid_of(1024, 1024);
  coarse.x_min = fine.x_min = 1e-2;
  coarse.x_max = fine.x_max = 1e5;
  const CascadeSolution a = solve_endogenous_cascade(base_market, base_schedule, rec, coarse);
  const CascadeSolution b = solve_endogenous_cascade(base_market, base_schedule, rec, fine);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  for (int k = 0; k < 50; ++k)
  {
    const double x = 20 * std::exp(4.0 * u(rng)), t = 5.9 * u(rng);
    CHECK(std::abs(sample(a, x, t) - sample(b, x, t)) <= 2e-3);
  }
}

TEST_CASE("maximum principle and continuity within intervals")
{
  const DefaultSchedule s{{0, 2, 4, 6}, {0.3, 0.05, 0.1}, {120, 60, 100}};
  for (double n : {1.0, 100.0, 1000.0})
  {
    const CascadeSolution u =
        solve_endogenous_cascade(base_market, s, {RecoveryMode::endogenous, 0.5, n}, grid_of(512, 256));
    CHECK(extreme(u, false) >= -1e-12);
    CHECK(extreme(u, true) <= 1.0 + 1e-12);
    for (const auto& slab : u.slabs)
      for (std::size_t k = 0; k + 1 < slab.times.size(); ++k)
      {
        double jump = 0.0;
        for (std::size_t j = 0; j < u.n_space; ++j)
          jump = std::max(jump, std::abs(slab.values[k * u.n_space + j] - slab.values[(k + 1) * u.n_space + j]));
        // Rows next to a discontinuous terminal row move fastest; the rest are smooth.
        if (k + slab.times.size() / 10 < slab.times.size())
          CHECK(jump <= 0.05);
      }
  }
  const CascadeSolution W = solve_survival_cascade(base_market, s, grid_of(512, 256));
  CHECK(extreme(W, false) >= -1e-12);
  CHECK(extreme(W, true) <= 1.0 + 1e-12);
}

TEST_CASE("grid checks and accuracy warning")
{
  const RecoveryModel rec{RecoveryMode::exogenous, 0.5, 1};
  CHECK_THROWS_AS(solve_exogenous_cascade(base_market, base_schedule, rec, grid_of(32, 64)), DomainError);
  CHECK_THROWS_AS(solve_exogenous_cascade(base_market, base_schedule, rec, grid_of(64, 8)), DomainError);
  GridSpec bad = grid_of(64, 16);
  bad.x_min = 10;
  bad.x_max = 5;
  CHECK_THROWS_AS(solve_exogenous_cascade(base_market, base_schedule, rec, bad), DomainError);
  CHECK_THROWS_AS(solve_endogenous_cascade(base_market, base_schedule, rec, grid_of(64, 16)), DomainError);

  GridSpec rough = grid_of(128, 32);
  rough.probes = {200};
  rough.richardson_tolerance = 1e-9;
  const CascadeSolution s = solve_exogenous_cascade(base_market, base_schedule, rec, rough);
  CHECK(s.accuracy_warning);
  CHECK(!s.warning.empty());

  const GridSpec auto_grid = resolve_grid(base_market, base_schedule, rec, grid_of(64, 16));
  CHECK(auto_grid.x_min <= 100.0 / 20.0);
  CHECK(auto_grid.x_max >= 20.0 * 100.0);
}
