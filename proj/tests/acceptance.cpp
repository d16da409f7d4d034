// Acceptance driver: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "dbond/binaries.hpp"
#include "dbond/intbin.hpp"
#include "dbond/mc_oracle.hpp"
#include "dbond/mvn.hpp"
#include "dbond/pde_oracle.hpp"
#include "dbond/pricer.hpp"
#include "dbond/scenario.hpp"
#include "figure_trends.hpp"
#include "oracles.hpp"

using namespace dbond;
using namespace dbond::testing;

namespace
{

const MarketParams base_market{0.1, 0.05, 1.0};
const DefaultSchedule base_schedule{{0, 3, 6}, {0.002, 0.005}, {100, 100}};
const double probe_times[] = {0.0, 1.5, 3.0, 4.5};

struct Outcome
{
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what)
  {
    if (!ok)
    {
      if (pass)
        detail << "first failure: " << what << "; ";
      pass = false;
    }
  }
};

// Closed form against the PDE cascade and 10^6 antithetic paths at x = 200.
void three_way(Outcome& o, const RecoveryModel& rec, const char* label)
{
  GridSpec grid;
  grid.n_space = 2048;
  grid.n_time_per_interval = 2048;
  grid.probes = {200};
  const CascadeSolution pde = rec.mode == RecoveryMode::exogenous
                                  ? solve_exogenous_cascade(base_market, base_schedule, rec, grid)
                                  : solve_endogenous_cascade(base_market, base_schedule, rec, grid);
  SimConfig sim;
  sim.n_paths = 1'000'000;
  double worst_pde = 0.0, worst_sigma = 0.0;
  for (double t : probe_times)
  {
    const PriceReport closed = price_relative(base_market, base_schedule, rec, 200, t);
    const double disc = std::exp(-0.1 * (6 - t));
    const double pde_c = disc * sample(pde, 200, t);
    const SimResult mc = simulate_relative(base_market, base_schedule, rec, 200, t, sim);
    const double d = std::abs(closed.price - pde_c);
    const double sig = std::abs(closed.price - mc.price) / mc.std_error;
    worst_pde = std::max(worst_pde, d);
    worst_sigma = std::max(worst_sigma, sig);
    std::ostringstream where;
    where << label << " t=" << t;
    o.require(d <= 1e-3, where.str() + " PDE");
    o.require(sig <= 3.0, where.str() + " MC");
  }
  o.detail << label << ": max|closed-PDE|=" << worst_pde << " max MC sigmas=" << worst_sigma << "; ";
}

void criterion_1(Outcome& o)
{
  three_way(o, {RecoveryMode::exogenous, 0.5, 1}, "exogenous");
}

void criterion_2(Outcome& o)
{
  three_way(o, {RecoveryMode::endogenous, 0.5, 100}, "case i (n/R=200)");
  three_way(o, {RecoveryMode::endogenous, 0.5, 1}, "case ii (n/R=2)");
}

void criterion_3(Outcome& o)
{
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> u(0, 1);
  double worst_parity = 0.0;
  for (int k = 0; k < 10000; ++k)
  {
    const std::size_t m = 1 + k % 2;
    BinarySpec s = random_spec(rng, m);
    const double x = s.strikes[0] * std::exp(2.0 * (u(rng) - 0.5));
    const double t = -u(rng);
    std::vector<int> signs(s.signs.values().begin(), s.signs.values().end());
    signs.back() = 1;
    BinarySpec plus = s;
    plus.signs = SignVector(signs);
    signs.back() = -1;
    BinarySpec minus = s;
    minus.signs = SignVector(signs);
    const double total = price_binary(plus, x, t).value + price_binary(minus, x, t).value;
    const double expected = drop_last(s, x, t, {});
    const double err = std::abs(total - expected) / std::max(1.0, expected);
    worst_parity = std::max(worst_parity, err);
  }
  o.require(worst_parity <= 1e-12, "last-sign parity");

  double worst_shift = 0.0;
  for (std::size_t m = 1; m <= 4; ++m)
    for (int k = 0; k < (m <= 2 ? 250 : 8); ++k)
    {
      const BinarySpec b = random_spec(rng, m);
      const double x = b.strikes[0] * std::exp(u(rng) - 0.5);
      const ShiftedBinary sh = shift_coefficients(b, -0.1 + 0.3 * u(rng), 0.0);
      const double lhs = price_binary(b, x, 0.0).value;
      const double rhs = sh.scale * price_binary(sh.spec, x, 0.0).value;
      worst_shift = std::max(worst_shift, std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-300));
    }
  o.require(worst_shift <= 1e-10, "coefficient shift");

  double worst_nest = 0.0;
  for (std::size_t m = 2; m <= 3; ++m)
    for (int k = 0; k < 4; ++k)
    {
      const BinarySpec s = random_spec(rng, m);
      const double x = s.strikes[0] * std::exp(0.3 * (k - 1.5));
      const double scale = s.kind == BinaryKind::asset ? x : 1.0;
      worst_nest = std::max(worst_nest, std::abs(price_binary(s, x, 0.0).value - nested_by_pde(s, x, 0.0)) / scale);
    }
  o.require(worst_nest <= 5e-4, "nesting");
  o.detail << "parity " << worst_parity << " (10^4 specs), shift rel " << worst_shift << ", nesting "
           << worst_nest;
}

void criterion_4(Outcome& o)
{
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> lim(-1.0, 2.0);
  double worst_marg = 0.0;
  int monotone_breaks = 0;
  for (std::size_t m = 2; m <= 6; ++m)
    for (int k = 0; k < 3; ++k)
    {
      double t;
      std::vector<double> ex;
      const Eigen::MatrixXd cov = random_schedule_cov(rng, m, t, ex);
      const SignVector s = random_signs(rng, m);
      std::vector<double> a(m);
      for (auto& v : a)
        v = lim(rng);
      std::vector<double> open = a;
      open.back() = inf;
      const double full = mvn_cdf(open, cov, s).value;
      const std::vector<double> head(a.begin(), a.end() - 1);
      const std::vector<int> hs(s.values().begin(), s.values().end() - 1);
      const double sub = mvn_cdf(head, cov.topLeftCorner(m - 1, m - 1), SignVector(hs)).value;
      worst_marg = std::max(worst_marg, std::abs(full - sub));

      std::vector<double> b = a;
      b[rng() % m] += 0.5;
      if (mvn_cdf(a, cov, s).value > mvn_cdf(b, cov, s).value + 1e-9)
        ++monotone_breaks;
    }
  o.require(worst_marg <= 1e-9, "marginalization");
  o.require(monotone_breaks == 0, "monotonicity");

  double worst_brute = 0.0;
  std::uniform_real_distribution<double> lim3(-1.5, 2.0);
  for (int k = 0; k < 10; ++k)
  {
    double t;
    std::vector<double> ex;
    const Eigen::MatrixXd cov = random_schedule_cov(rng, 3, t, ex);
    const std::vector<double> a{lim3(rng), lim3(rng), lim3(rng)};
    worst_brute = std::max(worst_brute, std::abs(mvn_cdf(a, cov, SignVector::all_plus(3)).value -
                                                 trivariate_reference(a.data(), cov)));
  }
  o.require(worst_brute <= 1e-6, "m=3 brute force");

  double worst_inv = 0.0;
  for (int k = 0; k < 500; ++k)
  {
    const std::size_t m = 1 + rng() % 8;
    double t;
    std::vector<double> ex;
    random_schedule_cov(rng, m, t, ex);
    const auto c = build_correlation(t, ex);
    worst_inv = std::max(worst_inv, (c.precision() * c.covariance() - Eigen::MatrixXd::Identity(m, m))
                                        .cwiseAbs()
                                        .maxCoeff());
  }
  o.require(worst_inv <= 1e-12, "precision times covariance");
  o.detail << "marginalization " << worst_marg << ", monotonicity breaks " << monotone_breaks
           << ", m=3 vs quadrature " << worst_brute << ", |PC-I| " << worst_inv;
}

void criterion_5(Outcome& o)
{
  const BsCoefficients c{0.0, 0.05, 1.0};
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> u(0, 1);
  IntegralOptions tight;
  tight.quadrature.abs_tolerance = 1e-13;
  double worst_add = 0.0;
  for (int k = 0; k < 20; ++k)
  {
    const double C = 3 * u(rng), D = C + 0.1 + 3 * u(rng), M = C + (D - C) * u(rng);
    const double lambda = 0.5 * u(rng), x = 80 + 200 * u(rng);
    const BinaryKind kind = k % 2 ? BinaryKind::asset : BinaryKind::bond;
    const BinarySpec b{kind, SignVector(std::vector<int>{(rng() & 1) ? 1 : -1}), {50 + 150 * u(rng)}, {D}, c};
    const double whole = integral_binary({b, lambda, C, C, D}, x, 0, tight).value;
    const double parts = integral_binary({b, lambda, C, C, M}, x, 0, tight).value +
                         integral_binary({b, lambda, C, M, D}, x, 0, tight).value;
    worst_add = std::max(worst_add, std::abs(whole - parts) / (kind == BinaryKind::asset ? x : 1.0));
  }
  o.require(worst_add <= 1e-12, "additivity");

  double worst_const = 0.0;
  for (double lambda : {0.001, 0.05, 0.7, 3.0})
    for (auto [C, D] : {std::pair{0.0, 1.0}, std::pair{3.0, 6.0}, std::pair{2.0, 2.5}})
    {
      const double v = integrate_exponential_weight(lambda, C, C, D, [](double) { return 1.0; }).value;
      worst_const = std::max(worst_const, std::abs(v - (1.0 - std::exp(-lambda * (D - C)))));
    }
  o.require(worst_const <= 1e-12, "constant integrand");

  const BinarySpec b{BinaryKind::bond, SignVector(std::vector<int>{1}), {200}, {6}, c};
  const WeightedIntegralSpec s{b, 0.005, 3, 3, 6};
  const double simp = std::abs(integral_binary(s, 200, 0).value - simpson(s, 200, 0, 1 << 14));
  o.require(simp <= 1e-6, "dense Simpson");
  o.detail << "additivity " << worst_add << ", constant integrand " << worst_const << ", Simpson " << simp;
}

void criterion_6(Outcome& o)
{
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> u(0, 1);
  double worst_full = 0.0, w_lo = 1.0, w_hi = 0.0;
  for (int k = 0; k < 1000; ++k)
  {
    const MarketParams p{0.15 * u(rng), 0.1 * u(rng), 0.2 + 1.3 * u(rng)};
    const DefaultSchedule s{{0, 0.5 + 4 * u(rng), 6}, {0.3 * u(rng), 0.3 * u(rng)}, {200 * u(rng), 200 * u(rng)}};
    const double t = 5.99 * u(rng), x = 1 + 500 * u(rng);
    const PriceReport r = price_relative(p, s, {RecoveryMode::exogenous, 1.0, 1}, x, t);
    worst_full = std::max(worst_full, std::abs(r.price - std::exp(-p.r * (6 - t))));
    const double w = survival_probability(p, s, x, t).value;
    w_lo = std::min(w_lo, w);
    w_hi = std::max(w_hi, w);
  }
  o.require(worst_full <= 1e-12, "R=1");

  const DefaultSchedule free{{0, 3, 6}, {0, 0}, {0, 0}};
  GridSpec grid;
  grid.n_space = 2048;
  grid.n_time_per_interval = 2048;
  grid.probes = {200};
  SimConfig sim;
  sim.n_paths = 100'000;
  double worst_closed = 0.0, worst_pde = 0.0, worst_mc = 0.0;
  for (const RecoveryModel& rec :
       {RecoveryModel{RecoveryMode::exogenous, 0.5, 1}, RecoveryModel{RecoveryMode::endogenous, 0.5, 100},
        RecoveryModel{RecoveryMode::endogenous, 0.5, 1}})
  {
    const CascadeSolution pde = rec.mode == RecoveryMode::exogenous
                                    ? solve_exogenous_cascade(base_market, free, rec, grid)
                                    : solve_endogenous_cascade(base_market, free, rec, grid);
    for (double t : probe_times)
    {
      const double disc = std::exp(-0.1 * (6 - t));
      worst_closed = std::max(worst_closed, std::abs(price_relative(base_market, free, rec, 200, t).price - disc));
      worst_pde = std::max(worst_pde, std::abs(disc * sample(pde, 200, t) - disc));
      worst_mc = std::max(worst_mc, std::abs(simulate_relative(base_market, free, rec, 200, t, sim).price - disc));
    }
  }
  o.require(worst_closed <= 1e-12, "zero-intensity closed form");
  o.require(worst_pde <= 1e-10, "zero-intensity PDE");
  o.require(worst_mc == 0.0, "zero-intensity MC");

  const CascadeSolution W = solve_survival_cascade(base_market, base_schedule, grid);
  for (const auto& slab : W.slabs)
    for (double w : slab.values)
    {
      w_lo = std::min(w_lo, w);
      w_hi = std::max(w_hi, w);
    }
  o.require(w_lo >= 0.0 && w_hi <= 1.0, "W range");
  o.detail << "R=1 " << worst_full << "; lambda=K=0: closed " << worst_closed << ", PDE " << worst_pde
           << ", MC " << worst_mc << "; W in [" << w_lo << ", " << w_hi << "]";
}

void criterion_7(Outcome& o)
{
  int passed = 0;
  for (int n = 1; n <= figure_count; ++n)
  {
    const TrendCheck r = check_figure(n);
    o.require(r.pass, "figure " + std::to_string(n) + ": " + r.detail);
    passed += r.pass;
  }
  o.detail << passed << " of " << figure_count << " figure presets ordered as expected";
}

void criterion_8(Outcome& o)
{
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> u(0, 1);
  const RecoveryModel recs[] = {{RecoveryMode::exogenous, 0.5, 1},
                                {RecoveryMode::endogenous, 0.5, 100},
                                {RecoveryMode::endogenous, 0.5, 1}};
  double worst = 0.0;
  int done = 0;
  while (done < 100)
  {
    const double x = 20 * std::exp(std::log(100.0) * u(rng));
    const RecoveryModel& rec = recs[done % 3];
    const std::size_t i = rng() % 2;
    const double K = base_schedule.barriers[i];
    if (std::abs(std::log(x / K)) < 0.01)
      continue;
    const double t1 = base_schedule.dates[i + 1];
    // C_i just before t_{i+1} against the terminal data built from C_{i+1}.
    const double disc = std::exp(-0.1 * (6 - t1));
    const double before = price_relative(base_market, base_schedule, rec, x, t1 - 1e-10).price;
    const double next = i == 0 ? price_relative(base_market, base_schedule, rec, x, t1).price : 1.0;
    const double recovery = rec.mode == RecoveryMode::exogenous ? rec.rate * disc
                                                                : disc * std::min(1.0, rec.rate * x / rec.bonds);
    const double terminal = x > K ? next : recovery;
    worst = std::max(worst, std::abs(before - terminal));
    ++done;
  }
  o.require(worst <= 1e-6, "gluing");
  o.detail << "max gap over 100 spots " << worst;
}

} // namespace

int main()
{
  const std::pair<const char*, std::function<void(Outcome&)>> criteria[] = {
      {"three-way agreement, exogenous", criterion_1},
      {"three-way agreement, endogenous cases i and ii", criterion_2},
      {"binary identities", criterion_3},
      {"MVN engine", criterion_4},
      {"integral of binary", criterion_5},
      {"limit checks", criterion_6},
      {"figure trends", criterion_7},
      {"gluing at announcing dates", criterion_8},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, run] : criteria)
  {
    ++index;
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try
    {
      run(o);
    }
    catch (const std::exception& e)
    {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s  %d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.str().c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
