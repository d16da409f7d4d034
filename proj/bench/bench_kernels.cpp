// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "dbond/mc_oracle.hpp"
#include "dbond/mvn.hpp"
#include "dbond/pricer.hpp"

namespace
{

const dbond::MarketParams market{0.1, 0.05, 1.0};
const dbond::DefaultSchedule schedule{{0, 3, 6}, {0.002, 0.005}, {100, 100}};

void mvn_order4(benchmark::State& state)
{
  const std::vector<double> a{0.1, -0.4, 0.9, 0.3};
  const std::vector<double> ex{0.5, 1.0, 2.5, 4.0};
  const auto corr = dbond::build_correlation(0.0, ex);
  const dbond::SignVector s(std::vector<int>{1, -1, 1, -1});
  dbond::MvnOptions o;
  o.parallel = state.range(0) != 0;
  o.abs_tolerance = 1e-9; // forces the lattice to grow
  for (auto _ : state)
    benchmark::DoNotOptimize(dbond::mvn_cdf(a, corr, s, o).value);
}
BENCHMARK(mvn_order4)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void monte_carlo(benchmark::State& state)
{
  dbond::SimConfig c;
  c.n_paths = 200'000;
  c.parallel = state.range(0) != 0;
  const dbond::RecoveryModel rec{dbond::RecoveryMode::endogenous, 0.5, 100};
  for (auto _ : state)
    benchmark::DoNotOptimize(dbond::simulate_relative(market, schedule, rec, 200, 0, c).price);
  state.SetItemsProcessed(state.iterations() * static_cast<long>(c.n_paths));
}
BENCHMARK(monte_carlo)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void closed_form_endogenous(benchmark::State& state)
{
  const dbond::RecoveryModel rec{dbond::RecoveryMode::endogenous, 0.5, 100};
  for (auto _ : state)
    benchmark::DoNotOptimize(dbond::price_relative(market, schedule, rec, 200, 0).price);
}
BENCHMARK(closed_form_endogenous)->Unit(benchmark::kMicrosecond);

} // namespace

BENCHMARK_MAIN();
