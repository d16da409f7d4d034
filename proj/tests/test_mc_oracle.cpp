#include <doctest.h>

#include <cmath>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dbond/error.hpp"
#include "dbond/mc_oracle.hpp"
#include "dbond/pricer.hpp"

using namespace dbond;

namespace
{

const MarketParams base_market{0.1, 0.05, 1.0};
const DefaultSchedule base_schedule{{0, 3, 6}, {0.002, 0.005}, {100, 100}};

SimConfig config(std::size_t paths, bool parallel = true, bool antithetic = true)
{
  SimConfig c;
  c.n_paths = paths;
  c.parallel = parallel;
  c.antithetic = antithetic;
  return c;
}

} // namespace

TEST_CASE("zero variance limits are exact")
{
  const DefaultSchedule free{{0, 3, 6}, {0, 0}, {0, 0}};
  for (const RecoveryModel& rec :
       {RecoveryModel{RecoveryMode::exogenous, 0.3, 1}, RecoveryModel{RecoveryMode::endogenous, 0.3, 2}})
    for (double t : {0.0, 2.5, 4.0})
    {
      const SimResult r = simulate_relative(base_market, free, rec, 150, t, config(10'001));
      CHECK(r.price == std::exp(-0.1 * (6 - t)));
      CHECK(r.std_error == 0.0);
      CHECK(r.survival_freq == 1.0);
      CHECK(std::accumulate(r.default_histogram.begin(), r.default_histogram.end(), std::size_t{0}) == 0);
    }

  // Full recovery pays the face value whatever happens.
  const DefaultSchedule harsh{{0, 3, 6}, {0.5, 0.5}, {150, 150}};
  const SimResult r =
      simulate_price(base_market, harsh, {RecoveryMode::exogenous, 1.0, 1}, 100, 1.0, config(4096));
  CHECK(r.price == std::exp(-0.5));
  CHECK(r.std_error == 0.0);
  CHECK(r.survival_freq < 0.5);
}

TEST_CASE("deterministic across parallel chunking")
{
  const RecoveryModel rec{RecoveryMode::endogenous, 0.5, 100};
  const SimResult serial = simulate_relative(base_market, base_schedule, rec, 200, 0, config(50'001, false));
  for (int threads : {1, 2, 3, 7})
  {
#ifdef _OPENMP
    omp_set_num_threads(threads);
#endif
    const SimResult par = simulate_relative(base_market, base_schedule, rec, 200, 0, config(50'001, true));
    CHECK(par.price == serial.price);
    CHECK(par.std_error == serial.std_error);
    CHECK(par.survival_freq == serial.survival_freq);
    CHECK(par.default_histogram == serial.default_histogram);
  }
  CHECK(serial.paths == 50'002);

  SimConfig other = config(50'001, false);
  other.seed = 7;
  CHECK(simulate_relative(base_market, base_schedule, rec, 200, 0, other).price != serial.price);
}

TEST_CASE("base scenario against the closed form")
{
  const RecoveryModel rec{RecoveryMode::exogenous, 0.5, 1};
  const SimResult r = simulate_relative(base_market, base_schedule, rec, 200, 0, config(400'000));
  const PriceReport closed = price_relative(base_market, base_schedule, rec, 200, 0);
  CHECK(std::abs(r.price - closed.price) <= 3 * r.std_error);
  CHECK(std::abs(r.survival_freq - closed.survival_prob) <= 3 * r.survival_std_error);

  const SimResult viaV =
      simulate_price(base_market, base_schedule, rec, 200 * std::exp(-0.6), 0, config(1000));
  CHECK(viaV.price == doctest::Approx(simulate_relative(base_market, base_schedule, rec, 200, 0, config(1000)).price)
                          .epsilon(1e-12));
}

TEST_CASE("antithetic pairing does not inflate the variance")
{
  const RecoveryModel rec{RecoveryMode::exogenous, 0.5, 1};
  const SimResult plain = simulate_relative(base_market, base_schedule, rec, 200, 0, config(400'000, true, false));
  const SimResult anti = simulate_relative(base_market, base_schedule, rec, 200, 0, config(400'000, true, true));
  CHECK(anti.std_error <= plain.std_error * 1.01);
  const double joint = std::hypot(anti.std_error, plain.std_error);
  CHECK(std::abs(anti.price - plain.price) <= 3 * joint);
}

TEST_CASE("default time histogram")
{
  // Barrier defaults only: they sit in the last bin of each interval.
  const DefaultSchedule barrier_only{{0, 3, 6}, {0, 0}, {100, 100}};
  const RecoveryModel rec{RecoveryMode::exogenous, 0.5, 1};
  SimConfig c = config(20'000);
  c.steps_per_interval = 8;
  const SimResult b = simulate_relative(base_market, barrier_only, rec, 200, 0, c);
  REQUIRE(b.default_histogram.size() == 16);
  for (std::size_t k = 0; k < 16; ++k)
    if (k != 7 && k != 15)
      CHECK(b.default_histogram[k] == 0);
  const std::size_t defaults = b.default_histogram[7] + b.default_histogram[15];
  CHECK(static_cast<double>(defaults) == doctest::Approx((1.0 - b.survival_freq) * b.paths).epsilon(1e-12));

  // Jump defaults only: survival follows the cumulative hazard.
  const DefaultSchedule jumps{{0, 3, 6}, {0.1, 0.3}, {0, 0}};
  const SimResult j = simulate_relative(base_market, jumps, rec, 200, 0, config(200'000));
  CHECK(std::abs(j.survival_freq - std::exp(-0.1 * 3 - 0.3 * 3)) <= 3 * j.survival_std_error);
  // The second interval's bins carry more mass per bin than the first.
  const auto& h = j.default_histogram;
  const double first = std::accumulate(h.begin(), h.begin() + 16, 0.0);
  const double second = std::accumulate(h.begin() + 16, h.end(), 0.0);
  CHECK(second > first);
}

TEST_CASE("input checks")
{
  const RecoveryModel rec{RecoveryMode::exogenous, 0.5, 1};
  CHECK_THROWS_AS(simulate_relative(base_market, base_schedule, rec, 200, 0, config(0)), DomainError);
  CHECK_THROWS_AS(simulate_relative(base_market, base_schedule, rec, -1, 0, config(10)), DomainError);
  CHECK_THROWS_AS(simulate_price(base_market, base_schedule, rec, 0, 0, config(10)), DomainError);
  CHECK_THROWS_AS(simulate_relative(base_market, base_schedule, rec, 200, 6, config(10)), DomainError);
}
