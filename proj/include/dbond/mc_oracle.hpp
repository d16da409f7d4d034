#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dbond/model.hpp"

namespace dbond
{

struct SimConfig
{
  std::size_t n_paths = 1'000'000;
  std::uint64_t seed = 20130101;
  /// Bins per interval of the default-time histogram. Sampling itself is exact.
  std::size_t steps_per_interval = 16;
  bool antithetic = true;
  bool parallel = true;
};

struct SimResult
{
  double price = 0.0;
  double std_error = 0.0;
  double survival_freq = 0.0;
  double survival_std_error = 0.0;
  std::size_t paths = 0;
  /// Defaults per histogram bin, intervals laid end to end. Barrier defaults
  /// land in the last bin of the interval they close.
  std::vector<std::size_t> default_histogram;
};

/// Discounted payoff mean for a bond seen at time t with firm value V0. With
/// antithetic pairing the standard error is taken over pair means.
SimResult simulate_price(const MarketParams& params, const DefaultSchedule& schedule,
                         const RecoveryModel& recovery, double V0, double t,
                         const SimConfig& config);

/// Same, starting from the relative firm value x0 = V0 exp(r (T - t)).
SimResult simulate_relative(const MarketParams& params, const DefaultSchedule& schedule,
                            const RecoveryModel& recovery, double x0, double t,
                            const SimConfig& config);

} // namespace dbond
