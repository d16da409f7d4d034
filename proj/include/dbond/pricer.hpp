#pragma once

#include <cstddef>

#include "dbond/intbin.hpp"
#include "dbond/model.hpp"

namespace dbond
{

struct PricerOptions
{
  IntegralOptions integral{};
  /// Evaluate every binary under intensity-shifted coefficients (rate lambda_i,
  /// dividend b + lambda_i) and rescale back. Only useful for cross-checking.
  bool shifted_assembly = false;
};

struct Diagnostics
{
  double cdf_error = 0.0;        // propagated CDF error bound, relative units
  double quadrature_error = 0.0; // summed quadrature error estimates
  std::size_t binaries = 0;      // closed-form binaries evaluated
  std::size_t integrals = 0;     // weighted integral terms evaluated
};

enum class Regime
{
  barriers_below_threshold, // every relevant K <= n/R
  barriers_above_threshold, // every relevant K > n/R
  mixed
};

struct RelativePrice
{
  double value = 0.0;
  Diagnostics diagnostics{};
};

struct PriceReport
{
  double price = 0.0;          // C
  double relative_price = 0.0; // u = C / exp(-r (T - t))
  double survival_prob = -1.0; // W, exogenous mode only (negative otherwise)
  double credit_spread = 0.0;
  std::size_t interval_index = 0;
  double x = 0.0; // relative firm value V exp(r (T - t))
  Diagnostics diagnostics{};
};

/// Regime of the barriers still ahead of interval i (K_{i+1}..K_N). Ties count
/// as below the threshold.
Regime classify_regime(const DefaultSchedule& schedule, const RecoveryModel& recovery,
                       std::size_t interval);

/// u_i(x, t) under endogenous recovery. Throws UnsupportedRegimeError for a
/// mixed regime.
RelativePrice relative_price_endogenous(const MarketParams& params, const DefaultSchedule& schedule,
                                        const RecoveryModel& recovery, double x, double t,
                                        const PricerOptions& options = {});

/// W_i(x, t): probability of reaching T without default.
RelativePrice survival_probability(const MarketParams& params, const DefaultSchedule& schedule,
                                   double x, double t, const PricerOptions& options = {});

/// Full report from the relative firm value x; dispatches on the recovery mode.
PriceReport price_relative(const MarketParams& params, const DefaultSchedule& schedule,
                           const RecoveryModel& recovery, double x, double t,
                           const PricerOptions& options = {});

PriceReport price_endogenous(const MarketParams& params, const DefaultSchedule& schedule,
                             const RecoveryModel& recovery, double V, double t,
                             const PricerOptions& options = {});

PriceReport price_exogenous(const MarketParams& params, const DefaultSchedule& schedule,
                            const RecoveryModel& recovery, double V, double t,
                            const PricerOptions& options = {});

/// -ln(C / exp(-r (T - t))) / (T - t), clamped at zero.
double credit_spread(const MarketParams& params, const DefaultSchedule& schedule,
                     const RecoveryModel& recovery, double V, double t,
                     const PricerOptions& options = {});

/// Relative firm value for a firm value V at time t.
double relative_spot(const MarketParams& params, const DefaultSchedule& schedule, double V,
                     double t);

} // namespace dbond
