#pragma once

#include <cstddef>
#include <vector>

namespace dbond
{

struct MarketParams
{
  double r = 0.0;   // short rate
  double b = 0.0;   // firm dividend rate
  double s_v = 0.0; // firm volatility
};

/// Announcing dates t_0 = 0 < t_1 < ... < t_N = T, intensity lambda_i on
/// [t_i, t_{i+1}) and barrier K_{i+1} observed at t_{i+1}. A barrier of zero
/// disables the check at that date. Face value is 1.
struct DefaultSchedule
{
  std::vector<double> dates;       // t_0..t_N
  std::vector<double> intensities; // lambda_0..lambda_{N-1}
  std::vector<double> barriers;    // K_1..K_N

  std::size_t intervals() const noexcept { return intensities.size(); }
  double maturity() const { return dates.back(); }
};

enum class RecoveryMode
{
  endogenous,
  exogenous
};

struct RecoveryModel
{
  RecoveryMode mode = RecoveryMode::exogenous;
  double rate = 0.0;  // R
  double bonds = 1.0; // n, endogenous only

  /// n / R, +infinity when R = 0.
  double threshold() const;
};

void validate(const MarketParams& params);
void validate(const DefaultSchedule& schedule);
void validate(const RecoveryModel& recovery);

/// Index i with t_i <= t < t_{i+1}.
std::size_t locate_interval(const DefaultSchedule& schedule, double t);

} // namespace dbond
