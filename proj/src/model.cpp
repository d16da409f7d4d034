#include "dbond/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dbond/error.hpp"

namespace dbond
{

double RecoveryModel::threshold() const
{
  return rate > 0.0 ? bonds / rate : std::numeric_limits<double>::infinity();
}

void validate(const MarketParams& p)
{
  if (!std::isfinite(p.r) || !std::isfinite(p.b))
    throw DomainError("short rate and dividend rate must be finite");
  if (!(p.s_v > 0.0) || !std::isfinite(p.s_v))
    throw DomainError("firm volatility must be positive");
}

void validate(const DefaultSchedule& s)
{
  const std::size_t n = s.intensities.size();
  if (n == 0)
    throw ScheduleError("schedule needs at least one interval", ErrorCode::schedule_shape);
  if (s.dates.size() != n + 1 || s.barriers.size() != n)
    throw ScheduleError("schedule needs N+1 dates, N intensities and N barriers",
                        ErrorCode::schedule_shape);
  if (s.dates.front() != 0.0)
    throw ScheduleError("the first announcing date must be 0");
  for (std::size_t i = 1; i <= n; ++i)
    if (!(s.dates[i - 1] < s.dates[i]) || !std::isfinite(s.dates[i]))
      throw ScheduleError("announcing dates must be strictly increasing");
  for (double l : s.intensities)
    if (!(l >= 0.0) || !std::isfinite(l))
      throw DomainError("intensities must be nonnegative and finite");
  for (double k : s.barriers)
    if (!(k >= 0.0) || !std::isfinite(k))
      throw DomainError("barriers must be nonnegative and finite");
}

void validate(const RecoveryModel& r)
{
  if (!(r.rate >= 0.0 && r.rate <= 1.0))
    throw DomainError("recovery rate must lie in [0, 1]");
  if (r.mode == RecoveryMode::endogenous && !(r.bonds > 0.0 && std::isfinite(r.bonds)))
    throw DomainError("endogenous recovery needs a positive bond count");
}

std::size_t locate_interval(const DefaultSchedule& s, double t)
{
  if (!(t >= 0.0) || !(t < s.maturity()))
    throw DomainError("evaluation time must lie in [0, T)");
  const auto it = std::upper_bound(s.dates.begin(), s.dates.end(), t);
  return static_cast<std::size_t>(it - s.dates.begin()) - 1;
}

} // namespace dbond
