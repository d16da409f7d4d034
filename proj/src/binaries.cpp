#include "dbond/binaries.hpp"

#include <cmath>
#include <string>

#include "dbond/error.hpp"

namespace dbond
{

void validate(const BinarySpec& spec)
{
  const std::size_t m = spec.strikes.size();
  if (m == 0 || m > max_binary_order)
    throw DomainError("binary order must lie in 1.." + std::to_string(max_binary_order));
  if (spec.expiries.size() != m || spec.signs.size() != m)
    throw ScheduleError("binary signs, strikes and expiries must have equal length",
                        ErrorCode::schedule_shape);
  for (double k : spec.strikes)
    if (!(k > 0.0) || !std::isfinite(k))
      throw DomainError("binary strikes must be positive and finite");
  for (std::size_t i = 1; i < m; ++i)
    if (!(spec.expiries[i - 1] < spec.expiries[i]))
      throw ScheduleError("binary expiries must be strictly increasing");
  if (!(spec.coeffs.sigma > 0.0) || !std::isfinite(spec.coeffs.sigma))
    throw DomainError("volatility must be positive");
  if (!std::isfinite(spec.coeffs.r) || !std::isfinite(spec.coeffs.q))
    throw DomainError("rates must be finite");
}

BinaryPrice price_binary(const BinarySpec& spec, double x, double t, const MvnOptions& options)
{
  validate(spec);
  if (!(x > 0.0) || !std::isfinite(x))
    throw DomainError("spot must be positive");
  if (!(t < spec.expiries.front()))
    throw ScheduleError("evaluation time must precede the first expiry");

  const std::size_t m = spec.order();
  const auto& c = spec.coeffs;
  const bool asset = spec.kind == BinaryKind::asset;
  const double drift = c.r - c.q + (asset ? 0.5 : -0.5) * c.sigma * c.sigma;

  std::vector<double> limits(m);
  for (std::size_t i = 0; i < m; ++i)
  {
    const double tau = spec.expiries[i] - t;
    const double d = (std::log(x / spec.strikes[i]) + drift * tau) / (c.sigma * std::sqrt(tau));
    limits[i] = spec.signs[i] * d;
  }

  const CorrelationStructure corr = build_correlation(t, spec.expiries);
  const MvnResult n = mvn_cdf(limits, corr, spec.signs, options);

  const double horizon = spec.last_expiry() - t;
  const double prefactor = asset ? x * std::exp(-c.q * horizon) : std::exp(-c.r * horizon);
  return {prefactor * n.value, prefactor * n.error};
}

ShiftedBinary shift_coefficients(const BinarySpec& spec, double new_r, double t)
{
  validate(spec);
  ShiftedBinary out{std::exp(-(spec.coeffs.r - new_r) * (spec.last_expiry() - t)), spec};
  out.spec.coeffs.r = new_r;
  out.spec.coeffs.q = new_r + (spec.coeffs.q - spec.coeffs.r);
  return out;
}

} // namespace dbond
