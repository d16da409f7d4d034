#include "dbond/intbin.hpp"

#include <algorithm>
#include <cmath>

#include "dbond/error.hpp"

namespace dbond
{

IntegralResult integrate_exponential_weight(double lambda, double anchor, double lower,
                                            double upper,
                                            const std::function<double(double)>& integrand,
                                            const QuadratureOptions& options)
{
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw DomainError("weight rate must be nonnegative");
  if (!(lower <= upper))
    throw ScheduleError("integration bounds must satisfy C <= D");
  if (lambda == 0.0 || lower == upper)
    return {};
  const auto weighted = [&](double tau) {
    return lambda * std::exp(-lambda * (tau - anchor)) * integrand(tau);
  };
  const QuadratureResult q = integrate_adaptive(weighted, lower, upper, options);
  return {q.value, q.error, q.intervals};
}

IntegralResult integral_binary(const WeightedIntegralSpec& spec, double x, double t,
                               const IntegralOptions& options)
{
  const BinarySpec& base = spec.base;
  if (base.expiries.empty())
    throw ScheduleError("integral base needs at least the placeholder expiry",
                        ErrorCode::schedule_shape);
  const std::size_t m = base.order();
  if (m >= 2 && !(spec.lower >= base.expiries[m - 2]))
    throw ScheduleError("integration range must start at or after the fixed expiries");
  if (!(spec.lower >= t))
    throw ScheduleError("integration range must start at or after the evaluation time");
  if (spec.weight_rate == 0.0 || spec.lower == spec.upper)
    return {};

  MvnOptions mvn = options.mvn;
  if (m >= 3)
  {
    mvn.initial_points = options.qmc_points;
    mvn.max_points = options.qmc_points;
  }

  BinarySpec work = base;
  double worst_cdf_error = 0.0;
  const auto price = [&](double tau) {
    work.expiries.back() = tau;
    const BinaryPrice p = price_binary(work, x, t, mvn);
    worst_cdf_error = std::max(worst_cdf_error, p.error);
    return p.value;
  };
  IntegralResult r = integrate_exponential_weight(spec.weight_rate, spec.weight_anchor,
                                                  spec.lower, spec.upper, price,
                                                  options.quadrature);
  const double mass = std::exp(-spec.weight_rate * (spec.lower - spec.weight_anchor)) -
                      std::exp(-spec.weight_rate * (spec.upper - spec.weight_anchor));
  r.error += mass * worst_cdf_error;
  return r;
}

} // namespace dbond
