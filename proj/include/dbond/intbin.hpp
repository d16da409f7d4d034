#pragma once

#include <functional>

#include "dbond/binaries.hpp"
#include "dbond/quadrature.hpp"

namespace dbond
{

/// Weighted time integral of a binary over its last expiry:
///   int_C^D g(tau) price(base with last expiry tau) dtau,
///   g(tau) = lambda exp(-lambda (tau - anchor)).
/// The last entry of base.expiries is a placeholder and is overwritten.
struct WeightedIntegralSpec
{
  BinarySpec base;
  double weight_rate = 0.0;
  double weight_anchor = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct IntegralOptions
{
  QuadratureOptions quadrature{};
  MvnOptions mvn{};
  /// Lattice size used for integrands of order >= 3. It is held fixed across
  /// tau so the integrand stays smooth for the adaptive rule.
  std::size_t qmc_points = std::size_t{1} << 14;
};

struct IntegralResult
{
  double value = 0.0;
  double error = 0.0; // quadrature estimate plus propagated CDF error
  std::size_t intervals = 0;
};

IntegralResult integral_binary(const WeightedIntegralSpec& spec, double x, double t,
                               const IntegralOptions& options = {});

/// Same quadrature with the binary replaced by an arbitrary integrand. Returns
/// exactly zero when lambda == 0 or C == D.
IntegralResult integrate_exponential_weight(double lambda, double anchor, double lower,
                                            double upper,
                                            const std::function<double(double)>& integrand,
                                            const QuadratureOptions& options = {});

} // namespace dbond
