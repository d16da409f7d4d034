#pragma once

#include <cstddef>
#include <functional>

namespace dbond
{

struct QuadratureOptions
{
  double abs_tolerance = 1e-8;
  std::size_t max_intervals = std::size_t{1} << 12;
};

struct QuadratureResult
{
  double value = 0.0;
  double error = 0.0;
  std::size_t intervals = 0;
  bool converged = true;
};

/// Globally adaptive 15-point Gauss-Kronrod on [lo, hi]. Only interior nodes
/// are evaluated, so integrable endpoint singularities are harmless. The final
/// sum runs over panels in left-to-right order with pairwise reduction.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                                    const QuadratureOptions& options = {});

/// Pairwise (cascade) summation.
double pairwise_sum(const double* values, std::size_t n);

} // namespace dbond
