#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "dbond/mvn.hpp"

namespace dbond::qmc
{

/// Sequentially conditioned form of an orthant probability: P(L z < limits)
/// for z standard normal, L lower triangular with positive diagonal.
struct GenzProblem
{
  std::vector<double> limits;
  Eigen::MatrixXd cholesky;
};

struct Estimate
{
  double value = 0.0;
  double error = 0.0;
  std::size_t points = 0; // lattice size of the final level
};

/// Reorders variables (smallest expected conditional probability first) and
/// factors the correlation. `limits` must be finite, `correlation` positive
/// definite with unit diagonal.
GenzProblem prepare(std::vector<double> limits, Eigen::MatrixXd correlation);

/// Randomly shifted Korobov lattice with tent periodization and antithetic
/// pairs. The lattice size roughly doubles until the error target or the point
/// budget is reached.
/// Both variants produce bit-identical results for the same options.
Estimate integrate_serial(const GenzProblem& problem, const MvnOptions& options);
Estimate integrate_parallel(const GenzProblem& problem, const MvnOptions& options);

inline Estimate integrate(const GenzProblem& problem, const MvnOptions& options)
{
  return options.parallel ? integrate_parallel(problem, options)
                          : integrate_serial(problem, options);
}

} // namespace dbond::qmc
