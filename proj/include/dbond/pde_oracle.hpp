#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "dbond/model.hpp"

namespace dbond
{

enum class TimeScheme
{
  crank_nicolson_rannacher
};

/// Uniform grid in y = ln x. x_min / x_max of zero mean "choose from the data".
struct GridSpec
{
  double x_min = 0.0;
  double x_max = 0.0;
  std::size_t n_space = 2048;
  std::size_t n_time_per_interval = 2048;
  TimeScheme scheme = TimeScheme::crank_nicolson_rannacher;
  /// Spots the domain must cover comfortably (evaluation points).
  std::vector<double> probes;
  /// When positive, a half-resolution solve is compared at the probes and the
  /// solution is flagged if the Richardson estimate exceeds this.
  double richardson_tolerance = 0.0;
};

/// Relative price u (or survival probability W) on the (ln x, t) grid, one slab
/// per interval. Slab i holds rows for t_i = times[0] < ... < times.back() =
/// t_{i+1}; its last row is the glued terminal condition.
struct CascadeSolution
{
  std::vector<double> dates;
  double y_min = 0.0;
  double dy = 0.0;
  std::size_t n_space = 0;

  struct Slab
  {
    std::vector<double> times;
    std::vector<double> values; // row-major: times.size() x n_space
  };
  std::vector<Slab> slabs;

  double richardson_estimate = 0.0;
  bool accuracy_warning = false;
  std::string warning;

  double x_min() const;
  double x_max() const;
};

/// Picks the domain from the schedule, recovery threshold and probes.
GridSpec resolve_grid(const MarketParams& params, const DefaultSchedule& schedule,
                      const RecoveryModel& recovery, GridSpec grid);

CascadeSolution solve_endogenous_cascade(const MarketParams& params,
                                         const DefaultSchedule& schedule,
                                         const RecoveryModel& recovery, const GridSpec& grid);

enum class ExogenousForm
{
  direct,   // source lambda R
  survival  // homogeneous W equation, u = (1 - R) W + R
};

CascadeSolution solve_exogenous_cascade(const MarketParams& params,
                                        const DefaultSchedule& schedule,
                                        const RecoveryModel& recovery, const GridSpec& grid,
                                        ExogenousForm form = ExogenousForm::direct);

/// W itself (the survival form before reconstruction).
CascadeSolution solve_survival_cascade(const MarketParams& params,
                                       const DefaultSchedule& schedule, const GridSpec& grid);

/// Bilinear interpolation in (ln x, t). Throws DomainError outside the hull.
double sample(const CascadeSolution& solution, double x, double t);

/// Black-Scholes backward propagation on a log grid:
///   V_tau = 0.5 sigma^2 V_yy + (r - q - 0.5 sigma^2) V_y - r V
/// from `terminal` (values at the grid nodes) over a horizon, with Dirichlet
/// values supplied by `boundary(tau)` returning {low, high}. Returns the values
/// at tau = horizon.
struct BoundaryValues
{
  double low;
  double high;
};

std::vector<double> propagate_black_scholes(
    std::vector<double> terminal, double dy, double r, double q, double sigma,
    double horizon, std::size_t steps,
    const std::function<BoundaryValues(double tau)>& boundary);

} // namespace dbond
