#include "dbond/pde_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dbond/error.hpp"

namespace dbond
{

namespace
{

// u_tau = a u_yy + mu u_y - kappa u + source on a uniform y grid.
struct Operator
{
  double a;
  double mu;
  double kappa;
  double dy;

  double lower() const { return a / (dy * dy) - mu / (2.0 * dy); }
  double diag() const { return -2.0 * a / (dy * dy) - kappa; }
  double upper() const { return a / (dy * dy) + mu / (2.0 * dy); }
};

// One theta-scheme step of size dt (theta = 1 implicit Euler, 0.5 CN). The
// source is taken constant over the step; boundary nodes are Dirichlet.
void theta_step(std::vector<double>& u, const Operator& op, const std::vector<double>* source,
                double dt, double theta, BoundaryValues next_bc, std::vector<double>& rhs,
                std::vector<double>& cprime)
{
  const std::size_t n = u.size();
  const double l = op.lower(), d = op.diag(), c = op.upper();
  const double ex = (1.0 - theta) * dt;
  const double im = theta * dt;

  for (std::size_t j = 1; j + 1 < n; ++j)
  {
    rhs[j] = u[j] + ex * (l * u[j - 1] + d * u[j] + c * u[j + 1]);
    if (source)
      rhs[j] += dt * (*source)[j];
  }
  // Thomas sweep for (I - im L) v = rhs on the interior, boundaries known.
  const double al = -im * l, ad = 1.0 - im * d, au = -im * c;
  rhs[1] -= al * next_bc.low;
  rhs[n - 2] -= au * next_bc.high;
  cprime[1] = au / ad;
  rhs[1] /= ad;
  for (std::size_t j = 2; j + 1 < n; ++j)
  {
    const double m = ad - al * cprime[j - 1];
    cprime[j] = au / m;
    rhs[j] = (rhs[j] - al * rhs[j - 1]) / m;
  }
  u[n - 2] = rhs[n - 2];
  for (std::size_t j = n - 2; j-- > 1;)
    u[j] = rhs[j] - cprime[j] * u[j + 1];
  u[0] = next_bc.low;
  u[n - 1] = next_bc.high;
}

// Marches `steps` steps of size horizon/steps from tau = 0. The first step is
// replaced by two implicit-Euler half steps. `row(k, u)` sees tau = k dt.
template <class Boundary, class Row>
void march(std::vector<double>& u, const Operator& op, const std::vector<double>* source,
           double horizon, std::size_t steps, Boundary&& boundary, Row&& row)
{
  const double dt = horizon / static_cast<double>(steps);
  std::vector<double> rhs(u.size()), cprime(u.size());
  row(std::size_t{0}, u);
  for (std::size_t k = 1; k <= steps; ++k)
  {
    const double tau = static_cast<double>(k) * dt;
    if (k == 1)
    {
      theta_step(u, op, source, 0.5 * dt, 1.0, boundary(0.5 * dt), rhs, cprime);
      theta_step(u, op, source, 0.5 * dt, 1.0, boundary(dt), rhs, cprime);
    }
    else
      theta_step(u, op, source, dt, 0.5, boundary(tau), rhs, cprime);
    row(k, u);
  }
}

enum class Source
{
  endogenous, // min(1, R x / n)
  exogenous,  // R
  none
};

struct CascadeProblem
{
  Source source;
  double rate = 0.0;  // R
  double bonds = 1.0; // n

  double f(double x) const
  {
    switch (source)
    {
    case Source::endogenous: return rate > 0.0 ? std::min(1.0, rate * x / bonds) : 0.0;
    case Source::exogenous: return rate;
    case Source::none: return 0.0;
    }
    return 0.0;
  }
  // f ~ f0 + f1 x as x -> 0 and f -> fh as x -> infinity
  double f0() const { return source == Source::exogenous ? rate : 0.0; }
  double f1() const { return source == Source::endogenous ? rate / bonds : 0.0; }
  double fh() const
  {
    if (source == Source::exogenous)
      return rate;
    if (source == Source::endogenous)
      return rate > 0.0 ? 1.0 : 0.0;
    return 0.0;
  }
};

double relax(double start, double target, double rate, double tau)
{
  return target + (start - target) * std::exp(-rate * tau);
}

CascadeSolution solve_cascade(const MarketParams& params, const DefaultSchedule& s,
                              const CascadeProblem& prob, const GridSpec& grid)
{
  if (grid.n_space < 64)
    throw DomainError("n_space must be at least 64");
  if (grid.n_time_per_interval < 16)
    throw DomainError("n_time_per_interval must be at least 16");
  if (!(grid.x_min > 0.0 && grid.x_min < grid.x_max))
    throw DomainError("grid needs 0 < x_min < x_max");

  CascadeSolution sol;
  sol.dates = s.dates;
  sol.n_space = grid.n_space;
  sol.y_min = std::log(grid.x_min);
  sol.dy = (std::log(grid.x_max) - sol.y_min) / static_cast<double>(grid.n_space - 1);
  const std::size_t nx = grid.n_space, nt = grid.n_time_per_interval, N = s.intervals();
  sol.slabs.resize(N);

  std::vector<double> x(nx), fx(nx);
  for (std::size_t j = 0; j < nx; ++j)
  {
    x[j] = std::exp(sol.y_min + sol.dy * static_cast<double>(j));
    fx[j] = prob.f(x[j]);
  }

  std::vector<double> u(nx, 1.0); // u_N = 1
  double low_a = 1.0, low_b = 0.0, high_a = 1.0;
  const double half = 0.5 * sol.dy;

  for (std::size_t i = N; i-- > 0;)
  {
    // Glue at t_{i+1}: default by the barrier pays f(x) below K_{i+1}.
    const double k = s.barriers[i];
    if (k > 0.0)
    {
      const double yk = std::log(k);
      for (std::size_t j = 0; j < nx; ++j)
      {
        const double yj = sol.y_min + sol.dy * static_cast<double>(j);
        const double above = std::clamp((yj + half - yk) / sol.dy, 0.0, 1.0);
        u[j] = above * u[j] + (1.0 - above) * fx[j];
      }
      if (k > x.front())
      {
        low_a = prob.f0();
        low_b = prob.f1();
      }
    }

    const double lambda = s.intensities[i];
    const double horizon = s.dates[i + 1] - s.dates[i];
    std::vector<double> source(nx);
    for (std::size_t j = 0; j < nx; ++j)
      source[j] = lambda * fx[j];

    const Operator op{0.5 * params.s_v * params.s_v, -params.b - 0.5 * params.s_v * params.s_v,
                      lambda, sol.dy};
    const double a0 = low_a, b0 = low_b, h0 = high_a;
    const double f0 = prob.f0(), f1 = prob.f1(), fh = prob.fh();
    const double decay = params.b + lambda;
    const auto low_slope = [&](double tau) {
      const double e = std::exp(-decay * tau);
      const double gain = decay != 0.0 ? (1.0 - e) / decay : tau;
      return b0 * e + lambda * f1 * gain;
    };
    const auto boundary = [&](double tau) {
      return BoundaryValues{relax(a0, f0, lambda, tau) + low_slope(tau) * x.front(),
                            relax(h0, fh, lambda, tau)};
    };

    CascadeSolution::Slab& slab = sol.slabs[i];
    slab.times.resize(nt + 1);
    slab.values.resize((nt + 1) * nx);
    march(u, op, &source, horizon, nt, boundary, [&](std::size_t step, const std::vector<double>& v) {
      const std::size_t row = nt - step;
      slab.times[row] = s.dates[i + 1] - horizon * static_cast<double>(step) / static_cast<double>(nt);
      std::copy(v.begin(), v.end(), slab.values.begin() + static_cast<std::ptrdiff_t>(row * nx));
    });
    slab.times.front() = s.dates[i];
    slab.times.back() = s.dates[i + 1];

    low_a = relax(a0, f0, lambda, horizon);
    low_b = low_slope(horizon);
    high_a = relax(h0, fh, lambda, horizon);
  }
  return sol;
}

void check_accuracy(CascadeSolution& fine, const GridSpec& grid,
                    const std::function<CascadeSolution(const GridSpec&)>& solve)
{
  if (!(grid.richardson_tolerance > 0.0) || grid.probes.empty())
    return;
  GridSpec coarse = grid;
  coarse.n_space = std::max<std::size_t>(64, grid.n_space / 2);
  coarse.n_time_per_interval = std::max<std::size_t>(16, grid.n_time_per_interval / 2);
  const CascadeSolution c = solve(coarse);
  double worst = 0.0;
  for (double x : grid.probes)
    for (std::size_t i = 0; i + 1 < fine.dates.size(); ++i)
      worst = std::max(worst, std::abs(sample(fine, x, fine.dates[i]) - sample(c, x, fine.dates[i])));
  fine.richardson_estimate = worst / 3.0; // second-order scheme
  if (fine.richardson_estimate > grid.richardson_tolerance)
  {
    fine.accuracy_warning = true;
    std::ostringstream msg;
    msg << "grid too coarse: Richardson estimate " << fine.richardson_estimate
        << " exceeds tolerance " << grid.richardson_tolerance;
    fine.warning = msg.str();
  }
}

} // namespace

double CascadeSolution::x_min() const
{
  return std::exp(y_min);
}

double CascadeSolution::x_max() const
{
  return std::exp(y_min + dy * static_cast<double>(n_space - 1));
}

GridSpec resolve_grid(const MarketParams& params, const DefaultSchedule& s,
                      const RecoveryModel& recovery, GridSpec grid)
{
  validate(params);
  validate(s);
  if (grid.x_min < 0.0 || grid.x_max < 0.0 ||
      (grid.x_min > 0.0 && grid.x_max > 0.0 && grid.x_max <= grid.x_min))
    throw DomainError("grid needs 0 < x_min < x_max");
  if (grid.x_min > 0.0 && grid.x_max > 0.0)
    return grid;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  const auto cover = [&](double v) {
    if (v > 0.0 && std::isfinite(v))
    {
      lo = std::min(lo, std::log(v));
      hi = std::max(hi, std::log(v));
    }
  };
  for (double k : s.barriers)
    cover(k);
  if (recovery.mode == RecoveryMode::endogenous)
    cover(recovery.threshold());
  for (double p : grid.probes)
    cover(p);
  if (!std::isfinite(lo))
    lo = hi = 0.0;
  const double horizon = s.maturity();
  const double spread = params.s_v * std::sqrt(horizon);
  const double drift = std::abs(params.b + 0.5 * params.s_v * params.s_v) * horizon;
  const double margin = std::max(std::log(20.0), 5.0 * spread + 0.5 * drift);
  if (!(grid.x_min > 0.0))
    grid.x_min = std::exp(lo - margin);
  if (grid.x_max == 0.0)
    grid.x_max = std::exp(hi + margin);
  return grid;
}

CascadeSolution solve_endogenous_cascade(const MarketParams& params, const DefaultSchedule& s,
                                         const RecoveryModel& recovery, const GridSpec& grid)
{
  validate(recovery);
  if (recovery.mode != RecoveryMode::endogenous)
    throw DomainError("endogenous cascade needs endogenous recovery");
  const GridSpec g = resolve_grid(params, s, recovery, grid);
  const CascadeProblem prob{Source::endogenous, recovery.rate, recovery.bonds};
  CascadeSolution sol = solve_cascade(params, s, prob, g);
  check_accuracy(sol, g, [&](const GridSpec& c) { return solve_cascade(params, s, prob, c); });
  return sol;
}

CascadeSolution solve_survival_cascade(const MarketParams& params, const DefaultSchedule& s,
                                       const GridSpec& grid)
{
  const RecoveryModel none{RecoveryMode::exogenous, 0.0, 1.0};
  const GridSpec g = resolve_grid(params, s, none, grid);
  const CascadeProblem prob{Source::none, 0.0, 1.0};
  CascadeSolution sol = solve_cascade(params, s, prob, g);
  check_accuracy(sol, g, [&](const GridSpec& c) { return solve_cascade(params, s, prob, c); });
  return sol;
}

CascadeSolution solve_exogenous_cascade(const MarketParams& params, const DefaultSchedule& s,
                                        const RecoveryModel& recovery, const GridSpec& grid,
                                        ExogenousForm form)
{
  validate(recovery);
  if (recovery.mode != RecoveryMode::exogenous)
    throw DomainError("exogenous cascade needs exogenous recovery");
  if (form == ExogenousForm::survival)
  {
    CascadeSolution sol = solve_survival_cascade(params, s, grid);
    const double R = recovery.rate;
    for (auto& slab : sol.slabs)
      for (double& v : slab.values)
        v = (1.0 - R) * v + R;
    sol.richardson_estimate *= (1.0 - R);
    return sol;
  }
  const GridSpec g = resolve_grid(params, s, recovery, grid);
  const CascadeProblem prob{Source::exogenous, recovery.rate, 1.0};
  CascadeSolution sol = solve_cascade(params, s, prob, g);
  check_accuracy(sol, g, [&](const GridSpec& c) { return solve_cascade(params, s, prob, c); });
  return sol;
}

double sample(const CascadeSolution& sol, double x, double t)
{
  if (sol.slabs.empty())
    throw DomainError("empty cascade solution");
  if (!(x > 0.0))
    throw DomainError("sample point must have x > 0");
  const double y = std::log(x);
  const double fy = (y - sol.y_min) / sol.dy;
  const double last = static_cast<double>(sol.n_space - 1);
  if (!(fy >= 0.0 && fy <= last) || !(t >= sol.dates.front() && t <= sol.dates.back()))
    throw DomainError("sample point outside the grid hull");

  std::size_t i = static_cast<std::size_t>(
      std::upper_bound(sol.dates.begin(), sol.dates.end(), t) - sol.dates.begin());
  i = std::min(i, sol.slabs.size()) - 1;
  const CascadeSolution::Slab& slab = sol.slabs[i];

  std::size_t k = static_cast<std::size_t>(
      std::upper_bound(slab.times.begin(), slab.times.end(), t) - slab.times.begin());
  k = std::clamp<std::size_t>(k, 1, slab.times.size() - 1) - 1;
  const double wt = std::clamp((t - slab.times[k]) / (slab.times[k + 1] - slab.times[k]), 0.0, 1.0);

  const std::size_t j = std::min(static_cast<std::size_t>(fy), sol.n_space - 2);
  const double wy = fy - static_cast<double>(j);
  const auto at = [&](std::size_t row, std::size_t col) { return slab.values[row * sol.n_space + col]; };
  const double lo = (1.0 - wy) * at(k, j) + wy * at(k, j + 1);
  const double hi = (1.0 - wy) * at(k + 1, j) + wy * at(k + 1, j + 1);
  return (1.0 - wt) * lo + wt * hi;
}

std::vector<double> propagate_black_scholes(
    std::vector<double> terminal, double dy, double r, double q, double sigma,
    double horizon, std::size_t steps,
    const std::function<BoundaryValues(double tau)>& boundary)
{
  if (terminal.size() < 3 || !(dy > 0.0) || !(sigma > 0.0) || steps == 0 || !(horizon > 0.0))
    throw DomainError("invalid propagation setup");
  const Operator op{0.5 * sigma * sigma, r - q - 0.5 * sigma * sigma, r, dy};
  march(terminal, op, nullptr, horizon, steps, boundary, [](std::size_t, const std::vector<double>&) {});
  return terminal;
}

} // namespace dbond
