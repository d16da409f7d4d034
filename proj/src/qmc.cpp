#include "dbond/qmc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>

#include <boost/math/distributions/students_t.hpp>

#include "dbond/error.hpp"

namespace dbond::qmc
{

namespace
{

#include "lattice_table.inc"

constexpr std::size_t max_lattice_dim = 15;
constexpr int min_lattice_log = 10;
constexpr int max_lattice_log = 20;
// Below this the spread of the shift means is summation noise, not error.
constexpr double rounding_floor = 1e-15;

std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_from_bits(std::uint64_t bits)
{
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

double density(double x)
{
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double clamped_quantile(double p)
{
  if (p <= 1e-300)
    return -cdf_saturation;
  if (p >= 1.0 - 1e-16)
    return cdf_saturation;
  return std_normal_quantile(p);
}

struct Layout
{
  std::size_t dim;               // m
  std::vector<double> shifts;    // shifts x (m - 1)
  double first_probability;      // Phi(limit_0 / L_00)
};

// Korobov generating vector (1, a, a^2, ...) mod n for QMC dimension d.
std::vector<std::int64_t> generating_vector(int level, std::size_t d)
{
  const std::int64_t n = lattice_sizes[level];
  const std::int64_t a = lattice_multipliers[level][d - 1];
  std::vector<std::int64_t> z(d);
  std::int64_t g = 1;
  for (std::size_t k = 0; k < d; ++k)
  {
    z[k] = g;
    g = (g * a) % n;
  }
  return z;
}

Layout make_layout(const GenzProblem& p, const MvnOptions& options)
{
  const std::size_t m = p.limits.size();
  if (m < 2 || m - 1 > max_lattice_dim)
    throw DomainError("QMC integrator supports dimensions 2.." + std::to_string(max_lattice_dim + 1));
  if (options.shifts < 2)
    throw DomainError("QMC needs at least two random shifts for an error estimate");
  Layout l;
  l.dim = m;
  l.shifts.resize(options.shifts * (m - 1));
  for (std::size_t s = 0; s < options.shifts; ++s)
    for (std::size_t k = 0; k + 1 < m; ++k)
      l.shifts[s * (m - 1) + k] =
          unit_from_bits(splitmix64(options.seed ^ splitmix64(s * 131 + k + 1)));
  l.first_probability = std_normal_cdf(p.limits[0] / p.cholesky(0, 0));
  return l;
}

// Product of conditional probabilities for one point w in [0,1]^{m-1}.
double genz_integrand(const GenzProblem& p, const Layout& l, const double* w, double* y)
{
  const std::size_t m = l.dim;
  double e = l.first_probability;
  double prod = e;
  for (std::size_t i = 1; i < m && prod > 0.0; ++i)
  {
    y[i - 1] = clamped_quantile(w[i - 1] * e);
    double s = 0.0;
    for (std::size_t k = 0; k < i; ++k)
      s += p.cholesky(i, k) * y[k];
    e = std_normal_cdf((p.limits[i] - s) / p.cholesky(i, i));
    prod *= e;
  }
  return prod;
}

// Mean of antithetic-averaged integrand values over one shifted lattice.
double shifted_lattice_mean(const GenzProblem& p, const Layout& l, std::size_t shift,
                            std::int64_t n, std::span<const std::int64_t> z)
{
  const std::size_t d = l.dim - 1;
  std::array<double, max_lattice_dim> w{}, wa{}, y{};
  std::array<std::int64_t, max_lattice_dim> index{};
  const double* delta = &l.shifts[shift * d];
  const double inv_n = 1.0 / static_cast<double>(n);
  double sum = 0.0;
  for (std::int64_t j = 0; j < n; ++j)
  {
    for (std::size_t k = 0; k < d; ++k)
    {
      double v = static_cast<double>(index[k]) * inv_n + delta[k];
      v -= std::floor(v);
      w[k] = std::abs(2.0 * v - 1.0);
      wa[k] = 1.0 - w[k];
      index[k] += z[k];
      if (index[k] >= n)
        index[k] -= n;
    }
    sum += 0.5 * (genz_integrand(p, l, w.data(), y.data()) +
                  genz_integrand(p, l, wa.data(), y.data()));
  }
  return sum * inv_n;
}

// Shift means of lattice rules are somewhat heavier tailed than normal, so the
// interval is wider than a nominal 99% one.
double error_factor(std::size_t shifts)
{
  boost::math::students_t dist(static_cast<double>(shifts - 1));
  return boost::math::quantile(dist, 0.99975);
}

int level_for(std::size_t points)
{
  int k = min_lattice_log;
  while (k < max_lattice_log && (std::size_t{1} << k) < points)
    ++k;
  return k - min_lattice_log;
}

template <bool Parallel>
Estimate run(const GenzProblem& p, const MvnOptions& options)
{
  const Layout l = make_layout(p, options);
  const std::size_t shifts = options.shifts;
  const std::size_t d = l.dim - 1;
  const double factor = error_factor(shifts);
  std::vector<double> means(shifts, 0.0);

  const int last_level = level_for(std::max<std::size_t>(options.max_points, 1));
  Estimate est;
  for (int level = std::min(level_for(options.initial_points), last_level);; ++level)
  {
    const std::int64_t n = lattice_sizes[level];
    const std::vector<std::int64_t> z = generating_vector(level, d);
    const long ns = static_cast<long>(shifts);
    if constexpr (Parallel)
    {
#pragma omp parallel for schedule(static)
      for (long s = 0; s < ns; ++s)
        means[s] = shifted_lattice_mean(p, l, static_cast<std::size_t>(s), n, z);
    }
    else
    {
      for (long s = 0; s < ns; ++s)
        means[s] = shifted_lattice_mean(p, l, static_cast<std::size_t>(s), n, z);
    }

    double mean = 0.0;
    for (double v : means)
      mean += v;
    mean /= static_cast<double>(shifts);
    double var = 0.0;
    for (double v : means)
      var += (v - mean) * (v - mean);
    var /= static_cast<double>(shifts * (shifts - 1));

    est.value = mean;
    est.error = std::max(factor * std::sqrt(var), rounding_floor);
    est.points = static_cast<std::size_t>(n);
    if (est.error <= options.abs_tolerance || level >= last_level)
      break;
  }
  return est;
}

} // namespace

GenzProblem prepare(std::vector<double> limits, Eigen::MatrixXd c)
{
  const std::size_t m = limits.size();
  Eigen::MatrixXd chol = Eigen::MatrixXd::Zero(m, m);
  std::vector<double> y(m, 0.0);

  for (std::size_t i = 0; i < m; ++i)
  {
    std::size_t best = i;
    double best_p = 2.0;
    for (std::size_t j = i; j < m; ++j)
    {
      double s = 0.0, var = c(j, j);
      for (std::size_t k = 0; k < i; ++k)
      {
        s += chol(j, k) * y[k];
        var -= chol(j, k) * chol(j, k);
      }
      const double sd = std::sqrt(std::max(var, 1e-300));
      const double prob = std_normal_cdf((limits[j] - s) / sd);
      if (prob < best_p)
      {
        best_p = prob;
        best = j;
      }
    }
    if (best != i)
    {
      std::swap(limits[i], limits[best]);
      c.row(i).swap(c.row(best));
      c.col(i).swap(c.col(best));
      chol.row(i).swap(chol.row(best));
    }

    double var = c(i, i);
    for (std::size_t k = 0; k < i; ++k)
      var -= chol(i, k) * chol(i, k);
    if (!(var > 0.0))
      throw NumericError("covariance lost positive definiteness during factorization", var);
    chol(i, i) = std::sqrt(var);
    for (std::size_t l = i + 1; l < m; ++l)
    {
      double v = c(l, i);
      for (std::size_t k = 0; k < i; ++k)
        v -= chol(l, k) * chol(i, k);
      chol(l, i) = v / chol(i, i);
    }

    double s = 0.0;
    for (std::size_t k = 0; k < i; ++k)
      s += chol(i, k) * y[k];
    const double b = (limits[i] - s) / chol(i, i);
    const double phi_b = std_normal_cdf(b);
    // E[Z | Z < b]
    y[i] = phi_b > 1e-300 ? -density(b) / phi_b : b;
  }
  return {std::move(limits), std::move(chol)};
}

Estimate integrate_serial(const GenzProblem& problem, const MvnOptions& options)
{
  return run<false>(problem, options);
}

Estimate integrate_parallel(const GenzProblem& problem, const MvnOptions& options)
{
  return run<true>(problem, options);
}

} // namespace dbond::qmc
