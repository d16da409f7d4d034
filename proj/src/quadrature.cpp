#include "dbond/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace dbond
{

namespace
{

struct Panel
{
  double lo, hi, value, error;
};

struct ByError
{
  bool operator()(const Panel& a, const Panel& b) const
  {
    if (a.error != b.error)
      return a.error < b.error;
    return a.lo > b.lo;
  }
};

Panel gauss_kronrod_15(const std::function<double(double)>& f, double lo, double hi)
{
  using kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
  using gauss = boost::math::quadrature::gauss<double, 7>;
  const auto& xk = kronrod::abscissa(); // 0 first, then the positive nodes
  const auto& wk = kronrod::weights();
  const auto& wg = gauss::weights(); // Gauss nodes are the odd Kronrod nodes

  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = f(mid);
  double k = wk[0] * fc;
  double g = wg[0] * fc;
  for (std::size_t i = 1; i < xk.size(); ++i)
  {
    const double dx = half * xk[i];
    const double pair = f(mid - dx) + f(mid + dx);
    k += wk[i] * pair;
    if (i % 2 == 0)
      g += wg[i / 2] * pair;
  }
  return {lo, hi, k * half, std::abs((k - g) * half)};
}

} // namespace

double pairwise_sum(const double* values, std::size_t n)
{
  if (n == 0)
    return 0.0;
  if (n <= 8)
  {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      s += values[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(values, h) + pairwise_sum(values + h, n - h);
}

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                                    const QuadratureOptions& options)
{
  if (lo == hi)
    return {};
  std::priority_queue<Panel, std::vector<Panel>, ByError> heap;
  heap.push(gauss_kronrod_15(f, lo, hi));
  double total_error = heap.top().error;

  while (total_error > options.abs_tolerance && heap.size() < options.max_intervals)
  {
    const Panel worst = heap.top();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi))
      break; // panel cannot be split further in floating point
    heap.pop();
    const Panel left = gauss_kronrod_15(f, worst.lo, mid);
    const Panel right = gauss_kronrod_15(f, mid, worst.hi);
    total_error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }

  std::vector<Panel> panels;
  panels.reserve(heap.size());
  while (!heap.empty())
  {
    panels.push_back(heap.top());
    heap.pop();
  }
  std::sort(panels.begin(), panels.end(), [](const Panel& a, const Panel& b) { return a.lo < b.lo; });
  std::vector<double> values(panels.size()), errors(panels.size());
  for (std::size_t i = 0; i < panels.size(); ++i)
  {
    values[i] = panels[i].value;
    errors[i] = panels[i].error;
  }

  QuadratureResult out;
  out.value = pairwise_sum(values.data(), values.size());
  out.error = pairwise_sum(errors.data(), errors.size());
  out.intervals = panels.size();
  out.converged = out.error <= options.abs_tolerance;
  return out;
}

} // namespace dbond
