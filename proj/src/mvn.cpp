#include "dbond/mvn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/erf.hpp>

#include "dbond/error.hpp"
#include "dbond/qmc.hpp"

namespace dbond
{

std::string_view to_string(ErrorCode code)
{
  switch (code)
  {
  case ErrorCode::domain: return "DOMAIN";
  case ErrorCode::schedule_order: return "SCHEDULE_ORDER";
  case ErrorCode::schedule_shape: return "SCHEDULE_SHAPE";
  case ErrorCode::numeric: return "NUMERIC";
  case ErrorCode::unsupported_regime: return "UNSUPPORTED_REGIME";
  case ErrorCode::parse: return "PARSE";
  case ErrorCode::accuracy: return "ACCURACY";
  }
  return "UNKNOWN";
}

SignVector::SignVector(std::vector<int> signs) : signs_(std::move(signs))
{
  for (int s : signs_)
    if (s != 1 && s != -1)
      throw DomainError("sign entries must be +1 or -1, got " + std::to_string(s));
}

Eigen::MatrixXd CorrelationStructure::signed_covariance(const SignVector& signs) const
{
  if (signs.size() != dim())
    throw ScheduleError("sign vector length does not match the correlation dimension",
                        ErrorCode::schedule_shape);
  Eigen::MatrixXd out = covariance_;
  for (std::size_t i = 0; i < dim(); ++i)
    for (std::size_t j = 0; j < dim(); ++j)
      out(i, j) *= signs[i] * signs[j];
  return out;
}

CorrelationStructure build_correlation(double t, std::span<const double> expiries)
{
  const std::size_t m = expiries.size();
  if (m == 0)
    throw ScheduleError("at least one expiry is required", ErrorCode::schedule_shape);
  if (!(t < expiries[0]))
    throw ScheduleError("evaluation time must precede the first expiry");
  for (std::size_t i = 1; i < m; ++i)
    if (!(expiries[i - 1] < expiries[i]))
      throw ScheduleError("expiries must be strictly increasing");

  CorrelationStructure c;
  c.eval_time_ = t;
  c.expiries_.assign(expiries.begin(), expiries.end());
  c.covariance_.resize(m, m);
  c.precision_ = Eigen::MatrixXd::Zero(m, m);

  std::vector<double> tau(m);
  for (std::size_t i = 0; i < m; ++i)
    tau[i] = expiries[i] - t;

  for (std::size_t i = 0; i < m; ++i)
  {
    c.covariance_(i, i) = 1.0;
    for (std::size_t j = i + 1; j < m; ++j)
      c.covariance_(i, j) = c.covariance_(j, i) = std::sqrt(tau[i] / tau[j]);
  }

  if (m == 1)
  {
    c.precision_(0, 0) = 1.0;
    return c;
  }
  for (std::size_t i = 0; i < m; ++i)
  {
    double diag = 0.0;
    if (i > 0)
      diag += tau[i] / (expiries[i] - expiries[i - 1]);
    if (i + 1 < m)
      diag += tau[i] / (expiries[i + 1] - expiries[i]);
    // first row: tau_1/tau_1 + tau_1/(T_2-T_1) = (T_2-t)/(T_2-T_1)
    if (i == 0)
      diag = tau[1] / (expiries[1] - expiries[0]);
    c.precision_(i, i) = diag;
    if (i + 1 < m)
      c.precision_(i, i + 1) = c.precision_(i + 1, i) =
          -std::sqrt(tau[i] * tau[i + 1]) / (expiries[i + 1] - expiries[i]);
  }
  return c;
}

double std_normal_cdf(double x)
{
  if (std::isnan(x))
    throw DomainError("normal cdf argument is NaN");
  if (x >= cdf_saturation)
    return 1.0;
  if (x <= -cdf_saturation)
    return 0.0;
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double std_normal_quantile(double p)
{
  using namespace boost::math::policies;
  using fast = policy<promote_double<false>>;
  if (!(p > 0.0 && p < 1.0))
    throw DomainError("normal quantile needs p in (0, 1)");
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p, fast());
}

namespace
{

// Upper orthant P(X > h, Y > k); Drezner-Wesolowsky reduction with the
// Gauss-Legendre orders selected by |r|, as refined by Genz.
template <int N>
double bvnu_sum_small(double h, double k, double r)
{
  using rule = boost::math::quadrature::gauss<double, N>;
  const auto& x = rule::abscissa();
  const auto& w = rule::weights();
  const double hk = h * k;
  const double hs = 0.5 * (h * h + k * k);
  const double asr = 0.5 * std::asin(r);
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    for (double node : {1.0 - x[i], 1.0 + x[i]})
    {
      const double sn = std::sin(asr * node);
      sum += w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
    }
  }
  return sum * asr / (2.0 * std::numbers::pi) + std_normal_cdf(-h) * std_normal_cdf(-k);
}

double bvnu_large(double h, double k, double r)
{
  using rule = boost::math::quadrature::gauss<double, 20>;
  const auto& x = rule::abscissa();
  const auto& w = rule::weights();
  const double two_pi = 2.0 * std::numbers::pi;
  double hk = h * k;
  if (r < 0.0)
  {
    k = -k;
    hk = -hk;
  }
  double bvn = 0.0;
  if (std::abs(r) < 1.0)
  {
    const double as = (1.0 - r) * (1.0 + r);
    double a = std::sqrt(as);
    const double bs = (h - k) * (h - k);
    const double c = (4.0 - hk) / 8.0;
    const double d = (12.0 - hk) / 80.0;
    double asr = -(bs / as + hk) / 2.0;
    if (asr > -100.0)
      bvn = a * std::exp(asr) * (1.0 - c * (bs - as) * (1.0 - d * bs) / 3.0 + c * d * as * as);
    if (hk > -100.0)
    {
      const double b = std::sqrt(bs);
      const double sp = std::sqrt(two_pi) * std_normal_cdf(-b / a);
      bvn -= std::exp(-hk / 2.0) * sp * b * (1.0 - c * bs * (1.0 - d * bs) / 3.0);
    }
    a /= 2.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
      for (double node : {1.0 - x[i], 1.0 + x[i]})
      {
        const double xs = (a * node) * (a * node);
        asr = -(bs / xs + hk) / 2.0;
        if (asr <= -100.0)
          continue;
        const double sp = 1.0 + c * xs * (1.0 + 5.0 * d * xs);
        const double rs = std::sqrt(1.0 - xs);
        const double ep = std::exp(-(hk / 2.0) * xs / ((1.0 + rs) * (1.0 + rs))) / rs;
        sum += w[i] * std::exp(asr) * (sp - ep);
      }
    }
    bvn = (a * sum - bvn) / two_pi;
  }
  if (r > 0.0)
    return bvn + std_normal_cdf(-std::max(h, k));
  if (h >= k)
    return -bvn;
  const double span = h < 0.0 ? std_normal_cdf(k) - std_normal_cdf(h)
                              : std_normal_cdf(-h) - std_normal_cdf(-k);
  return span - bvn;
}

double bvnu(double h, double k, double r)
{
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (h == inf || k == inf)
    return 0.0;
  if (h == -inf)
    return k == -inf ? 1.0 : std_normal_cdf(-k);
  if (k == -inf)
    return std_normal_cdf(-h);
  if (r == 0.0)
    return std_normal_cdf(-h) * std_normal_cdf(-k);
  double p;
  const double ar = std::abs(r);
  if (ar < 0.3)
    p = bvnu_sum_small<6>(h, k, r);
  else if (ar < 0.75)
    p = bvnu_sum_small<12>(h, k, r);
  else if (ar < 0.925)
    p = bvnu_sum_small<20>(h, k, r);
  else
    p = bvnu_large(h, k, r);
  return std::clamp(p, 0.0, 1.0);
}

MvnResult evaluate(std::vector<double> a, Eigen::MatrixXd corr, const MvnOptions& options);

MvnResult drop_and_evaluate(const std::vector<double>& a, const Eigen::MatrixXd& corr,
                            std::size_t drop, const MvnOptions& options)
{
  const std::size_t m = a.size();
  std::vector<double> na;
  na.reserve(m - 1);
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < m; ++i)
    if (i != drop)
    {
      keep.push_back(i);
      na.push_back(a[i]);
    }
  Eigen::MatrixXd nc(m - 1, m - 1);
  for (std::size_t i = 0; i < keep.size(); ++i)
    for (std::size_t j = 0; j < keep.size(); ++j)
      nc(i, j) = corr(keep[i], keep[j]);
  return evaluate(std::move(na), std::move(nc), options);
}

// a: finite or infinite limits, corr: unit-diagonal correlation (signs applied).
MvnResult evaluate(std::vector<double> a, Eigen::MatrixXd corr, const MvnOptions& options)
{
  for (double v : a)
    if (v <= -cdf_saturation)
      return {0.0, 0.0};

  // +infinity (or saturated) coordinates marginalize out.
  {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] < cdf_saturation)
        keep.push_back(i);
    if (keep.size() != a.size())
    {
      std::vector<double> na;
      Eigen::MatrixXd nc(keep.size(), keep.size());
      for (std::size_t i = 0; i < keep.size(); ++i)
      {
        na.push_back(a[keep[i]]);
        for (std::size_t j = 0; j < keep.size(); ++j)
          nc(i, j) = corr(keep[i], keep[j]);
      }
      a = std::move(na);
      corr = std::move(nc);
    }
  }

  const std::size_t m = a.size();
  if (m == 0)
    return {1.0, 0.0};
  if (m == 1)
    return {std_normal_cdf(a[0]), 0.0};
  if (m == 2)
  {
    const double rho = corr(0, 1);
    if (std::abs(rho) > 1.0 + 1e-12)
      throw NumericError("correlation outside [-1, 1]", 1.0 - std::abs(rho));
    return {bivariate_cdf(a[0], a[1], std::clamp(rho, -1.0, 1.0)), 0.0};
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr, Eigen::EigenvaluesOnly);
  const double min_eig = eig.eigenvalues()(0);
  if (min_eig < degenerate_eigenvalue)
  {
    std::size_t bi = 0, bj = 1;
    double best = -1.0;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j)
        if (std::abs(corr(i, j)) > best)
        {
          best = std::abs(corr(i, j));
          bi = i;
          bj = j;
        }
    if (1.0 - best > 1e-6)
      throw NumericError("covariance is not positive definite (smallest eigenvalue " +
                             std::to_string(min_eig) + ")",
                         min_eig);
    if (corr(bi, bj) > 0.0)
    {
      // Same coordinate twice: the tighter half-line wins.
      const std::size_t drop = a[bi] <= a[bj] ? bj : bi;
      return drop_and_evaluate(a, corr, drop, options);
    }
    // Y_i = -Y_j: the event is -a_i < Y_j < a_j.
    if (a[bj] <= -a[bi])
      return {0.0, 0.0};
    const MvnResult upper = drop_and_evaluate(a, corr, bi, options);
    std::vector<double> lower_a = a;
    lower_a[bj] = -a[bi];
    const MvnResult lower = drop_and_evaluate(lower_a, corr, bi, options);
    return {std::max(0.0, upper.value - lower.value), upper.error + lower.error};
  }

  const qmc::GenzProblem problem = qmc::prepare(std::move(a), std::move(corr));
  const qmc::Estimate est = qmc::integrate(problem, options);
  return {std::clamp(est.value, 0.0, 1.0), est.error};
}

} // namespace

double bivariate_cdf(double a, double b, double rho)
{
  if (std::isnan(a) || std::isnan(b) || std::isnan(rho))
    throw DomainError("bivariate cdf argument is NaN");
  if (std::abs(rho) > 1.0)
    throw DomainError("bivariate correlation must lie in [-1, 1]");
  if (rho == 1.0)
    return std_normal_cdf(std::min(a, b));
  if (rho == -1.0)
    return std::max(0.0, std_normal_cdf(a) - std_normal_cdf(-b));
  return bvnu(-a, -b, rho);
}

MvnResult mvn_cdf(std::span<const double> a, const Eigen::MatrixXd& covariance,
                  const SignVector& signs, const MvnOptions& options)
{
  const std::size_t m = a.size();
  if (m == 0)
    throw DomainError("mvn_cdf needs at least one coordinate");
  if (static_cast<std::size_t>(covariance.rows()) != m ||
      static_cast<std::size_t>(covariance.cols()) != m || signs.size() != m)
    throw ScheduleError("mvn_cdf dimension mismatch", ErrorCode::schedule_shape);

  std::vector<double> scale(m);
  for (std::size_t i = 0; i < m; ++i)
  {
    if (std::isnan(a[i]))
      throw DomainError("mvn_cdf limit is NaN");
    if (!(covariance(i, i) > 0.0))
      throw NumericError("covariance diagonal must be positive", covariance(i, i));
    scale[i] = std::sqrt(covariance(i, i));
  }

  std::vector<double> limits(m);
  Eigen::MatrixXd corr(m, m);
  for (std::size_t i = 0; i < m; ++i)
  {
    limits[i] = a[i] / scale[i];
    for (std::size_t j = 0; j < m; ++j)
    {
      const double cij = covariance(i, j);
      if (std::abs(cij - covariance(j, i)) > 1e-12 * (1.0 + std::abs(cij)))
        throw NumericError("covariance is not symmetric", 0.0);
      corr(i, j) = i == j ? 1.0 : signs[i] * signs[j] * cij / (scale[i] * scale[j]);
    }
  }
  return evaluate(std::move(limits), std::move(corr), options);
}

MvnResult mvn_cdf(std::span<const double> a, const CorrelationStructure& corr,
                  const SignVector& signs, const MvnOptions& options)
{
  return mvn_cdf(a, corr.covariance(), signs, options);
}

} // namespace dbond
