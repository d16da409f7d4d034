#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace dbond
{

/// Entries are exactly +1 or -1.
class SignVector
{
public:
  SignVector() = default;
  explicit SignVector(std::vector<int> signs);

  static SignVector all_plus(std::size_t m) { return SignVector(std::vector<int>(m, 1)); }

  std::size_t size() const noexcept { return signs_.size(); }
  int operator[](std::size_t i) const { return signs_[i]; }
  std::span<const int> values() const noexcept { return signs_; }

private:
  std::vector<int> signs_;
};

/// Correlation of a Brownian motion observed at expiries T_1 < ... < T_m seen
/// from time t: r_ij = sqrt((T_i - t)/(T_j - t)) for i <= j. The precision
/// matrix is the tridiagonal closed-form inverse.
class CorrelationStructure
{
public:
  std::size_t dim() const noexcept { return expiries_.size(); }
  double eval_time() const noexcept { return eval_time_; }
  std::span<const double> expiries() const noexcept { return expiries_; }

  const Eigen::MatrixXd& covariance() const noexcept { return covariance_; }
  const Eigen::MatrixXd& precision() const noexcept { return precision_; }

  /// (s_i s_j r_ij)
  Eigen::MatrixXd signed_covariance(const SignVector& signs) const;

private:
  friend CorrelationStructure build_correlation(double t, std::span<const double> expiries);

  double eval_time_ = 0.0;
  std::vector<double> expiries_;
  Eigen::MatrixXd covariance_;
  Eigen::MatrixXd precision_;
};

/// Throws ScheduleError unless t < T_1 < ... < T_m.
CorrelationStructure build_correlation(double t, std::span<const double> expiries);

/// Randomized QMC settings for dimensions >= 3.
struct MvnOptions
{
  std::uint64_t seed = 0x5eed2013ULL;
  std::size_t initial_points = std::size_t{1} << 13;
  std::size_t max_points = std::size_t{1} << 20;
  std::size_t shifts = 12;
  double abs_tolerance = 1e-7;
  bool parallel = true;
};

struct MvnResult
{
  double value = 0.0;
  double error = 0.0; // estimated absolute error
};

/// Standard normal CDF. +-infinity are accepted; NaN throws DomainError.
double std_normal_cdf(double x);

/// Standard normal quantile, p in (0, 1).
double std_normal_quantile(double p);

/// P(X < a, Y < b) for standard normals with correlation rho.
double bivariate_cdf(double a, double b, double rho);

/// N_m(a; S C S) with S = diag(signs): the probability that s_i Z_i < a_i for
/// every i where Z ~ N(0, C). The covariance need not have a unit diagonal.
MvnResult mvn_cdf(std::span<const double> a, const Eigen::MatrixXd& covariance,
                  const SignVector& signs, const MvnOptions& options = {});

MvnResult mvn_cdf(std::span<const double> a, const CorrelationStructure& corr,
                  const SignVector& signs, const MvnOptions& options = {});

/// Smallest covariance eigenvalue below which two coordinates are merged.
inline constexpr double degenerate_eigenvalue = 1e-10;

/// Arguments beyond this magnitude are treated as infinite.
inline constexpr double cdf_saturation = 38.0;

} // namespace dbond
