#pragma once

#include <vector>

#include "dbond/mvn.hpp"

namespace dbond
{

/// Coefficients of the Black-Scholes operator a binary is priced under.
struct BsCoefficients
{
  double r = 0.0;     // risk-free rate
  double q = 0.0;     // dividend rate
  double sigma = 0.0; // volatility
};

enum class BinaryKind
{
  asset,
  bond
};

/// An m-th order asset or bond binary: pays x (asset) or 1 (bond) at T_m when
/// s_i x(T_i) > s_i K_i holds at every T_i.
struct BinarySpec
{
  BinaryKind kind = BinaryKind::bond;
  SignVector signs;
  std::vector<double> strikes;
  std::vector<double> expiries;
  BsCoefficients coeffs;

  std::size_t order() const noexcept { return strikes.size(); }
  double last_expiry() const { return expiries.back(); }
};

inline constexpr std::size_t max_binary_order = 16;

/// Throws unless the spec is well formed (positive strikes, increasing expiries,
/// matching lengths, 1 <= m <= 16, sigma > 0).
void validate(const BinarySpec& spec);

struct BinaryPrice
{
  double value = 0.0;
  double error = 0.0; // CDF error propagated through the prefactor
};

/// Closed-form price at spot x > 0 and time t < T_1.
BinaryPrice price_binary(const BinarySpec& spec, double x, double t,
                         const MvnOptions& options = {});

struct ShiftedBinary
{
  double scale = 1.0;
  BinarySpec spec;
};

/// Re-expresses the binary under rate new_r keeping q - r fixed:
/// price(spec) = scale * price(shifted spec).
ShiftedBinary shift_coefficients(const BinarySpec& spec, double new_r, double t);

} // namespace dbond
