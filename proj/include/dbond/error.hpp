#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dbond
{

enum class ErrorCode
{
  domain,             // argument outside the mathematical domain
  schedule_order,     // dates/expiries not strictly increasing or t past the window
  schedule_shape,     // length mismatches in a schedule or spec
  numeric,            // non positive definite covariance and similar
  unsupported_regime, // mixed barrier / recovery-threshold regime
  parse,              // scenario file problems
  accuracy            // an oracle failed to reach its tolerance
};

std::string_view to_string(ErrorCode code);

/// Base exception for everything thrown by the library. The code is stable and
/// is what the CLI reports.
class Error : public std::runtime_error
{
public:
  Error(ErrorCode code, const std::string& what)
    : std::runtime_error(what), code_(code)
  {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

class DomainError : public Error
{
public:
  explicit DomainError(const std::string& what) : Error(ErrorCode::domain, what) {}
};

class ScheduleError : public Error
{
public:
  explicit ScheduleError(const std::string& what, ErrorCode code = ErrorCode::schedule_order)
    : Error(code, what)
  {}
};

class NumericError : public Error
{
public:
  NumericError(const std::string& what, double eigenvalue)
    : Error(ErrorCode::numeric, what), eigenvalue_(eigenvalue)
  {}

  /// Smallest eigenvalue of the offending covariance.
  double eigenvalue() const noexcept { return eigenvalue_; }

private:
  double eigenvalue_;
};

class UnsupportedRegimeError : public Error
{
public:
  explicit UnsupportedRegimeError(const std::string& what)
    : Error(ErrorCode::unsupported_regime, what)
  {}
};

} // namespace dbond
