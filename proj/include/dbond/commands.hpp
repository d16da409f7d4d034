#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>

#include "dbond/error.hpp"

namespace dbond
{

/// Process exit codes of the command-line front end.
enum ExitCode : int
{
  exit_ok = 0,
  exit_validation = 2,
  exit_unsupported_regime = 3,
  exit_accuracy = 4
};

int exit_code_for(ErrorCode code);

/// Where a command writes. `records` receives one JSON object per line and may
/// be null.
struct CommandIo
{
  std::ostream& out;
  std::ostream& err;
  std::ostream* records = nullptr;
};

int cmd_price(const std::string& scenario_path, CommandIo io);

/// `figure` is "custom" (use the file's sweep) or a preset number 1..18 whose
/// sweep and output quantity replace the file's.
int cmd_curve(const std::string& scenario_path, const std::string& figure, CommandIo io);

struct ValidateOptions
{
  std::size_t n_space = 2048;
  std::size_t n_time = 2048;
  std::size_t paths = 1'000'000;
  std::uint64_t seed = 20130101;
  double pde_tolerance = 1e-3;
  double mc_sigmas = 3.0;
};

int cmd_validate(const std::string& scenario_path, const ValidateOptions& options, CommandIo io);

/// Writes {"error": CODE, "message": ...} as one line to io.err.
void report_error(CommandIo io, const Error& e);

} // namespace dbond
