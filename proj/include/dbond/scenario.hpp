#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dbond/model.hpp"

namespace dbond
{

enum class Quantity
{
  price,
  spread
};

struct Evaluation
{
  std::optional<double> x; // relative firm value, held fixed across t
  std::optional<double> V; // firm value
  double t = 0.0;
  std::vector<double> t_grid; // empty: default grid
};

/// One named parameter and the values it takes, one entry per series. Scalar
/// parameters carry one number per entry; "K" and "lambda" carry a full vector.
struct Sweep
{
  std::string parameter;
  std::vector<std::vector<double>> values;
};

struct Scenario
{
  MarketParams market;
  DefaultSchedule schedule;
  RecoveryModel recovery;
  Evaluation evaluation;
  std::optional<Sweep> sweep;
  Quantity quantity = Quantity::price;
};

/// Parses the YAML scenario format documented in the README. Throws Error with
/// ErrorCode::parse for syntax/schema problems and the domain codes for
/// invalid values.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

std::string to_yaml(const Scenario& scenario);

/// Checks every component and the sweep against the schedule.
void validate(const Scenario& scenario);

/// Copy of the scenario with entry `k` of the sweep applied.
Scenario apply_sweep(const Scenario& scenario, const Sweep& sweep, std::size_t k);

/// Display label of sweep entry k, e.g. "R=0.2" or "K=50;150".
std::string sweep_label(const Sweep& sweep, std::size_t k);

/// t_k = k T / 121 for k = 0..120.
std::vector<double> default_t_grid(double maturity);

/// Base data of the parameter studies: r = 0.1, b = 0.05, s_V = 1, x = 200,
/// dates (0, 3, 6), intensities (0.002, 0.005), barriers (100, 100), R = 0.5.
Scenario base_scenario();

inline constexpr int figure_count = 18;

/// Preset for figure n in 1..18 (1-9 price, 10-18 credit spread).
Scenario figure_preset(int n);

} // namespace dbond
