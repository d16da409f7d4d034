// Command-line front end: price, curve and validate a scenario file.

#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "dbond/commands.hpp"

namespace
{

// "2048" or "2048x1024" (space x time per interval).
bool parse_grid(const std::string& text, dbond::ValidateOptions& o)
{
  try
  {
    const auto cross = text.find('x');
    std::size_t used = 0;
    o.n_space = std::stoul(text.substr(0, cross), &used);
    if (used != text.substr(0, cross).size())
      return false;
    o.n_time = cross == std::string::npos ? o.n_space : std::stoul(text.substr(cross + 1), &used);
    return cross == std::string::npos || used == text.size() - cross - 1;
  }
  catch (const std::exception&)
  {
    return false;
  }
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Credit-risky bond pricer with default checks at fixed dates"};
  app.require_subcommand(1);

  std::string file, figure = "custom", records, grid;
  dbond::ValidateOptions vopt;

  auto* price = app.add_subcommand("price", "Price the bond described by a scenario file");
  price->add_option("file", file, "Scenario file")->required();
  price->add_option("--records", records, "Also write JSON lines to this file");

  auto* curve = app.add_subcommand("curve", "Print a (t, C) or (t, CS) sweep as CSV");
  curve->add_option("file", file, "Scenario file")->required();
  curve->add_option("--figure", figure, "Preset 1..18, or 'custom' for the file's sweep");
  curve->add_option("--records", records, "Also write JSON lines to this file");

  auto* validate = app.add_subcommand("validate", "Compare closed form, PDE and Monte Carlo");
  validate->add_option("file", file, "Scenario file")->required();
  validate->add_option("--grid", grid, "PDE grid: N or NxM (space x time per interval)");
  validate->add_option("--paths", vopt.paths, "Monte Carlo paths")->check(CLI::PositiveNumber);
  validate->add_option("--seed", vopt.seed, "Monte Carlo seed");
  validate->add_option("--records", records, "Also write JSON lines to this file");

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError& e)
  {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : dbond::exit_validation;
  }

  std::unique_ptr<std::ofstream> sink;
  if (!records.empty())
  {
    sink = std::make_unique<std::ofstream>(records, std::ios::binary);
    if (!*sink)
    {
      std::cerr << "cannot open records file '" << records << "'\n";
      return dbond::exit_validation;
    }
  }
  dbond::CommandIo io{std::cout, std::cerr, sink.get()};

  if (*price)
    return dbond::cmd_price(file, io);
  if (*curve)
    return dbond::cmd_curve(file, figure, io);
  if (!grid.empty() && !parse_grid(grid, vopt))
  {
    std::cerr << "--grid expects N or NxM\n";
    return dbond::exit_validation;
  }
  return dbond::cmd_validate(file, vopt, io);
}
