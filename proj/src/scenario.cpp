#include "dbond/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "dbond/error.hpp"

namespace dbond
{

namespace
{

Error parse_error(const std::string& what)
{
  return Error(ErrorCode::parse, what);
}

void only_keys(const YAML::Node& node, const std::string& where, std::set<std::string> allowed)
{
  if (!node.IsMap())
    throw parse_error(where + " must be a mapping");
  for (const auto& kv : node)
  {
    const std::string key = kv.first.as<std::string>();
    if (!allowed.count(key))
      throw parse_error("unknown key '" + key + "' in " + where);
  }
}

double number(const YAML::Node& node, const std::string& where)
{
  if (!node || !node.IsScalar())
    throw parse_error(where + " must be a number");
  try
  {
    return node.as<double>();
  }
  catch (const YAML::Exception&)
  {
    throw parse_error(where + " must be a number");
  }
}

double required(const YAML::Node& parent, const std::string& key, const std::string& where)
{
  if (!parent[key])
    throw parse_error("missing " + where + "." + key);
  return number(parent[key], where + "." + key);
}

std::vector<double> numbers(const YAML::Node& node, const std::string& where)
{
  if (!node || !node.IsSequence())
    throw parse_error(where + " must be a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < node.size(); ++i)
    out.push_back(number(node[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

bool is_vector_parameter(const std::string& p)
{
  return p == "K" || p == "lambda";
}

// Index suffix of "K_3" / "lambda_0", or -1 when `p` is not of that form.
long indexed(const std::string& p, const std::string& stem)
{
  const std::string prefix = stem + "_";
  if (p.rfind(prefix, 0) != 0 || p.size() == prefix.size())
    return -1;
  long v = 0;
  const char* first = p.data() + prefix.size();
  const char* last = p.data() + p.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || v < 0)
    return -1;
  return v;
}

std::string format(double v)
{
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

void emit_list(std::ostringstream& os, const std::vector<double>& v)
{
  os << "[";
  for (std::size_t i = 0; i < v.size(); ++i)
    os << (i ? ", " : "") << format(v[i]);
  os << "]";
}

} // namespace

Scenario parse_scenario(const std::string& text)
{
  YAML::Node root;
  try
  {
    root = YAML::Load(text);
  }
  catch (const YAML::Exception& e)
  {
    throw parse_error(std::string("malformed scenario: ") + e.what());
  }
  if (!root || !root.IsMap())
    throw parse_error("scenario must be a mapping");
  only_keys(root, "scenario", {"market", "schedule", "recovery", "evaluation", "sweep", "output"});

  Scenario s;
  try
  {
    const YAML::Node market = root["market"];
    if (!market)
      throw parse_error("missing market section");
    only_keys(market, "market", {"r", "b", "s_V"});
    s.market = {required(market, "r", "market"), required(market, "b", "market"),
                required(market, "s_V", "market")};

    const YAML::Node schedule = root["schedule"];
    if (!schedule)
      throw parse_error("missing schedule section");
    only_keys(schedule, "schedule", {"dates", "intensities", "barriers"});
    s.schedule.dates = numbers(schedule["dates"], "schedule.dates");
    s.schedule.intensities = numbers(schedule["intensities"], "schedule.intensities");
    s.schedule.barriers = numbers(schedule["barriers"], "schedule.barriers");

    const YAML::Node recovery = root["recovery"];
    if (!recovery)
      throw parse_error("missing recovery section");
    only_keys(recovery, "recovery", {"mode", "R", "n"});
    const std::string mode = recovery["mode"] ? recovery["mode"].as<std::string>() : "";
    if (mode == "endogenous")
      s.recovery.mode = RecoveryMode::endogenous;
    else if (mode == "exogenous")
      s.recovery.mode = RecoveryMode::exogenous;
    else
      throw parse_error("recovery.mode must be 'endogenous' or 'exogenous'");
    s.recovery.rate = required(recovery, "R", "recovery");
    if (recovery["n"])
      s.recovery.bonds = number(recovery["n"], "recovery.n");
    else if (s.recovery.mode == RecoveryMode::endogenous)
      throw parse_error("missing recovery.n for endogenous recovery");

    const YAML::Node eval = root["evaluation"];
    if (!eval)
      throw parse_error("missing evaluation section");
    only_keys(eval, "evaluation", {"x", "V", "t", "t_grid"});
    if (eval["x"])
      s.evaluation.x = number(eval["x"], "evaluation.x");
    if (eval["V"])
      s.evaluation.V = number(eval["V"], "evaluation.V");
    if (s.evaluation.x.has_value() == s.evaluation.V.has_value())
      throw parse_error("evaluation needs exactly one of x or V");
    if (eval["t"])
      s.evaluation.t = number(eval["t"], "evaluation.t");
    if (eval["t_grid"])
      s.evaluation.t_grid = numbers(eval["t_grid"], "evaluation.t_grid");

    if (const YAML::Node sweep = root["sweep"])
    {
      only_keys(sweep, "sweep", {"parameter", "values"});
      if (!sweep["parameter"] || !sweep["values"] || !sweep["values"].IsSequence())
        throw parse_error("sweep needs a parameter and a list of values");
      Sweep sw;
      sw.parameter = sweep["parameter"].as<std::string>();
      const YAML::Node values = sweep["values"];
      for (std::size_t k = 0; k < values.size(); ++k)
      {
        const std::string where = "sweep.values[" + std::to_string(k) + "]";
        if (values[k].IsSequence())
          sw.values.push_back(numbers(values[k], where));
        else
          sw.values.push_back({number(values[k], where)});
      }
      s.sweep = std::move(sw);
    }

    if (const YAML::Node output = root["output"])
    {
      only_keys(output, "output", {"quantity"});
      const std::string q = output["quantity"] ? output["quantity"].as<std::string>() : "price";
      if (q == "price")
        s.quantity = Quantity::price;
      else if (q == "spread")
        s.quantity = Quantity::spread;
      else
        throw parse_error("output.quantity must be 'price' or 'spread'");
    }
  }
  catch (const YAML::Exception& e)
  {
    throw parse_error(std::string("malformed scenario: ") + e.what());
  }

  validate(s);
  return s;
}

Scenario load_scenario(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw parse_error("cannot open scenario file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str());
}

namespace
{

void validate_point(const Scenario& s)
{
  validate(s.market);
  validate(s.schedule);
  validate(s.recovery);
  const double v = s.evaluation.x ? *s.evaluation.x : s.evaluation.V.value_or(0.0);
  if (!(v > 0.0) || !std::isfinite(v))
    throw DomainError("evaluation firm value must be positive");
}

} // namespace

void validate(const Scenario& s)
{
  validate_point(s);
  if (!(s.evaluation.t >= 0.0 && s.evaluation.t < s.schedule.maturity()))
    throw DomainError("evaluation time must lie in [0, T)");
  for (double t : s.evaluation.t_grid)
    if (!(t >= 0.0) || !std::isfinite(t))
      throw DomainError("t_grid entries must be nonnegative");
  if (s.sweep)
  {
    if (s.sweep->values.empty())
      throw parse_error("sweep needs at least one value");
    for (std::size_t k = 0; k < s.sweep->values.size(); ++k)
      validate_point(apply_sweep(s, *s.sweep, k));
  }
}

Scenario apply_sweep(const Scenario& base, const Sweep& sweep, std::size_t k)
{
  if (k >= sweep.values.size())
    throw DomainError("sweep index out of range");
  Scenario s = base;
  const std::vector<double>& v = sweep.values[k];
  const std::string& p = sweep.parameter;
  const std::size_t N = s.schedule.intervals();
  const auto scalar = [&]() {
    if (v.size() != 1)
      throw parse_error("sweep parameter '" + p + "' takes one number per entry");
    return v[0];
  };

  if (is_vector_parameter(p))
  {
    if (v.size() != N)
      throw parse_error("sweep parameter '" + p + "' needs " + std::to_string(N) + " numbers per entry");
    (p == "K" ? s.schedule.barriers : s.schedule.intensities) = v;
  }
  else if (p == "R")
    s.recovery.rate = scalar();
  else if (p == "s_V")
    s.market.s_v = scalar();
  else if (p == "x")
  {
    s.evaluation.x = scalar();
    s.evaluation.V.reset();
  }
  else if (const long i = indexed(p, "K"); i >= 1 && static_cast<std::size_t>(i) <= N)
    s.schedule.barriers[static_cast<std::size_t>(i) - 1] = scalar();
  else if (const long j = indexed(p, "lambda"); j >= 0 && static_cast<std::size_t>(j) < N)
    s.schedule.intensities[static_cast<std::size_t>(j)] = scalar();
  else
    throw parse_error("unknown sweep parameter '" + p +
                      "' (expected R, s_V, x, K, K_1..K_N, lambda, lambda_0..lambda_{N-1})");
  return s;
}

std::string sweep_label(const Sweep& sweep, std::size_t k)
{
  std::string out = sweep.parameter + "=";
  const std::vector<double>& v = sweep.values.at(k);
  for (std::size_t i = 0; i < v.size(); ++i)
    out += (i ? ";" : "") + format(v[i]);
  return out;
}

std::string to_yaml(const Scenario& s)
{
  std::ostringstream os;
  os << "market:\n  r: " << format(s.market.r) << "\n  b: " << format(s.market.b)
     << "\n  s_V: " << format(s.market.s_v) << "\n";
  os << "schedule:\n  dates: ";
  emit_list(os, s.schedule.dates);
  os << "\n  intensities: ";
  emit_list(os, s.schedule.intensities);
  os << "\n  barriers: ";
  emit_list(os, s.schedule.barriers);
  os << "\nrecovery:\n  mode: "
     << (s.recovery.mode == RecoveryMode::endogenous ? "endogenous" : "exogenous")
     << "\n  R: " << format(s.recovery.rate) << "\n  n: " << format(s.recovery.bonds) << "\n";
  os << "evaluation:\n";
  if (s.evaluation.x)
    os << "  x: " << format(*s.evaluation.x) << "\n";
  else
    os << "  V: " << format(*s.evaluation.V) << "\n";
  os << "  t: " << format(s.evaluation.t) << "\n";
  if (!s.evaluation.t_grid.empty())
  {
    os << "  t_grid: ";
    emit_list(os, s.evaluation.t_grid);
    os << "\n";
  }
  if (s.sweep)
  {
    os << "sweep:\n  parameter: " << s.sweep->parameter << "\n  values: [";
    for (std::size_t k = 0; k < s.sweep->values.size(); ++k)
    {
      os << (k ? ", " : "");
      if (is_vector_parameter(s.sweep->parameter))
        emit_list(os, s.sweep->values[k]);
      else
        os << format(s.sweep->values[k][0]);
    }
    os << "]\n";
  }
  os << "output:\n  quantity: " << (s.quantity == Quantity::price ? "price" : "spread") << "\n";
  return os.str();
}

std::vector<double> default_t_grid(double maturity)
{
  std::vector<double> out(121);
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = static_cast<double>(k) * maturity / 121.0;
  return out;
}

Scenario base_scenario()
{
  Scenario s;
  s.market = {0.1, 0.05, 1.0};
  s.schedule.dates = {0.0, 3.0, 6.0};
  s.schedule.intensities = {0.002, 0.005};
  s.schedule.barriers = {100.0, 100.0};
  s.recovery = {RecoveryMode::exogenous, 0.5, 1.0};
  s.evaluation.x = 200.0;
  return s;
}

Scenario figure_preset(int n)
{
  if (n < 1 || n > figure_count)
    throw DomainError("figure presets are numbered 1.." + std::to_string(figure_count));
  Scenario s = base_scenario();
  s.quantity = n <= 9 ? Quantity::price : Quantity::spread;
  Sweep sw;
  switch ((n - 1) % 9 + 1)
  {
  case 1: sw = {"R", {{0.2}, {0.5}, {0.95}}}; break;
  case 2: sw = {"s_V", {{0.5}, {1.0}, {1.5}}}; break;
  case 3: sw = {"x", {{200}, {350}, {500}}}; break;
  case 4: sw = {"K", {{50, 50}, {100, 100}, {150, 150}}}; break;
  case 5: sw = {"K", {{50, 150}, {100, 100}, {150, 50}}}; break;
  case 6: sw = {"K_2", {{50}, {100}, {150}}}; break;
  case 7: sw = {"lambda", {{0.001, 0.002}, {0.01, 0.02}, {0.1, 0.2}}}; break;
  case 8: sw = {"lambda", {{0.001, 0.2}, {0.01, 0.02}, {0.1, 0.002}}}; break;
  case 9:
    s.schedule.intensities[0] = 0.01;
    sw = {"lambda_1", {{0.002}, {0.02}, {0.2}}};
    break;
  }
  s.sweep = std::move(sw);
  return s;
}

} // namespace dbond
