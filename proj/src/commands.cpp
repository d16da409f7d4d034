#include "dbond/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <functional>
#include <ostream>
#include <vector>

#include <json.hpp>

#include "dbond/mc_oracle.hpp"
#include "dbond/pde_oracle.hpp"
#include "dbond/pricer.hpp"
#include "dbond/scenario.hpp"

namespace dbond
{

namespace
{

std::string num(double v)
{
  if (std::isnan(v))
    return "";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  (void)ec;
  return std::string(buf, ptr);
}

void emit(CommandIo io, const nlohmann::ordered_json& record)
{
  if (io.records)
    *io.records << record.dump() << '\n';
}

// Relative firm value of the evaluation at time t.
double spot_at(const Scenario& s, double t)
{
  if (s.evaluation.x)
    return *s.evaluation.x;
  return relative_spot(s.market, s.schedule, *s.evaluation.V, t);
}

PricerOptions serial_pricer()
{
  PricerOptions o;
  o.integral.mvn.parallel = false;
  return o;
}

int run_guarded(CommandIo io, const std::function<int()>& body)
{
  try
  {
    return body();
  }
  catch (const Error& e)
  {
    report_error(io, e);
    return exit_code_for(e.code());
  }
}

// Evaluates f(k) for k < n in parallel, rethrowing the first failure in index
// order so the reported error does not depend on scheduling.
template <class F>
void parallel_for(std::size_t n, F&& f)
{
  std::vector<std::exception_ptr> failures(n);
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < count; ++k)
  {
    try
    {
      f(static_cast<std::size_t>(k));
    }
    catch (...)
    {
      failures[static_cast<std::size_t>(k)] = std::current_exception();
    }
  }
  for (const auto& e : failures)
    if (e)
      std::rethrow_exception(e);
}

} // namespace

int exit_code_for(ErrorCode code)
{
  switch (code)
  {
  case ErrorCode::unsupported_regime: return exit_unsupported_regime;
  case ErrorCode::accuracy:
  case ErrorCode::numeric: return exit_accuracy;
  default: return exit_validation;
  }
}

void report_error(CommandIo io, const Error& e)
{
  nlohmann::ordered_json j;
  j["error"] = std::string(to_string(e.code()));
  j["message"] = e.what();
  io.err << j.dump() << '\n';
}

int cmd_price(const std::string& path, CommandIo io)
{
  return run_guarded(io, [&] {
    const Scenario s = load_scenario(path);
    const double t = s.evaluation.t;
    const double x = spot_at(s, t);
    const PriceReport rep = price_relative(s.market, s.schedule, s.recovery, x, t);
    const double discount = std::exp(-s.market.r * (s.schedule.maturity() - t));
    const bool exo = s.recovery.mode == RecoveryMode::exogenous;

    io.out << "t,x,V,C,u,W,CS,interval,cdf_error,quadrature_error\n";
    io.out << num(t) << ',' << num(x) << ',' << num(x * discount) << ',' << num(rep.price) << ','
           << num(rep.relative_price) << ',' << (exo ? num(rep.survival_prob) : "") << ','
           << num(rep.credit_spread) << ',' << rep.interval_index << ','
           << num(rep.diagnostics.cdf_error) << ',' << num(rep.diagnostics.quadrature_error) << '\n';

    nlohmann::ordered_json j;
    j["command"] = "price";
    j["mode"] = exo ? "exogenous" : "endogenous";
    j["t"] = t;
    j["x"] = x;
    j["V"] = x * discount;
    j["C"] = rep.price;
    j["u"] = rep.relative_price;
    if (exo)
      j["W"] = rep.survival_prob;
    j["CS"] = rep.credit_spread;
    j["default_free"] = discount;
    j["interval"] = rep.interval_index;
    j["cdf_error"] = rep.diagnostics.cdf_error;
    j["quadrature_error"] = rep.diagnostics.quadrature_error;
    emit(io, j);
    return static_cast<int>(exit_ok);
  });
}

int cmd_curve(const std::string& path, const std::string& figure, CommandIo io)
{
  return run_guarded(io, [&] {
    Scenario s = load_scenario(path);
    if (figure != "custom")
    {
      int n = 0;
      const auto [ptr, ec] = std::from_chars(figure.data(), figure.data() + figure.size(), n);
      if (ec != std::errc{} || ptr != figure.data() + figure.size() || n < 1 || n > figure_count)
        throw Error(ErrorCode::parse, "--figure must be 1..18 or 'custom'");
      const Scenario preset = figure_preset(n);
      // The preset sweep is applied to the file's data; figure-specific base
      // overrides (lambda_0 for 9 and 18) come along with it.
      if (n % 9 == 0)
        s.schedule.intensities = preset.schedule.intensities;
      s.sweep = preset.sweep;
      s.quantity = preset.quantity;
      validate(s);
    }
    const Sweep sweep = s.sweep ? *s.sweep : Sweep{"R", {{s.recovery.rate}}};
    const double T = s.schedule.maturity();

    std::vector<double> grid = s.evaluation.t_grid.empty() ? default_t_grid(T) : s.evaluation.t_grid;
    const auto clipped = std::remove_if(grid.begin(), grid.end(), [&](double t) { return t >= T; });
    if (clipped != grid.end())
    {
      io.err << "warning: dropped " << (grid.end() - clipped)
             << " t-grid point(s) at or beyond maturity\n";
      grid.erase(clipped, grid.end());
    }

    const std::size_t ns = sweep.values.size(), nt = grid.size();
    std::vector<Scenario> series(ns);
    for (std::size_t k = 0; k < ns; ++k)
      series[k] = apply_sweep(s, sweep, k);
    std::vector<double> values(ns * nt);
    std::vector<PriceReport> reports(ns * nt);
    const PricerOptions opts = serial_pricer();
    parallel_for(ns * nt, [&](std::size_t idx) {
      const Scenario& sc = series[idx / nt];
      const double t = grid[idx % nt];
      reports[idx] = price_relative(sc.market, sc.schedule, sc.recovery, spot_at(sc, t), t, opts);
      values[idx] = s.quantity == Quantity::price ? reports[idx].price : reports[idx].credit_spread;
    });

    const char* q = s.quantity == Quantity::price ? "C" : "CS";
    io.out << 't';
    for (std::size_t k = 0; k < ns; ++k)
      io.out << ',' << q << '[' << sweep_label(sweep, k) << ']';
    io.out << '\n';
    for (std::size_t i = 0; i < nt; ++i)
    {
      io.out << num(grid[i]);
      for (std::size_t k = 0; k < ns; ++k)
        io.out << ',' << num(values[k * nt + i]);
      io.out << '\n';
    }

    for (std::size_t k = 0; k < ns; ++k)
      for (std::size_t i = 0; i < nt; ++i)
      {
        const PriceReport& r = reports[k * nt + i];
        nlohmann::ordered_json j;
        j["command"] = "curve";
        j["figure"] = figure;
        j["series"] = sweep_label(sweep, k);
        j["t"] = grid[i];
        j["x"] = r.x;
        j["C"] = r.price;
        j["CS"] = r.credit_spread;
        if (r.survival_prob >= 0.0)
          j["W"] = r.survival_prob;
        emit(io, j);
      }
    return static_cast<int>(exit_ok);
  });
}

int cmd_validate(const std::string& path, const ValidateOptions& options, CommandIo io)
{
  return run_guarded(io, [&] {
    const Scenario s = load_scenario(path);
    if (s.sweep)
      io.err << "warning: validate ignores the sweep section\n";
    std::vector<double> times = s.evaluation.t_grid.empty() ? std::vector<double>{s.evaluation.t}
                                                              : s.evaluation.t_grid;
    for (double t : times)
      if (!(t >= 0.0 && t < s.schedule.maturity()))
        throw DomainError("validation times must lie in [0, T)");

    const bool exo = s.recovery.mode == RecoveryMode::exogenous;
    // Closed form first: it raises the regime error before any oracle work.
    std::vector<PriceReport> closed;
    for (double t : times)
      closed.push_back(price_relative(s.market, s.schedule, s.recovery, spot_at(s, t), t));

    GridSpec grid;
    grid.n_space = options.n_space;
    grid.n_time_per_interval = options.n_time;
    for (double t : times)
      grid.probes.push_back(spot_at(s, t));
    grid.richardson_tolerance = options.pde_tolerance;
    const CascadeSolution pde = exo ? solve_exogenous_cascade(s.market, s.schedule, s.recovery, grid)
                                    : solve_endogenous_cascade(s.market, s.schedule, s.recovery, grid);
    if (pde.accuracy_warning)
      io.err << "warning: " << pde.warning << '\n';

    SimConfig sim;
    sim.n_paths = options.paths;
    sim.seed = options.seed;

    io.out << "t,x,closed,pde,mc,mc_std_error,pde_abs_diff,mc_sigmas,status\n";
    bool all_pass = true;
    for (std::size_t k = 0; k < times.size(); ++k)
    {
      const double t = times[k];
      const double x = spot_at(s, t);
      const double discount = std::exp(-s.market.r * (s.schedule.maturity() - t));
      const double c = closed[k].price;
      const double p = discount * sample(pde, x, t);
      const SimResult mc = simulate_relative(s.market, s.schedule, s.recovery, x, t, sim);
      const double pde_diff = std::abs(c - p);
      const double mc_diff = std::abs(c - mc.price);
      // Differences at rounding level count as agreement even with zero variance.
      const double sigmas = mc_diff <= 1e-12       ? 0.0
                            : mc.std_error > 0.0 ? mc_diff / mc.std_error
                                                 : INFINITY;
      const bool pass = pde_diff <= options.pde_tolerance &&
                        mc_diff <= options.mc_sigmas * mc.std_error + 1e-12;
      all_pass = all_pass && pass;
      io.out << num(t) << ',' << num(x) << ',' << num(c) << ',' << num(p) << ',' << num(mc.price)
             << ',' << num(mc.std_error) << ',' << num(pde_diff) << ',' << num(sigmas) << ','
             << (pass ? "PASS" : "FAIL") << '\n';

      nlohmann::ordered_json j;
      j["command"] = "validate";
      j["t"] = t;
      j["x"] = x;
      j["closed"] = c;
      j["pde"] = p;
      j["mc"] = mc.price;
      j["mc_std_error"] = mc.std_error;
      j["pde_abs_diff"] = pde_diff;
      j["mc_sigmas"] = std::isfinite(sigmas) ? nlohmann::ordered_json(sigmas) : nlohmann::ordered_json();
      j["pde_richardson"] = pde.richardson_estimate;
      j["status"] = pass ? "PASS" : "FAIL";
      emit(io, j);
    }
    return static_cast<int>(all_pass ? exit_ok : exit_accuracy);
  });
}

} // namespace dbond
