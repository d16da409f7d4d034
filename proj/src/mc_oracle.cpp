#include "dbond/mc_oracle.hpp"

#include <algorithm>
#include <cmath>

#include "dbond/error.hpp"
#include "dbond/mvn.hpp"
#include "dbond/quadrature.hpp"

namespace dbond
{

namespace
{

std::uint64_t mix(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based uniform in (0, 1) keyed by (seed, stream, draw).
double uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t draw)
{
  const std::uint64_t bits = mix(seed ^ mix(stream ^ mix(draw + 0x632be59bd9b4e019ULL)));
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

struct PathOutcome
{
  double payoff;       // relative units: discounted payoff / exp(-r (T - t))
  bool survived;
  std::int32_t bin;    // histogram bin, -1 on survival
};

struct Simulator
{
  const MarketParams& params;
  const DefaultSchedule& s;
  const RecoveryModel& recovery;
  double x0;
  double t;
  std::size_t first; // interval containing t
  std::size_t bins;
  std::uint64_t seed;

  double recovery_value(double x) const
  {
    if (recovery.mode == RecoveryMode::exogenous)
      return recovery.rate;
    return recovery.rate > 0.0 ? std::min(1.0, recovery.rate * x / recovery.bonds) : 0.0;
  }

  std::int32_t bin_of(std::size_t interval, double when) const
  {
    const double len = s.dates[interval + 1] - s.dates[interval];
    const auto b = static_cast<std::size_t>((when - s.dates[interval]) / len * static_cast<double>(bins));
    return static_cast<std::int32_t>(interval * bins + std::min(b, bins - 1));
  }

  // One path on stream `stream`; `flip` selects the antithetic partner.
  PathOutcome run(std::uint64_t stream, bool flip) const
  {
    const double sigma = params.s_v;
    // The relative value x = V exp(r (T - s)) has drift -b; the barrier test
    // V(t_k) <= K_k exp(-r (T - t_k)) is x(t_k) <= K_k.
    const double drift = -params.b - 0.5 * sigma * sigma;
    double log_x = std::log(x0);
    double now = t;
    double u = uniform(seed, stream, 0);
    if (flip)
      u = 1.0 - u;
    double budget = -std::log(u); // unit exponential hazard budget
    std::uint64_t draw = 1;

    const auto advance = [&](double to) {
      const double dt = to - now;
      double z = std_normal_quantile(uniform(seed, stream, draw++));
      if (flip)
        z = -z;
      log_x += drift * dt + sigma * std::sqrt(dt) * z;
      now = to;
    };

    for (std::size_t k = first; k < s.intervals(); ++k)
    {
      const double end = s.dates[k + 1];
      const double lambda = s.intensities[k];
      const double hazard = lambda * (end - now);
      if (budget < hazard)
      {
        const double when = now + budget / lambda;
        advance(when);
        return {recovery_value(std::exp(log_x)), false, bin_of(k, when)};
      }
      budget -= hazard;
      advance(end);
      const double x = std::exp(log_x);
      if (x <= s.barriers[k])
        return {recovery_value(x), false, static_cast<std::int32_t>(k * bins + bins - 1)};
    }
    return {1.0, true, -1};
  }
};

template <bool Parallel>
void run_paths(const Simulator& sim, std::size_t groups, bool antithetic, std::vector<double>& payoff,
               std::vector<double>& alive, std::vector<std::int32_t>& bin)
{
  const std::size_t width = antithetic ? 2 : 1;
  const long n = static_cast<long>(groups);
  const auto body = [&](long g) {
    const std::size_t gi = static_cast<std::size_t>(g);
    double p = 0.0, a = 0.0;
    for (std::size_t w = 0; w < width; ++w)
    {
      const PathOutcome o = sim.run(gi, w == 1);
      p += o.payoff;
      a += o.survived ? 1.0 : 0.0;
      bin[gi * width + w] = o.bin;
    }
    payoff[gi] = p / static_cast<double>(width);
    alive[gi] = a / static_cast<double>(width);
  };
  if constexpr (Parallel)
  {
#pragma omp parallel for schedule(static)
    for (long g = 0; g < n; ++g)
      body(g);
  }
  else
  {
    for (long g = 0; g < n; ++g)
      body(g);
  }
}

// Mean and standard error of the mean with fixed-order pairwise sums.
std::pair<double, double> mean_and_error(const std::vector<double>& v)
{
  const std::size_t n = v.size();
  const double mean = pairwise_sum(v.data(), n) / static_cast<double>(n);
  if (n < 2)
    return {mean, 0.0};
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i)
    sq[i] = (v[i] - mean) * (v[i] - mean);
  const double var = pairwise_sum(sq.data(), n) / static_cast<double>(n - 1);
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

} // namespace

SimResult simulate_relative(const MarketParams& params, const DefaultSchedule& s,
                            const RecoveryModel& recovery, double x0, double t,
                            const SimConfig& config)
{
  validate(params);
  validate(s);
  validate(recovery);
  if (!(x0 > 0.0) || !std::isfinite(x0))
    throw DomainError("initial firm value must be positive");
  if (config.n_paths == 0)
    throw DomainError("n_paths must be at least 1");
  const std::size_t bins = std::max<std::size_t>(1, config.steps_per_interval);
  const Simulator sim{params, s, recovery, x0, t, locate_interval(s, t), bins, config.seed};

  const std::size_t width = config.antithetic ? 2 : 1;
  const std::size_t groups = (config.n_paths + width - 1) / width;
  std::vector<double> payoff(groups), alive(groups);
  std::vector<std::int32_t> bin(groups * width);
  if (config.parallel)
    run_paths<true>(sim, groups, config.antithetic, payoff, alive, bin);
  else
    run_paths<false>(sim, groups, config.antithetic, payoff, alive, bin);

  SimResult out;
  out.paths = groups * width;
  const double discount = std::exp(-params.r * (s.maturity() - t));
  const auto [m, e] = mean_and_error(payoff);
  out.price = discount * m;
  out.std_error = discount * e;
  const auto [sm, se] = mean_and_error(alive);
  out.survival_freq = sm;
  out.survival_std_error = se;
  out.default_histogram.assign(s.intervals() * bins, 0);
  for (std::int32_t b : bin)
    if (b >= 0)
      ++out.default_histogram[static_cast<std::size_t>(b)];
  return out;
}

SimResult simulate_price(const MarketParams& params, const DefaultSchedule& s,
                         const RecoveryModel& recovery, double V0, double t,
                         const SimConfig& config)
{
  validate(s);
  if (!(V0 > 0.0) || !std::isfinite(V0))
    throw DomainError("initial firm value must be positive");
  return simulate_relative(params, s, recovery, V0 * std::exp(params.r * (s.maturity() - t)), t,
                           config);
}

} // namespace dbond
