#include "dbond/pricer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "dbond/error.hpp"

namespace dbond
{

namespace
{

// One indicator s x(date) > s K. Strikes of 0 or +infinity are allowed here and
// resolved before anything reaches the binary pricer.
struct Condition
{
  int sign;
  double strike;
  double date;
};

// Conditions that still constrain anything; `empty_event` when one of them can
// never hold.
struct Reduced
{
  bool empty_event = false;
  std::vector<Condition> kept;
};

Reduced reduce(const std::vector<Condition>& conditions)
{
  Reduced out;
  for (const Condition& c : conditions)
  {
    if (c.strike == 0.0)
    {
      if (c.sign < 0)
        out.empty_event = true;
      continue;
    }
    if (std::isinf(c.strike))
    {
      if (c.sign > 0)
        out.empty_event = true;
      continue;
    }
    out.kept.push_back(c);
  }
  return out;
}

BinarySpec make_spec(BinaryKind kind, const std::vector<Condition>& kept, const BsCoefficients& c)
{
  BinarySpec spec;
  spec.kind = kind;
  std::vector<int> signs;
  for (const Condition& k : kept)
  {
    signs.push_back(k.sign);
    spec.strikes.push_back(k.strike);
    spec.expiries.push_back(k.date);
  }
  spec.signs = SignVector(std::move(signs));
  spec.coeffs = c;
  return spec;
}

struct Assembler
{
  const MarketParams& params;
  const PricerOptions& options;
  double x;
  double t;
  Diagnostics diag{};

  BsCoefficients coeffs() const { return {0.0, params.b, params.s_v}; }

  // Binary over `conditions` paying 1 (bond) or x (asset) at `payment`.
  double binary(BinaryKind kind, const std::vector<Condition>& conditions, double payment,
                double shift_rate)
  {
    const Reduced red = reduce(conditions);
    if (red.empty_event)
      return 0.0;
    const BsCoefficients c = coeffs();
    const double carry = kind == BinaryKind::asset ? c.q : c.r;
    if (red.kept.empty())
      return (kind == BinaryKind::asset ? x : 1.0) * std::exp(-carry * (payment - t));

    const double tail = std::exp(-carry * (payment - red.kept.back().date));
    BinarySpec spec = make_spec(kind, red.kept, c);
    BinaryPrice p;
    if (options.shifted_assembly)
    {
      const ShiftedBinary s = shift_coefficients(spec, shift_rate, t);
      p = price_binary(s.spec, x, t, options.integral.mvn);
      p.value *= s.scale;
      p.error *= s.scale;
    }
    else
      p = price_binary(spec, x, t, options.integral.mvn);
    ++diag.binaries;
    diag.cdf_error += tail * p.error;
    return tail * p.value;
  }

  // int_lo^hi lambda e^{-lambda (tau - lo)} binary(fixed..., (sign, strike, tau)) dtau
  double integral(BinaryKind kind, const std::vector<Condition>& fixed, int sign, double strike,
                  double lambda, double lo, double hi)
  {
    if (lambda == 0.0 || lo == hi)
      return 0.0;
    const Reduced red = reduce(fixed);
    if (red.empty_event)
      return 0.0;
    std::vector<Condition> kept = red.kept;
    kept.push_back({sign, strike, hi});
    BinarySpec base = make_spec(kind, kept, coeffs());
    ++diag.integrals;

    if (!options.shifted_assembly)
    {
      const IntegralResult r =
          integral_binary({base, lambda, lo, lo, hi}, x, t, options.integral);
      diag.quadrature_error += r.error;
      return r.value;
    }

    // lambda e^{-lambda (tau - lo)} B(tau) = lambda e^{lambda (lo - t)} B'(tau)
    // with B' priced at rate lambda and dividend b + lambda.
    base.coeffs = {lambda, params.b + lambda, params.s_v};
    MvnOptions mvn = options.integral.mvn;
    if (base.order() >= 3)
      mvn.initial_points = mvn.max_points = options.integral.qmc_points;
    const QuadratureResult q = integrate_adaptive(
        [&](double tau) {
          base.expiries.back() = tau;
          return price_binary(base, x, t, mvn).value;
        },
        lo, hi, options.integral.quadrature);
    const double scale = lambda * std::exp(lambda * (lo - t));
    diag.quadrature_error += scale * q.error;
    return scale * q.value;
  }
};

struct Setup
{
  std::size_t i;              // interval containing t
  std::size_t n;              // number of intervals
  std::vector<double> hazard; // E_m for m = i..N-1, stored at index m
};

Setup setup(const MarketParams& params, const DefaultSchedule& s, double x, double t)
{
  validate(params);
  validate(s);
  if (!(x > 0.0) || !std::isfinite(x))
    throw DomainError("relative firm value must be positive");
  Setup out;
  out.i = locate_interval(s, t);
  out.n = s.intervals();
  out.hazard.assign(out.n, 0.0);
  // Cumulative hazards stay in log space; only exp(-E_m) is ever formed.
  double acc = s.intensities[out.i] * (s.dates[out.i + 1] - t);
  out.hazard[out.i] = acc;
  for (std::size_t m = out.i + 1; m < out.n; ++m)
  {
    acc += s.intensities[m] * (s.dates[m + 1] - s.dates[m]);
    out.hazard[m] = acc;
  }
  return out;
}

// Barrier conditions x(t_k) > K_k for k = i+1..last.
std::vector<Condition> barrier_chain(const DefaultSchedule& s, std::size_t i, std::size_t last)
{
  std::vector<Condition> out;
  for (std::size_t k = i + 1; k <= last; ++k)
    out.push_back({+1, s.barriers[k - 1], s.dates[k]});
  return out;
}

RelativePrice survival_impl(const MarketParams& params, const DefaultSchedule& s, double x, double t,
                            const PricerOptions& options)
{
  const Setup st = setup(params, s, x, t);
  Assembler a{params, options, x, t};
  const double w = std::exp(-st.hazard[st.n - 1]) *
                   a.binary(BinaryKind::bond, barrier_chain(s, st.i, st.n), s.maturity(),
                            s.intensities[st.i]);
  RelativePrice out{std::clamp(w, 0.0, 1.0), a.diag};
  out.diagnostics.cdf_error *= std::exp(-st.hazard[st.n - 1]);
  return out;
}

} // namespace

double relative_spot(const MarketParams& params, const DefaultSchedule& schedule, double V,
                     double t)
{
  if (!(V > 0.0) || !std::isfinite(V))
    throw DomainError("firm value must be positive");
  return V * std::exp(params.r * (schedule.maturity() - t));
}

Regime classify_regime(const DefaultSchedule& s, const RecoveryModel& recovery,
                       std::size_t interval)
{
  const double threshold = recovery.threshold();
  bool below = false, above = false;
  for (std::size_t k = interval + 1; k <= s.intervals(); ++k)
    (s.barriers[k - 1] <= threshold ? below : above) = true;
  if (below && above)
    return Regime::mixed;
  return above ? Regime::barriers_above_threshold : Regime::barriers_below_threshold;
}

RelativePrice relative_price_endogenous(const MarketParams& params, const DefaultSchedule& s,
                                        const RecoveryModel& recovery, double x, double t,
                                        const PricerOptions& options)
{
  validate(recovery);
  if (recovery.mode != RecoveryMode::endogenous)
    throw DomainError("relative_price_endogenous needs endogenous recovery");
  const Setup st = setup(params, s, x, t);
  const std::size_t i = st.i, n = st.n;
  const Regime regime = classify_regime(s, recovery, i);
  if (regime == Regime::mixed)
    throw UnsupportedRegimeError(
        "barriers straddle n/R; only the all-below and all-above regimes have closed forms");

  Assembler a{params, options, x, t};
  const double rho = s.intensities[i]; // shift rate for the cross-check mode
  const auto decay = [&](std::size_t m) { return std::exp(-st.hazard[m]); };
  const double ratio = recovery.rate / recovery.bonds; // R / n
  const double theta = recovery.threshold();
  const bool recovers = recovery.rate > 0.0;

  double u = 0.0;
  if (regime == Regime::barriers_below_threshold)
  {
    u += decay(n - 1) * a.binary(BinaryKind::bond, barrier_chain(s, i, n), s.maturity(), rho);
    if (recovers)
      for (std::size_t m = i; m < n; ++m)
      {
        // survive up to t_m, breach at t_{m+1}, recover (R/n) x since x <= K <= n/R
        std::vector<Condition> c = barrier_chain(s, i, m);
        c.push_back({-1, s.barriers[m], s.dates[m + 1]});
        u += decay(m) * ratio * a.binary(BinaryKind::asset, c, s.dates[m + 1], rho);
      }
  }
  else
  {
    for (std::size_t m = i; m < n; ++m)
    {
      // breach at t_{m+1}: pays 1 on (n/R, K], (R/n) x below n/R
      std::vector<Condition> c = barrier_chain(s, i, m);
      c.push_back({+1, theta, s.dates[m + 1]});
      double term = a.binary(BinaryKind::bond, c, s.dates[m + 1], rho);
      c.back().sign = -1;
      term += ratio * a.binary(BinaryKind::asset, c, s.dates[m + 1], rho);
      u += decay(m) * term;
    }
    for (std::size_t m = i; m + 1 < n; ++m)
      u -= decay(m) *
           a.binary(BinaryKind::bond, barrier_chain(s, i, m + 1), s.dates[m + 1], rho);
  }

  // Unexpected default at tau in (t_m, t_{m+1}) pays min(1, R x(tau) / n).
  if (recovers)
  {
    const auto jump_term = [&](std::size_t m, double lo, double hi, double prefactor) {
      const std::vector<Condition> fixed = barrier_chain(s, i, m);
      const double lambda = s.intensities[m];
      const double bond = a.integral(BinaryKind::bond, fixed, +1, theta, lambda, lo, hi);
      const double asset = a.integral(BinaryKind::asset, fixed, -1, theta, lambda, lo, hi);
      return prefactor * (bond + ratio * asset);
    };
    u += jump_term(i, t, s.dates[i + 1], 1.0);
    for (std::size_t m = i + 1; m < n; ++m)
      u += jump_term(m, s.dates[m], s.dates[m + 1], decay(m - 1));
  }

  return {u, a.diag};
}

RelativePrice survival_probability(const MarketParams& params, const DefaultSchedule& s, double x,
                                   double t, const PricerOptions& options)
{
  return survival_impl(params, s, x, t, options);
}

PriceReport price_relative(const MarketParams& params, const DefaultSchedule& s,
                           const RecoveryModel& recovery, double x, double t,
                           const PricerOptions& options)
{
  validate(recovery);
  PriceReport rep;
  rep.x = x;
  rep.interval_index = locate_interval(s, t);
  const double discount = std::exp(-params.r * (s.maturity() - t));
  if (recovery.mode == RecoveryMode::exogenous)
  {
    const RelativePrice w = survival_impl(params, s, x, t, options);
    const double R = recovery.rate;
    rep.survival_prob = w.value;
    rep.relative_price = R + (1.0 - R) * w.value;
    rep.price = R * discount + (1.0 - R) * w.value * discount;
    rep.diagnostics = w.diagnostics;
    rep.diagnostics.cdf_error *= (1.0 - R);
  }
  else
  {
    const RelativePrice u = relative_price_endogenous(params, s, recovery, x, t, options);
    rep.relative_price = u.value;
    rep.price = discount * u.value;
    rep.diagnostics = u.diagnostics;
  }
  rep.credit_spread =
      std::max(0.0, -std::log(rep.relative_price) / (s.maturity() - t));
  return rep;
}

PriceReport price_endogenous(const MarketParams& params, const DefaultSchedule& s,
                             const RecoveryModel& recovery, double V, double t,
                             const PricerOptions& options)
{
  if (recovery.mode != RecoveryMode::endogenous)
    throw DomainError("price_endogenous needs endogenous recovery");
  validate(s);
  return price_relative(params, s, recovery, relative_spot(params, s, V, t), t, options);
}

PriceReport price_exogenous(const MarketParams& params, const DefaultSchedule& s,
                            const RecoveryModel& recovery, double V, double t,
                            const PricerOptions& options)
{
  if (recovery.mode != RecoveryMode::exogenous)
    throw DomainError("price_exogenous needs exogenous recovery");
  validate(s);
  return price_relative(params, s, recovery, relative_spot(params, s, V, t), t, options);
}

double credit_spread(const MarketParams& params, const DefaultSchedule& s,
                     const RecoveryModel& recovery, double V, double t,
                     const PricerOptions& options)
{
  validate(s);
  if (!(t < s.maturity()))
    throw DomainError("credit spread is undefined at maturity");
  return price_relative(params, s, recovery, relative_spot(params, s, V, t), t, options)
      .credit_spread;
}

} // namespace dbond
