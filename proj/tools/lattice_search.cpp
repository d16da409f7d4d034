// Regenerates the Korobov multiplier table embedded in src/lattice_table.inc.
//
// For every lattice size (largest prime below 2^k, k = 10..20) and QMC
// dimension d = 1..15 it picks, among a deterministic set of candidates, the
// multiplier minimizing the unweighted P_2 criterion of the tent-transformed
// rank-1 rule. Usage: lattice_search > src/lattice_table.inc

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <vector>

namespace
{

bool is_prime(std::int64_t n)
{
  if (n < 2)
    return false;
  for (std::int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0)
      return false;
  return true;
}

std::int64_t prime_below(std::int64_t n)
{
  while (!is_prime(n))
    --n;
  return n;
}

double p2_criterion(std::int64_t n, int dim, std::int64_t a, const std::vector<double>& factor)
{
  std::vector<std::int64_t> z(dim);
  std::int64_t g = 1;
  for (int j = 0; j < dim; ++j)
  {
    z[j] = g;
    g = (g * a) % n;
  }
  double total = 0.0;
  for (std::int64_t k = 0; k < n; ++k)
  {
    double prod = 1.0;
    for (int j = 0; j < dim; ++j)
      prod *= factor[(k * z[j]) % n];
    total += prod;
  }
  return total / static_cast<double>(n) - 1.0;
}

} // namespace

int main()
{
  constexpr int min_log = 10, max_log = 20, max_dim = 15, candidates = 64;
  std::printf("// Generated by tools/lattice_search.cpp. Rows: lattice size index, columns: dim 1..%d.\n",
              max_dim);
  std::printf("static constexpr std::int64_t lattice_sizes[] = {");
  for (int k = min_log; k <= max_log; ++k)
    std::printf("%lld%s", static_cast<long long>(prime_below(std::int64_t{1} << k)),
                k < max_log ? ", " : "};\n");
  std::printf("static constexpr std::int64_t lattice_multipliers[][%d] = {\n", max_dim);
  for (int k = min_log; k <= max_log; ++k)
  {
    const std::int64_t n = prime_below(std::int64_t{1} << k);
    std::vector<double> factor(n);
    for (std::int64_t i = 0; i < n; ++i)
    {
      const double x = static_cast<double>(i) / static_cast<double>(n);
      factor[i] = 1.0 + 2.0 * std::numbers::pi * std::numbers::pi * (x * x - x + 1.0 / 6.0);
    }
    std::printf("  {");
    for (int d = 1; d <= max_dim; ++d)
    {
      std::int64_t best = 1;
      if (d > 1)
      {
        double best_value = INFINITY;
        // golden-ratio spaced candidates over [2, n/2)
        for (int c = 0; c < candidates; ++c)
        {
          const double frac = std::fmod(0.5 + c * 0.6180339887498949, 1.0);
          const std::int64_t a = 2 + static_cast<std::int64_t>(frac * static_cast<double>(n / 2 - 2));
          const double v = p2_criterion(n, d, a, factor);
          if (v < best_value)
          {
            best_value = v;
            best = a;
          }
        }
      }
      std::printf("%lld%s", static_cast<long long>(best), d < max_dim ? ", " : "");
    }
    std::printf("},\n");
    std::fflush(stdout);
  }
  std::printf("};\n");
}
