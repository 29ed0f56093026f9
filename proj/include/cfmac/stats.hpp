#ifndef CFMAC_STATS_HPP_
#define CFMAC_STATS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>

namespace cfmac {

// Wilson score interval for a binomial proportion.
inline std::pair<double, double> wilson_interval(std::int64_t successes, std::int64_t trials, double z = 1.96) {
  if (trials <= 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = successes / n;
  const double denom = 1.0 + z * z / n;
  const double centre = (p + z * z / (2 * n)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom;
  // The bounds are exactly 0 and 1 at the extremes; avoid roundoff there.
  const double lo = successes == 0 ? 0.0 : std::max(0.0, centre - half);
  const double hi = successes == trials ? 1.0 : std::min(1.0, centre + half);
  return {lo, hi};
}

}  // namespace cfmac

#endif  // CFMAC_STATS_HPP_
