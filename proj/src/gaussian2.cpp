#include "cfmac/gaussian2.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "cfmac/errors.hpp"
#include "cfmac/io.hpp"

namespace cfmac {

namespace {

constexpr double kLog2e = 1.4426950408889634;

double half_log2(double x) { return 0.5 * std::log2(x); }

// Information terms that depend only on the correlation parameters.
struct Terms {
  double i1, j1, i2, j2, s1, s2, mi;
};

Terms terms(double g1, double g2, double rho0, double rho1, double rho2) {
  const double gbar = std::sqrt(g1 * g2);
  const double r00 = 1.0 - rho0 * rho0;
  const double num = 1.0 + rho1 * rho1 * g1 + rho2 * rho2 * g2 + 2.0 * rho0 * rho1 * rho2 * gbar;
  const double d1 = 1.0 + r00 * rho1 * rho1 * g1;
  const double d2 = 1.0 + r00 * rho2 * rho2 * g2;
  Terms t;
  t.i1 = half_log2(num / d2);
  t.j1 = half_log2(d1);
  t.i2 = half_log2(num / d1);
  t.j2 = half_log2(d2);
  t.s1 = half_log2(num);
  t.s2 = half_log2(1.0 + g1 + g2 +
                   2.0 * (rho0 * rho1 * rho2 + std::sqrt((1.0 - rho1 * rho1) * (1.0 - rho2 * rho2))) * gbar);
  t.mi = gaussian_conditional_mi(rho0, rho1, rho2);
  return t;
}

CornerRates corners_from(const Terms& t, double c_out, double c1d, double c2d) {
  const double zeta = c1d + c2d - t.mi;
  const double c10 = c_out - c2d, c20 = c_out - c1d;
  CornerRates c;
  const double a1 = t.i1 - c1d, b1 = t.j1 - zeta;
  const double a2 = t.i2 - c2d, b2 = t.j2 - zeta;
  c.r1_branch = b1 > a1 ? 1 : 0;
  c.r2_branch = b2 > a2 ? 1 : 0;
  c.r1_max = std::max(a1, b1) + c10;
  c.r2_max = std::max(a2, b2) + c20;
  c.sum1 = t.s1 - zeta + c10 + c20;
  c.sum2 = t.s2 - zeta;
  return c;
}

void check_gammas(double g1, double g2, double c_out, double alpha) {
  if (!(g1 >= 0.0) || !(g2 >= 0.0)) throw ConfigError("SNRs must be nonnegative");
  if (!(c_out >= 0.0) || !std::isfinite(c_out)) throw ConfigError("c_out must be a nonnegative finite number");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0,1]");
}

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

// Unit-cube search: full grid, then one pass on a finer grid spanning one
// coarse step around the incumbent.
template <std::size_t D, class F>
std::array<double, D> cube_search(F f, int grid, double& best, long& evals) {
  std::array<double, D> arg{};
  best = -std::numeric_limits<double>::infinity();
  auto visit = [&](const std::array<double, D>& lo, const std::array<double, D>& hi, int pts) {
    std::array<int, D> idx{};
    const std::array<double, D> c_lo = lo, c_hi = hi;
    while (true) {
      std::array<double, D> x;
      for (std::size_t d = 0; d < D; ++d)
        x[d] = pts == 1 ? c_lo[d] : c_lo[d] + (c_hi[d] - c_lo[d]) * idx[d] / (pts - 1);
      double v = f(x);
      ++evals;
      if (v > best) {
        best = v;
        arg = x;
      }
      std::size_t d = D;
      while (d > 0) {
        --d;
        if (++idx[d] < pts) break;
        idx[d] = 0;
        if (d == 0) return;
      }
    }
  };
  std::array<double, D> lo, hi;
  lo.fill(0.0);
  hi.fill(1.0);
  visit(lo, hi, grid);
  const double step = 1.0 / (grid - 1);
  const std::array<double, D> centre = arg;
  for (std::size_t d = 0; d < D; ++d) {
    lo[d] = std::max(0.0, centre[d] - step);
    hi[d] = std::min(1.0, centre[d] + step);
  }
  visit(lo, hi, D >= 4 ? 17 : 65);
  return arg;
}

}  // namespace

double gaussian_conditional_mi(double rho0, double rho1, double rho2) {
  // Covariance of (X_1/sqrt(P_1), X_2/sqrt(P_2)) given U_0.
  const double s11 = rho1 * rho1, s22 = rho2 * rho2, s12 = rho0 * rho1 * rho2;
  if (s11 <= 0.0 || s22 <= 0.0) return 0.0;
  const double schur = s22 - s12 * s12 / s11;  // Var(X_2 | X_1, U_0)
  if (schur <= 0.0) return std::numeric_limits<double>::infinity();
  return half_log2(s22 / schur);
}

double Gaussian2Point::rho0_cap() const { return std::sqrt(1.0 - std::exp2(-2.0 * (c1d + c2d))); }

double Gaussian2Point::zeta() const { return c1d + c2d - gaussian_conditional_mi(rho0, rho1, rho2); }

CornerRates region_corner_rates(const Gaussian2Point& pt) {
  check_gammas(pt.gamma1, pt.gamma2, pt.c_out, 0.5);
  if (!in_unit(pt.rho0) || !in_unit(pt.rho1) || !in_unit(pt.rho2)) throw ConfigError("correlations must lie in [0,1]");
  if (!(pt.c1d >= 0.0 && pt.c1d <= pt.c_out + 1e-12) || !(pt.c2d >= 0.0 && pt.c2d <= pt.c_out + 1e-12))
    throw ConfigError("C_1d and C_2d must lie in [0, c_out]");
  if (pt.rho0 > pt.rho0_cap() + 1e-12) throw ConfigError("rho0 exceeds sqrt(1 - 2^(-2(C_1d + C_2d)))");
  return corners_from(terms(pt.gamma1, pt.gamma2, pt.rho0, pt.rho1, pt.rho2), pt.c_out, pt.c1d, pt.c2d);
}

double pentagon_weighted_max(double a, double b, double s, double alpha) {
  if (a < 0.0 || b < 0.0 || s < 0.0) return -std::numeric_limits<double>::infinity();
  // Fill the heavier-weighted coordinate first.
  if (alpha >= 0.5) {
    const double r1 = std::min(a, s);
    return alpha * r1 + (1.0 - alpha) * std::min(b, s - r1);
  }
  const double r2 = std::min(b, s);
  return alpha * std::min(a, s - r2) + (1.0 - alpha) * r2;
}

double c_alpha_zero(double gamma1, double gamma2, double alpha) {
  check_gammas(gamma1, gamma2, 0.0, alpha);
  if (alpha > 0.5) return c_alpha_zero(gamma2, gamma1, 1.0 - alpha);
  return alpha / 2.0 * std::log2(1.0 + gamma1 + gamma2) + (1.0 - 2.0 * alpha) / 2.0 * std::log2(1.0 + gamma2);
}

WeightedOptimum optimize_weighted(double gamma1, double gamma2, double c_out, double alpha, int grid) {
  check_gammas(gamma1, gamma2, c_out, alpha);
  if (grid < 50) throw ConfigError("grid resolution must be at least 50 per parameter");
  const double rho0_max = std::sqrt(1.0 - std::exp2(-4.0 * c_out));
  WeightedOptimum out;

  // Cache the log terms for the current (rho0, rho1, rho2) so the split
  // coordinate (innermost) costs only arithmetic.
  std::array<double, 3> cached{-1.0, -1.0, -1.0};
  Terms t{};
  auto split = [&](const Terms& tt, double s) {
    const double d = tt.mi;  // C_1d + C_2d at zeta = 0
    const double lo = std::max(0.0, d - c_out), hi = std::min(d, c_out);
    const double c1d = lo + s * (hi - lo);
    return std::make_pair(c1d, std::max(0.0, d - c1d));
  };
  auto f = [&](const std::array<double, 4>& x) {
    if (x[0] != cached[0] || x[1] != cached[1] || x[2] != cached[2]) {
      cached = {x[0], x[1], x[2]};
      t = terms(gamma1, gamma2, x[0] * rho0_max, x[1], x[2]);
    }
    auto [c1d, c2d] = split(t, x[3]);
    auto c = corners_from(t, c_out, c1d, c2d);
    return pentagon_weighted_max(c.r1_max, c.r2_max, std::min(c.sum1, c.sum2), alpha);
  };
  auto x = cube_search<4>(f, grid, out.value, out.evaluations);
  const Terms bt = terms(gamma1, gamma2, x[0] * rho0_max, x[1], x[2]);
  auto [c1d, c2d] = split(bt, x[3]);
  out.point = Gaussian2Point{gamma1, gamma2, c_out, x[0] * rho0_max, x[1], x[2], c1d, c2d};
  out.corners = corners_from(bt, c_out, c1d, c2d);
  return out;
}

WeightedOptimum optimize_forwarding(double gamma1, double gamma2, double c_out, double alpha, int grid) {
  check_gammas(gamma1, gamma2, c_out, alpha);
  if (grid < 50) throw ConfigError("grid resolution must be at least 50 per parameter");
  WeightedOptimum out;
  auto f = [&](const std::array<double, 2>& x) {
    auto c = corners_from(terms(gamma1, gamma2, 0.0, x[0], x[1]), c_out, 0.0, 0.0);
    return pentagon_weighted_max(c.r1_max, c.r2_max, std::min(c.sum1, c.sum2), alpha);
  };
  auto x = cube_search<2>(f, grid, out.value, out.evaluations);
  out.point = Gaussian2Point{gamma1, gamma2, c_out, 0.0, x[0], x[1], 0.0, 0.0};
  out.corners = corners_from(terms(gamma1, gamma2, 0.0, x[0], x[1]), c_out, 0.0, 0.0);
  return out;
}

AlphaBound sqrt_lower_bound(double alpha, double c_out, double gamma1, double gamma2) {
  check_gammas(gamma1, gamma2, c_out, alpha);
  AlphaBound b{alpha, c_out};
  b.sqrt_coefficient = 2.0 * std::sqrt(gamma1 * gamma2 * kLog2e) / (1.0 + gamma1 + gamma2) * std::min(alpha, 1.0 - alpha);
  // For alpha > 1/2 the roles of the encoders swap.
  const bool swap = alpha > 0.5;
  const double ga = swap ? gamma2 : gamma1, gb = swap ? gamma1 : gamma2;
  const double rho0 = std::sqrt(1.0 - std::exp2(-4.0 * c_out));
  const double r00 = 1.0 - rho0 * rho0;
  const double ra = half_log2((1.0 + ga + gb + 2.0 * rho0 * std::sqrt(ga * gb)) / (1.0 + r00 * gb)) - c_out;
  const double rb = half_log2(1.0 + r00 * gb);
  b.r1_star = swap ? rb : ra;
  b.r2_star = swap ? ra : rb;
  b.lower_bound = alpha * b.r1_star + (1.0 - alpha) * b.r2_star - c_alpha_zero(gamma1, gamma2, alpha);
  return b;
}

std::vector<GaussianGainRow> gaussian_gain_rows(const std::vector<double>& c_out_grid, double gamma1, double gamma2, int grid) {
  const double c0 = 2.0 * c_alpha_zero(gamma1, gamma2, 0.5);
  const double coef = 2.0 * sqrt_lower_bound(0.5, 0.0, gamma1, gamma2).sqrt_coefficient;
  std::vector<GaussianGainRow> rows;
  for (double c : c_out_grid) {
    if (!(c >= 0.0 && c <= 1.0)) throw ConfigError("figure grid must lie in [0,1]");
    GaussianGainRow r{c};
    r.full_gain = 2.0 * optimize_weighted(gamma1, gamma2, c, 0.5, grid).value - c0;
    r.forwarding_gain = 2.0 * optimize_forwarding(gamma1, gamma2, c, 0.5, grid).value - c0;
    r.sqrt_term = coef * std::sqrt(c);
    rows.push_back(r);
  }
  return rows;
}

std::string gaussian_gain_csv(const std::vector<GaussianGainRow>& rows) {
  CsvTable t({"c_out", "full_gain_bits", "forwarding_gain_bits", "sqrt_term_bits"});
  for (const auto& r : rows)
    t.add_row({fmt_double(r.c_out), fmt_double(r.full_gain), fmt_double(r.forwarding_gain), fmt_double(r.sqrt_term)});
  return t.str();
}

}  // namespace cfmac
