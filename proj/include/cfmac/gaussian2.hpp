#ifndef CFMAC_GAUSSIAN2_HPP_
#define CFMAC_GAUSSIAN2_HPP_

#include <string>
#include <vector>

namespace cfmac {

// Jointly Gaussian scheme for the 2-user Gaussian MAC with C_in large and both
// CF output links of capacity c_out. Encoder i sends
// X_i / sqrt(P_i) = rho_i X'_i + sqrt(1 - rho_i^2) U_0 with corr(X'_1, X'_2) = rho_0.
struct Gaussian2Point {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double c_out = 0.0;
  double rho0 = 0.0;
  double rho1 = 1.0;
  double rho2 = 1.0;
  double c1d = 0.0;
  double c2d = 0.0;

  double c10() const { return c_out - c2d; }
  double c20() const { return c_out - c1d; }
  double rho0_cap() const;
  double zeta() const;
};

// I(X_1;X_2|U_0) in bits, from the conditional covariance given U_0.
double gaussian_conditional_mi(double rho0, double rho1, double rho2);

struct CornerRates {
  double r1_max = 0.0;
  double r2_max = 0.0;
  double sum1 = 0.0;  // I(X_1X_2;Y|U_0) - zeta + C_10 + C_20
  double sum2 = 0.0;  // I(X_1X_2;Y) - zeta
  int r1_branch = 0;  // 0: I(X_1;Y|U_0) - C_1d wins the inner max, 1: I(X_1;Y|X_2,U_0) - zeta
  int r2_branch = 0;
};

// Throws ConfigError on out-of-range parameters, including rho0 above its cap.
CornerRates region_corner_rates(const Gaussian2Point& pt);

// max alpha R1 + (1-alpha) R2 over {R >= 0, R1 <= a, R2 <= b, R1 + R2 <= s};
// -inf when the set is empty.
double pentagon_weighted_max(double a, double b, double s, double alpha);

struct WeightedOptimum {
  Gaussian2Point point;
  CornerRates corners;
  double value = 0.0;
  long evaluations = 0;
};

// C_alpha(0) = alpha/2 log(1+g1+g2) + (1-2 alpha)/2 log(1+g2) for alpha <= 1/2.
double c_alpha_zero(double gamma1, double gamma2, double alpha);

// Grid search over (rho0, rho1, rho2) and the split of C_1d + C_2d, followed by
// one local refinement pass. All constraints are nonincreasing in C_1d and
// C_2d, so C_1d + C_2d is pinned at I(X_1;X_2|U_0), making zeta = 0.
WeightedOptimum optimize_weighted(double gamma1, double gamma2, double c_out, double alpha, int grid = 64);

// Same search restricted to rho0 = 0 and C_1d = C_2d = 0, i.e. forwarding only.
WeightedOptimum optimize_forwarding(double gamma1, double gamma2, double c_out, double alpha, int grid = 64);

struct AlphaBound {
  double alpha = 0.0;
  double c_out = 0.0;
  double lower_bound = 0.0;
  double sqrt_coefficient = 0.0;
  double r1_star = 0.0;
  double r2_star = 0.0;
};

AlphaBound sqrt_lower_bound(double alpha, double c_out, double gamma1, double gamma2);

struct GaussianGainRow {
  double c_out = 0.0;
  double full_gain = 0.0;
  double forwarding_gain = 0.0;
  double sqrt_term = 0.0;
};

std::vector<GaussianGainRow> gaussian_gain_rows(const std::vector<double>& c_out_grid, double gamma1 = 100.0,
                                     double gamma2 = 100.0, int grid = 64);
std::string gaussian_gain_csv(const std::vector<GaussianGainRow>& rows);

}  // namespace cfmac

#endif  // CFMAC_GAUSSIAN2_HPP_
