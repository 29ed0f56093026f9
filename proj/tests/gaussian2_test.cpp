#include "cfmac/gaussian2.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "cfmac/errors.hpp"

namespace cfmac {
namespace {

const double kLog2e = 1.0 / std::log(2.0);

TEST(Corners, NoCooperationIsClassicalMac) {
  Gaussian2Point pt{3.0, 5.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0};
  auto c = region_corner_rates(pt);
  EXPECT_NEAR(c.sum2, 0.5 * std::log2(9.0), 1e-12);
  EXPECT_NEAR(c.sum1, 0.5 * std::log2(9.0), 1e-12);
  EXPECT_NEAR(c.r1_max, 0.5 * std::log2(4.0), 1e-12);
  EXPECT_NEAR(c.r2_max, 0.5 * std::log2(6.0), 1e-12);
}

TEST(Corners, SingleUserTermsAtZeroCorrelation) {
  for (double r : {0.3, 0.7, 1.0}) {
    Gaussian2Point pt{4.0, 9.0, 0.0, 0.0, r, r, 0.0, 0.0};
    auto c = region_corner_rates(pt);
    EXPECT_NEAR(c.r1_max, 0.5 * std::log2(1 + r * r * 4.0), 1e-12);
    EXPECT_NEAR(c.r2_max, 0.5 * std::log2(1 + r * r * 9.0), 1e-12);
    EXPECT_EQ(c.r1_branch, 1);
  }
}

TEST(Corners, FullCorrelationLimit) {
  // rho0 near 1 needs C_1d + C_2d of about 20 bits.
  Gaussian2Point pt{100.0, 100.0, 10.0, 1.0 - 1e-12, 1.0, 1.0, 10.0, 10.0};
  auto c = region_corner_rates(pt);
  EXPECT_NEAR(c.sum2 + pt.zeta(), 0.5 * std::log2(401.0), 1e-9);
}

TEST(Corners, CommonPartOnly) {
  Gaussian2Point pt{100.0, 100.0, 0.5, 0.4, 0.0, 0.0, 0.1, 0.2};
  auto c = region_corner_rates(pt);
  EXPECT_NEAR(pt.zeta(), 0.3, 1e-15);
  EXPECT_NEAR(c.sum2, 0.5 * std::log2(1 + 200 + 200) - 0.3, 1e-12);
}

TEST(Corners, ConditionalMiClosedForm) {
  for (double r0 : {0.0, 0.2, 0.9})
    EXPECT_NEAR(gaussian_conditional_mi(r0, 0.6, 0.8), -0.5 * std::log2(1 - r0 * r0), 1e-12);
  EXPECT_EQ(gaussian_conditional_mi(0.9, 0.0, 0.8), 0.0);
  // rho0 at its cap gives zeta = 0.
  Gaussian2Point pt{1.0, 1.0, 0.3, 0.0, 0.5, 0.5, 0.1, 0.25};
  pt.rho0 = pt.rho0_cap();
  EXPECT_NEAR(pt.zeta(), 0.0, 1e-12);
}

TEST(Corners, Rejections) {
  Gaussian2Point pt{1.0, 1.0, 0.1, 0.5, 1.0, 1.0, 0.05, 0.05};
  EXPECT_THROW(region_corner_rates(pt), ConfigError);  // cap is about 0.36
  pt.rho0 = 0.1;
  pt.c1d = 0.2;
  EXPECT_THROW(region_corner_rates(pt), ConfigError);
  pt.c1d = 0.05;
  pt.rho1 = 1.5;
  EXPECT_THROW(region_corner_rates(pt), ConfigError);
}

TEST(Pentagon, ClosedFormAgainstVertices) {
  for (double alpha : {0.0, 0.2, 0.5, 0.8, 1.0}) {
    for (auto [a, b, s] : std::vector<std::array<double, 3>>{{1, 2, 2.5}, {1, 2, 5}, {3, 1, 0.5}, {0, 0, 0}}) {
      double sc = std::min(s, a + b);
      double best = 0;
      // Vertices of the pentagon.
      for (auto [x, y] : std::vector<std::pair<double, double>>{
               {0, 0}, {std::min(a, sc), 0}, {0, std::min(b, sc)}, {std::min(a, sc), sc - std::min(a, sc)},
               {sc - std::min(b, sc), std::min(b, sc)}})
        best = std::max(best, alpha * x + (1 - alpha) * y);
      EXPECT_NEAR(pentagon_weighted_max(a, b, s, alpha), best, 1e-15);
    }
  }
  EXPECT_TRUE(std::isinf(pentagon_weighted_max(-1, 1, 1, 0.5)));
}

TEST(Optimize, ZeroCooperationMatchesClosedForm) {
  for (double alpha : {0.2, 0.5, 0.7}) {
    auto r = optimize_weighted(100.0, 100.0, 0.0, alpha);
    EXPECT_NEAR(r.value, c_alpha_zero(100.0, 100.0, alpha), 1e-12) << alpha;
  }
  EXPECT_NEAR(c_alpha_zero(100.0, 100.0, 0.5), 0.25 * std::log2(201.0), 1e-12);
  EXPECT_NEAR(c_alpha_zero(100.0, 100.0, 0.5), 1.91276, 1e-5);
  EXPECT_NEAR(c_alpha_zero(3.0, 8.0, 0.3), 0.15 * std::log2(12.0) + 0.2 * std::log2(9.0), 1e-12);
  EXPECT_NEAR(c_alpha_zero(3.0, 8.0, 0.7), c_alpha_zero(8.0, 3.0, 0.3), 1e-12);
}

TEST(Optimize, NondecreasingInCout) {
  double prev = -1;
  for (double c : {0.0, 1e-4, 1e-3, 3e-3, 1e-2, 3e-2}) {
    double v = optimize_weighted(100.0, 100.0, c, 0.5).value;
    EXPECT_GE(v, prev - 1e-12) << c;
    prev = v;
  }
}

TEST(Optimize, SqrtGainAtSmallCout) {
  const double coef = 2 * std::sqrt(1e4 * kLog2e) / 201;
  EXPECT_NEAR(coef, 1.195, 1e-3);
  for (double c : {1e-4, 1e-3, 1e-2}) {
    double gain = 2 * (optimize_weighted(100.0, 100.0, c, 0.5).value - c_alpha_zero(100, 100, 0.5));
    EXPECT_GE(gain, 1.19 * std::sqrt(c) * 0.9) << c;
    // The optimum also dominates the explicit construction.
    EXPECT_GE(gain, 2 * sqrt_lower_bound(0.5, c, 100, 100).lower_bound - 1e-12);
  }
}

TEST(Optimize, ReportedPointAttainsValue) {
  auto r = optimize_weighted(10.0, 30.0, 0.05, 0.3);
  auto c = region_corner_rates(r.point);
  EXPECT_NEAR(pentagon_weighted_max(c.r1_max, c.r2_max, std::min(c.sum1, c.sum2), 0.3), r.value, 1e-12);
  EXPECT_NEAR(r.point.zeta(), 0.0, 1e-12);
  EXPECT_THROW(optimize_weighted(10.0, 30.0, 0.05, 0.3, 10), ConfigError);
}

TEST(Forwarding, AtMostLinearGain) {
  double c0 = 2 * c_alpha_zero(100, 100, 0.5);
  for (double c : {0.0, 1e-4, 1e-3, 1e-2, 0.1}) {
    double g = 2 * optimize_forwarding(100, 100, c, 0.5).value - c0;
    EXPECT_LE(g, 2 * c + 1e-9);
    EXPECT_GE(g, -1e-12);
  }
}

TEST(SqrtBound, Coefficient) {
  auto b = sqrt_lower_bound(0.5, 0.0, 100, 100);
  EXPECT_NEAR(b.sqrt_coefficient, 2 * 120.112 / 201 * 0.5, 1e-4);
  EXPECT_NEAR(b.sqrt_coefficient, 0.5976, 1e-4);
  EXPECT_NEAR(b.lower_bound, 0.0, 1e-12);
  EXPECT_NEAR(sqrt_lower_bound(0.3, 0.0, 100, 100).sqrt_coefficient,
              2 * std::sqrt(1e4 * kLog2e) / 201 * 0.3, 1e-12);
}

TEST(SqrtBound, LimitAndFiniteBound) {
  for (double alpha : {0.5, 0.25, 0.8}) {
    auto b = sqrt_lower_bound(alpha, 1e-6, 100, 100);
    EXPECT_NEAR(b.lower_bound / std::sqrt(1e-6), b.sqrt_coefficient, 0.05 * b.sqrt_coefficient) << alpha;
  }
  // At alpha = 1/2 the deficit is exactly C_out, so the margin 0.05 sqrt(C_out)
  // holds up to 1e-3. Away from 1/2 the rho0^2 term adds about 1.2 C_out more,
  // and the same margin needs C_out <= 1e-4.
  for (double c : {1e-5, 1e-4, 1e-3}) {
    auto bc = sqrt_lower_bound(0.5, c, 100, 100);
    EXPECT_GE(bc.lower_bound, (bc.sqrt_coefficient - 0.05) * std::sqrt(c));
  }
  for (double alpha : {0.25, 0.8})
    for (double c : {1e-5, 1e-4}) {
      auto bc = sqrt_lower_bound(alpha, c, 100, 100);
      EXPECT_GE(bc.lower_bound, (bc.sqrt_coefficient - 0.05) * std::sqrt(c));
    }
}

TEST(SqrtBound, RatePairInRegion) {
  const double c = 1e-3;
  auto b = sqrt_lower_bound(0.5, c, 100, 50);
  Gaussian2Point pt{100, 50, c, std::sqrt(1 - std::exp2(-4 * c)), 1, 1, c, c};
  auto r = region_corner_rates(pt);
  EXPECT_LE(b.r1_star, r.r1_max + 1e-12);
  EXPECT_LE(b.r2_star, r.r2_max + 1e-12);
  EXPECT_LE(b.r1_star + b.r2_star, std::min(r.sum1, r.sum2) + 1e-12);
}

TEST(GainRows, FullVersusForwarding) {
  auto rows = gaussian_gain_rows({0.0, 1e-4, 1e-3, 1e-2});
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_NEAR(rows[0].full_gain, 0.0, 1e-12);
  EXPECT_NEAR(rows[0].forwarding_gain, 0.0, 1e-12);
  EXPECT_EQ(rows[0].sqrt_term, 0.0);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_GT(rows[i].full_gain, rows[i].forwarding_gain);
    EXPECT_LE(rows[i].forwarding_gain, 2 * rows[i].c_out + 1e-9);
    EXPECT_GE(rows[i].full_gain, rows[i].full_gain > 0 ? 0.9 * 1.19 * std::sqrt(rows[i].c_out) : 1.0);
  }
  auto csv = gaussian_gain_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "c_out,full_gain_bits,forwarding_gain_bits,sqrt_term_bits");
  EXPECT_THROW(gaussian_gain_rows({2.0}), ConfigError);
}

}  // namespace
}  // namespace cfmac
