#include "cfmac/gain.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "cfmac/errors.hpp"
#include "cfmac/info.hpp"
#include "test_util.hpp"

namespace cfmac {
namespace {

using testing::naive_entropy;
using testing::random_pmf;
using testing::random_simplex;

JointPmf random_product(const std::vector<int>& sizes, Rng& rng, double floor) {
  std::vector<std::vector<double>> m;
  for (int s : sizes) m.push_back(random_simplex(s, rng, floor));
  return JointPmf::product(m);
}

// Five-point central difference.
template <class F>
double fd(F f, double x, double step = 1e-5) {
  return (-f(x + 2 * step) + 8 * f(x + step) - 8 * f(x - step) + f(x - 2 * step)) / (12 * step);
}

// I(X;Y) for input pmf p, written with plain loops.
double naive_io_mi(const DiscreteMac& mac, const std::vector<double>& p) {
  std::vector<double> q(mac.output_size, 0.0);
  for (std::size_t x = 0; x < p.size(); ++x)
    for (int y = 0; y < mac.output_size; ++y) q[y] += p[x] * mac.transition[x * mac.output_size + y];
  double i = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x)
    for (int y = 0; y < mac.output_size; ++y) {
      double w = mac.transition[x * mac.output_size + y];
      if (p[x] > 0 && w > 0) i += p[x] * w * std::log2(w / q[y]);
    }
  return i;
}

std::vector<double> lerp(const JointPmf& a, const JointPmf& b, double l) {
  std::vector<double> m(a.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = (1 - l) * a[i] + l * b[i];
  return m;
}

JointPmf bemac_dep() {
  return JointPmf({2, 2}, {1.0 / 3, 1.0 / 6, 1.0 / 6, 1.0 / 3});
}

TEST(Witness, BemacSpecifiedPair) {
  auto mac = make_binary_erasure_mac();
  auto w = evaluate_witness(mac, JointPmf::uniform({2, 2}), bemac_dep());
  EXPECT_NEAR(w.i_ind, 1.5, 1e-12);
  EXPECT_NEAR(w.i_dep, std::log2(3.0), 1e-12);
  // p_dep(y) = (1/3,1/3,1/3) against (1/4,1/2,1/4).
  double d = (2 * std::log2((1.0 / 3) / 0.25) + std::log2((1.0 / 3) / 0.5)) / 3;
  EXPECT_NEAR(w.d_out, d, 1e-12);
  EXPECT_NEAR(w.d_out, 0.08170, 1e-5);
  EXPECT_NEAR(w.margin, 1.0 / 6, 1e-4);
}

TEST(Witness, SupportViolationRejected) {
  auto mac = make_binary_erasure_mac();
  EXPECT_THROW(evaluate_witness(mac, JointPmf::point({2, 2}, {0, 0}), bemac_dep()), PreconditionError);
}

TEST(Witness, BemacSearchFindsMargin) {
  auto w = cstar_test(make_binary_erasure_mac());
  ASSERT_TRUE(w.has_value());
  EXPECT_NEAR(w->i_ind, 1.5, 1e-6);
  EXPECT_TRUE(w->p_ind.is_product(1e-9));
  EXPECT_TRUE(w->p_dep.support_within(w->p_ind));
  EXPECT_GE(w->margin, 1.0 / 6);
}

TEST(Witness, SingleUserHasNone) {
  DiscreteMac mac = make_identity_channel(3);
  EXPECT_FALSE(cstar_test(mac).has_value());
}

TEST(Witness, ChannelIgnoringSecondInputHasNone) {
  Rng rng(11);
  auto one = make_random_mac({3}, 3, rng);
  DiscreteMac mac{2, {3, 2}, 3, {}};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 2; ++b) mac.transition.insert(mac.transition.end(), one.row(a), one.row(a) + 3);
  auto w = cstar_test(mac);
  EXPECT_FALSE(w.has_value());
  // Independent grid check: no dependent pmf on a 1/12 lattice beats the product optimum.
  auto prod = max_product_mi(mac);
  const double i_ind = prod.value;
  const JointPmf q_ind = output_pmf(mac, prod.input);
  double best = -1.0;
  for (const auto& p : simplex_lattice(6, 12)) {
    JointPmf pd({3, 2}, p);
    double m = naive_io_mi(mac, p) + kl_divergence(output_pmf(mac, pd), q_ind);
    best = std::max(best, m - i_ind);
    if (best > 1e-6) break;
  }
  EXPECT_LE(best, 1e-6);
}

TEST(Witness, GaussianMembership) {
  EXPECT_TRUE(gaussian_cstar({1.0, 1.0}));
  EXPECT_FALSE(gaussian_cstar({1.0, 0.0}));
  EXPECT_FALSE(gaussian_cstar({0.0, 0.0, 0.0}));
  EXPECT_TRUE(gaussian_cstar({0.0, 2.0, 3.0}));
  EXPECT_THROW(gaussian_cstar({-1.0, 1.0}), ConfigError);
}

TEST(Derivatives, EntropyMatchesFiniteDifference) {
  Rng rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<int> sizes{2 + rep % 3, 3, 2};
    auto a = random_pmf(sizes, rng, 0.05);
    auto b = random_pmf(sizes, rng, 0.05);
    Mask axes = 1 + rep % 7;
    double l = 0.1 + 0.8 * uniform01(rng);
    auto h = [&](double t) { return naive_entropy(JointPmf(sizes, lerp(a, b, t)).marginal(axes).mass()); };
    double want = fd(h, l);
    EXPECT_NEAR(mixture_entropy_derivative(a, b, l, axes), want, 1e-6 * std::abs(want) + 1e-12);
  }
}

TEST(Derivatives, EntropyEdgeCases) {
  Rng rng(6);
  auto a = random_pmf({3, 2}, rng, 0.1);
  auto b = random_pmf({3, 2}, rng, 0.1);
  EXPECT_EQ(mixture_entropy_derivative(a, a, 0.3, 3), 0.0);
  EXPECT_NEAR(mixture_entropy_derivative(a, b, 0.5, 3), -mixture_entropy_derivative(b, a, 0.5, 3), 1e-12);
  // At the boundary, p_b puts mass where p_a has none.
  auto pa = JointPmf::point({2}, {0});
  auto pb = JointPmf::uniform({2});
  EXPECT_THROW(mixture_entropy_derivative(pa, pb, 0.0, 1), PreconditionError);
}

TEST(Derivatives, MutualInformationMatchesFiniteDifference) {
  Rng rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<int> sizes{2, 2 + rep % 2};
    auto mac = make_random_mac(sizes, 3 + rep % 2, rng);
    auto a = random_pmf(sizes, rng, 0.05);
    auto b = random_pmf(sizes, rng, 0.05);
    double l = 0.1 + 0.8 * uniform01(rng);
    double want = fd([&](double t) { return naive_io_mi(mac, lerp(a, b, t)); }, l);
    EXPECT_NEAR(mixture_mi_derivative(mac, a, b, l), want, 1e-6 * std::abs(want) + 1e-12);
  }
}

TEST(Derivatives, MutualInformationBemacWitnessPositive) {
  auto mac = make_binary_erasure_mac();
  auto a = JointPmf::uniform({2, 2});
  auto b = bemac_dep();
  double d = mixture_mi_derivative(mac, a, b, 0.0);
  EXPECT_GT(d, 0.0);
  // E_dep D(W_x||q_a) - I_a with divergences 2,1,1,2 bits.
  EXPECT_NEAR(d, (2.0 / 3 * 2 + 1.0 / 3 * 1) - 1.5, 1e-12);
  double want = fd([&](double t) { return naive_io_mi(mac, lerp(a, b, t)); }, 1e-3, 1e-5);
  EXPECT_NEAR(mixture_mi_derivative(mac, a, b, 1e-3), want, 1e-6 * std::abs(want));
  EXPECT_EQ(mixture_mi_derivative(mac, a, a, 0.4), 0.0);
}

TEST(Derivatives, TotalCorrelationVanishesAtZero) {
  Rng rng(8);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<int> sizes{2, 3, 2};
    auto a = random_product(sizes, rng, 0.05);
    auto b = random_pmf(sizes, rng, rep % 2 ? 0.0 : 0.05);
    Mask axes = rep % 2 ? 7 : 3;
    EXPECT_NEAR(mixture_tc_derivative_at_zero(a, b, axes), 0.0, 1e-9);
    // TC(lambda) is O(lambda^2).
    double tc = total_correlation(mix(a, b, 1e-4), axes);
    EXPECT_LT(tc, 1e-6);
  }
}

TEST(Derivatives, TotalCorrelationPreconditions) {
  Rng rng(9);
  auto dep = random_pmf({2, 2}, rng, 0.1);
  auto b = random_pmf({2, 2}, rng, 0.1);
  EXPECT_THROW(mixture_tc_derivative_at_zero(dep, b, 3), PreconditionError);
  auto a = JointPmf::product({{1.0, 0.0}, {0.5, 0.5}});
  EXPECT_THROW(mixture_tc_derivative_at_zero(a, b, 3), PreconditionError);
}

MixtureFamily bemac_family(double eps) {
  auto mac = make_binary_erasure_mac();
  auto w = evaluate_witness(mac, JointPmf::uniform({2, 2}), bemac_dep());
  double r = 1.0 / std::sqrt(2.0);
  return make_mixture_family(mac, w, {1.0, 1.0}, eps, {r, r});
}

TEST(Family, MixWeightSelection) {
  auto fam = bemac_family(0.1);
  // I_a(X_j;Y|X_-j) = 1 and I_a(X;Y) = 1.5, so mu*1.5 < 2 and mu < 1.
  EXPECT_DOUBLE_EQ(fam.mix_weight, 0.99);
  auto mac = make_binary_erasure_mac();
  auto w = evaluate_witness(mac, JointPmf::uniform({2, 2}), bemac_dep());
  double r = 1.0 / std::sqrt(2.0);
  EXPECT_DOUBLE_EQ(make_mixture_family(mac, w, {0.5, 0.5}, 0.1, {r, r}).mix_weight, 0.49);
  EXPECT_THROW(make_mixture_family(mac, w, {1.0, 1.0}, 0.1, {1.0, 1.0}), ConfigError);
  EXPECT_THROW(make_mixture_family(mac, w, {1.0, 1.0}, 0.0, {r, r}), ConfigError);
  EXPECT_THROW(make_mixture_family(mac, w, {0.0, 1.0}, 0.1, {r, r}), PreconditionError);
}

TEST(Family, LambdaStar) {
  auto fam = bemac_family(0.1);
  EXPECT_EQ(solve_lambda_star(fam, 0.0), 0.0);
  double l = solve_lambda_star(fam, 1e-6);
  EXPECT_NEAR(l / 1e-6, 1.0 / fam.epsilon, 0.01 / fam.epsilon);
  double prev = 0.0;
  for (double h : {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 5e-2}) {
    double ls = solve_lambda_star(fam, h);
    EXPECT_LE(std::abs(lambda_residual(fam, h, ls)), 1e-10) << h;
    EXPECT_GE(ls, prev);
    prev = ls;
  }
  double hmax = lambda_h_max(fam);
  EXPECT_GT(hmax, 0.0);
  EXPECT_THROW(solve_lambda_star(fam, 2 * hmax + 1.0), PreconditionError);
}

TEST(Family, ZetaSlope) {
  auto fam = bemac_family(0.1);
  for (double h : {1e-5, 1e-6}) {
    double l = solve_lambda_star(fam, h);
    for (Mask s : {Mask{1}, Mask{2}, Mask{3}}) {
      double sv = (s == 3 ? 2.0 : 1.0) / std::sqrt(2.0);
      EXPECT_NEAR(family_zeta(fam, s, h, l) / h, sv, 0.05 * sv);
    }
  }
}

TEST(Family, JointFollowsConstruction) {
  auto fam = bemac_family(0.1);
  auto mac = make_binary_erasure_mac();
  auto p = family_joint(fam, mac, 0.3);
  CoordLayout L{2};
  EXPECT_NEAR(p.total(), 1.0, 1e-12);
  // U_0 independent of U, X = U when U_0 = 1.
  EXPECT_NEAR(mutual_information(p, 1u << L.u0(), L.u_axes(3)), 0.0, 1e-12);
  auto pu = p.marginal(L.u_axes(3)).mass();
  auto want = mix(fam.p_a, fam.p_b, 0.3).mass();
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(pu[i], want[i], 1e-12);
  EXPECT_NEAR(p.marginal(1u << L.u0()).mass()[1], fam.mix_weight, 1e-12);
  // The X_j given U_0 = 0 are independent of U.
  EXPECT_NEAR(mutual_information(p, L.x_axes(3), L.u_axes(3), 1u << L.u0()),
              fam.mix_weight * entropy(p, L.u_axes(3)), 1e-9);
}

TEST(Gain, ZeroScale) {
  auto fam = bemac_family(0.1);
  auto pt = achievable_sum_rate(fam, make_binary_erasure_mac(), CfConfig{{1, 1}, {0, 0}}, 0.0);
  EXPECT_EQ(pt.g, 0.0);
  EXPECT_EQ(pt.lambda_star, 0.0);
  EXPECT_NEAR(pt.r_sum, 1.5, 1e-12);
  EXPECT_TRUE(std::isnan(pt.slope_ratio));
}

TEST(Gain, SlopeRatioGrowsAsScaleShrinks) {
  auto mac = make_binary_erasure_mac();
  for (double eps : {0.5, 0.1}) {
    auto fam = bemac_family(eps);
    std::vector<double> ratios;
    for (double h : {1e-2, 1e-3, 1e-4, 1e-5}) {
      auto pt = achievable_sum_rate(fam, mac, CfConfig{{1, 1}, {0, 0}}, h);
      EXPECT_GE(pt.r_sum, (1 - fam.mix_weight) * 1.5 - 2 * h * fam.sum_v() - 1e-12);
      ratios.push_back(pt.slope_ratio);
    }
    for (std::size_t i = 1; i < ratios.size(); ++i) EXPECT_GT(ratios[i], ratios[i - 1]) << eps << " " << i;
    EXPECT_GT(ratios.back(), 10 * ratios.front()) << eps;
  }
}

TEST(Gain, RequiresPositiveConditionalInformation) {
  // Y = X_1 only: I_a(X_2;Y|X_1) = 0.
  DiscreteMac mac{2, {2, 2}, 2, {1, 0, 1, 0, 0, 1, 0, 1}};
  double r = 1.0 / std::sqrt(2.0);
  auto w = evaluate_witness(mac, JointPmf::uniform({2, 2}), JointPmf::uniform({2, 2}));
  auto fam = make_mixture_family(mac, w, {1, 1}, 0.1, {r, r});
  EXPECT_THROW(achievable_sum_rate(fam, mac, CfConfig{{1, 1}, {0, 0}}, 1e-3), PreconditionError);
}

DiscreteMac adder3() {
  // Y = X_1 + X_2 + X_3 over binary inputs.
  DiscreteMac mac{3, {2, 2, 2}, 4, {}};
  for (int x = 0; x < 8; ++x) {
    int s = (x >> 2 & 1) + (x >> 1 & 1) + (x & 1);
    for (int y = 0; y < 4; ++y) mac.transition.push_back(y == s ? 1.0 : 0.0);
  }
  return mac;
}

TEST(TwoRound, AdderDemo) {
  auto demo = two_round_conferencing_demo(adder3(), 1.0, 1.0, {0.0, 1e-4, 1e-3});
  ASSERT_TRUE(demo.applicable);
  EXPECT_NEAR(demo.g1, 1.5, 1e-6);
  ASSERT_EQ(demo.rows.size(), 3u);
  for (const auto& r : demo.rows) EXPECT_EQ(r.g1, demo.g1);
  EXPECT_EQ(demo.rows[0].g2_lower, demo.g1);
  EXPECT_GT(demo.rows[1].g2_lower, demo.g1);
  EXPECT_GT(demo.rows[2].g2_lower, demo.g1);
  EXPECT_DOUBLE_EQ(demo.c_out_advantage_max, 1e-3);
}

TEST(TwoRound, InapplicableWhenInducedChannelLacksWitness) {
  // Y = X_3 ignores the first two encoders.
  DiscreteMac mac{3, {2, 2, 2}, 2, {}};
  for (int x = 0; x < 8; ++x) {
    mac.transition.push_back((x & 1) == 0 ? 1.0 : 0.0);
    mac.transition.push_back((x & 1) == 1 ? 1.0 : 0.0);
  }
  auto demo = two_round_conferencing_demo(mac, 1.0, 1.0, {0.0, 1e-3});
  EXPECT_FALSE(demo.applicable);
  for (const auto& r : demo.rows) EXPECT_EQ(r.g2_lower, r.g1);
}

}  // namespace
}  // namespace cfmac
