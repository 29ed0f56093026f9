#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cfmac/channel.hpp"
#include "cfmac/errors.hpp"
#include "cfmac/info.hpp"
#include "test_util.hpp"

namespace cfmac {
namespace {

using testing::naive_entropy;
using testing::random_pmf;

TEST(JointPmf, MarginalSumsOutOtherAxes) {
  JointPmf p({2, 3}, {0.1, 0.2, 0.1, 0.3, 0.2, 0.1});
  auto m0 = p.marginal_of(0);
  EXPECT_NEAR(m0[0], 0.4, 1e-15);
  EXPECT_NEAR(m0[1], 0.6, 1e-15);
  auto m1 = p.marginal(0b10).mass();
  EXPECT_NEAR(m1[0], 0.4, 1e-15);
  EXPECT_NEAR(m1[1], 0.4, 1e-15);
  EXPECT_NEAR(m1[2], 0.2, 1e-15);
}

TEST(JointPmf, IndexRoundTrip) {
  JointPmf p = JointPmf::uniform({2, 3, 4});
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(p.index(p.symbols(i)), i);
  EXPECT_EQ(p.index({1, 2, 3}), 23u);
}

TEST(JointPmf, RejectsBadShapes) {
  EXPECT_THROW(JointPmf({2, 2}, {0.5, 0.5}), std::invalid_argument);
  EXPECT_THROW(JointPmf({2}, {1.5, -0.5}), std::invalid_argument);
}

TEST(Entropy, Examples) {
  EXPECT_DOUBLE_EQ(entropy(JointPmf::uniform({2}), 1), 1.0);
  EXPECT_DOUBLE_EQ(entropy(JointPmf::point({3}, {1}), 1), 0.0);
  EXPECT_NEAR(entropy(JointPmf({3}, {0.25, 0.5, 0.25}), 1), 1.5, 1e-15);
  EXPECT_THROW(entropy(JointPmf::uniform({2}), 0), ConfigError);
}

TEST(MutualInformation, Examples) {
  JointPmf indep = JointPmf::uniform({2, 2});
  EXPECT_NEAR(mutual_information(indep, 1, 2), 0.0, 1e-15);
  JointPmf same({2, 2}, {0.5, 0, 0, 0.5});
  EXPECT_NEAR(mutual_information(same, 1, 2), 1.0, 1e-15);
  EXPECT_THROW(mutual_information(same, 1, 1), ConfigError);
}

TEST(MutualInformation, BemacUniformIsOnePointFive) {
  // Brute force: Y = X1 + X2 with fair independent bits.
  double py[3] = {0, 0, 0};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) py[a + b] += 0.25;
  double expected = naive_entropy({py[0], py[1], py[2]});  // H(Y|X) = 0
  auto mac = make_binary_erasure_mac();
  auto joint = joint_input_output(mac, JointPmf::uniform({2, 2}));
  EXPECT_NEAR(mutual_information(joint, 0b011, 0b100), expected, 1e-12);
  EXPECT_NEAR(expected, 1.5, 1e-12);
}

TEST(Kl, Examples) {
  JointPmf p({3}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  JointPmf q({3}, {0.25, 0.5, 0.25});
  EXPECT_EQ(kl_divergence(p, p), 0.0);
  double direct = (1.0 / 3) * (std::log2(4.0 / 3) * 2 + std::log2(2.0 / 3));
  EXPECT_NEAR(kl_divergence(p, q), direct, 1e-14);
  EXPECT_NEAR(kl_divergence(p, q), 0.08170, 1e-5);
  EXPECT_THROW(kl_divergence(JointPmf({2}, {1, 0}), JointPmf({2}, {0, 1})), PreconditionError);
}

TEST(TotalCorrelation, Examples) {
  EXPECT_NEAR(total_correlation(JointPmf::uniform({2, 3}), 0b11), 0.0, 1e-14);
  EXPECT_NEAR(total_correlation(JointPmf({2, 2}, {0.5, 0, 0, 0.5}), 0b11), 1.0, 1e-14);
  // Uniform over even-parity triples.
  std::vector<double> m(8, 0.0);
  for (int i = 0; i < 8; ++i)
    if (__builtin_popcount(i) % 2 == 0) m[i] = 0.25;
  JointPmf parity({2, 2, 2}, m);
  EXPECT_NEAR(mutual_information(parity, 1, 2), 0.0, 1e-14);
  EXPECT_NEAR(total_correlation(parity, 0b111), 1.0, 1e-14);
  EXPECT_THROW(total_correlation(parity, 0b011, 0b010), ConfigError);
}

TEST(OutputPmf, Examples) {
  auto mac = make_binary_erasure_mac();
  auto py = output_pmf(mac, JointPmf::uniform({2, 2})).mass();
  EXPECT_NEAR(py[0], 0.25, 1e-15);
  EXPECT_NEAR(py[1], 0.5, 1e-15);
  EXPECT_NEAR(py[2], 0.25, 1e-15);
  auto pt = output_pmf(mac, JointPmf::point({2, 2}, {1, 1})).mass();
  EXPECT_EQ(pt[2], 1.0);
  auto pd = output_pmf(mac, JointPmf({2, 2}, {1.0 / 3, 1.0 / 6, 1.0 / 6, 1.0 / 3})).mass();
  for (double v : pd) EXPECT_NEAR(v, 1.0 / 3, 1e-15);
  EXPECT_THROW(output_pmf(mac, JointPmf::uniform({2, 3})), ConfigError);
}

TEST(JointInputOutput, MarginalsAreConsistent) {
  std::mt19937_64 rng(3);
  Rng crng(4);
  auto mac = make_random_mac({2, 3}, 3, crng);
  auto in = random_pmf({2, 3}, rng);
  auto j = joint_input_output(mac, in);
  auto back = j.marginal(0b011).mass();
  for (std::size_t i = 0; i < back.size(); ++i) EXPECT_NEAR(back[i], in[i], 1e-12);
  auto y = j.marginal(0b100).mass();
  auto y2 = output_pmf(mac, in).mass();
  for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(y[i], y2[i], 1e-12);
  auto bj = joint_input_output(make_binary_erasure_mac(), in.sizes() == std::vector<int>{2, 2} ? in : JointPmf::uniform({2, 2}));
  EXPECT_NEAR(cond_entropy(bj, 0b100, 0b011), 0.0, 1e-12);
}

TEST(InfoProperties, ChainRuleAndKlIdentity) {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    auto p = random_pmf({2, 3, 2}, rng);
    EXPECT_NEAR(entropy(p, 0b011), entropy(p, 0b001) + cond_entropy(p, 0b010, 0b001), 1e-9);
    auto pab = p.marginal(0b011);
    auto prod = JointPmf::product({pab.marginal_of(0), pab.marginal_of(1)});
    EXPECT_NEAR(mutual_information(p, 0b001, 0b010), kl_divergence(pab, prod), 1e-9);
    EXPECT_GE(total_correlation(p, 0b111), -1e-12);
  }
}

TEST(InfoProperties, ProductPmfsHaveZeroTotalCorrelation) {
  std::mt19937_64 rng(12);
  for (int rep = 0; rep < 20; ++rep) {
    auto p = JointPmf::product({testing::random_simplex(3, rng), testing::random_simplex(2, rng),
                                testing::random_simplex(4, rng)});
    EXPECT_NEAR(total_correlation(p, 0b111), 0.0, 1e-12);
    EXPECT_TRUE(p.is_product());
  }
}

TEST(InfoProperties, AxisPermutationInvariance) {
  std::mt19937_64 rng(13);
  auto p = random_pmf({2, 3}, rng);
  std::vector<double> t(6);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 3; ++b) t[b * 2 + a] = p[a * 3 + b];
  JointPmf q({3, 2}, t);
  EXPECT_NEAR(mutual_information(p, 1, 2), mutual_information(q, 2, 1), 1e-12);
  EXPECT_NEAR(cond_entropy(p, 1, 2), cond_entropy(q, 2, 1), 1e-12);
  EXPECT_NEAR(entropy(p, 3), entropy(q, 3), 1e-12);
}

}  // namespace
}  // namespace cfmac
