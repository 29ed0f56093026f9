#include <gtest/gtest.h>

#include <cmath>
#include <algorithm>
#include <map>

#include "cfmac/codec.hpp"
#include "cfmac/errors.hpp"
#include "cfmac/info.hpp"
#include "cfmac/rng.hpp"

using namespace cfmac;

namespace {

CodeSpec bemac_spec(double r1, double r2, int n, std::uint64_t seed = 7) {
  CodeSpec s;
  s.mac = make_binary_erasure_mac();
  s.coord = product_coordination({{0.5, 0.5}, {0.5, 0.5}});
  s.cfg = {{0.0, 0.0}, {0.0, 0.0}};
  s.split = {{0.0, 0.0}, {0.0, 0.0}};
  s.rates = {r1, r2};
  s.n = n;
  s.delta = 0.05;
  s.seed = seed;
  return s;
}

// U_0 binary, U trivial, X uniform: exercises the common book.
CodeSpec common_spec(int n) {
  CodeSpec s = bemac_spec(0.5, 0.5, n);
  s.coord = JointPmf::product({{0.3, 0.7}, {1.0}, {1.0}, {0.5, 0.5}, {0.5, 0.5}});
  s.cfg = {{0.5, 0.5}, {0.5, 0.5}};
  s.split = {{0.5, 0.5}, {0.0, 0.0}};
  return s;
}

// U_1 = U_2 with probability 0.9 (U_0 trivial), X_j = U_j.
JointPmf dsbs_coord() {
  std::vector<double> m(16, 0.0);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) m[(a * 2 + b) * 4 + a * 2 + b] = a == b ? 0.45 : 0.05;
  return JointPmf({1, 2, 2, 2, 2}, m);
}

}  // namespace

TEST(Codec, SplitRates) {
  CodeSpec s = bemac_spec(0.9, 0.2, 8);
  s.cfg = {{0.5, 0.5}, {0.5, 0.5}};
  s.split = {{0.3, 0.1}, {0.0, 0.0}};
  auto r = split_rates(s);
  EXPECT_DOUBLE_EQ(r[0].r0, 0.3);
  EXPECT_DOUBLE_EQ(r[0].rd, 0.2);
  EXPECT_NEAR(r[0].rj, 0.4, 1e-12);
  EXPECT_DOUBLE_EQ(r[1].r0, 0.1);
  EXPECT_DOUBLE_EQ(r[1].rd, 0.1);
  EXPECT_DOUBLE_EQ(r[1].rj, 0.0);
  for (int j = 0; j < 2; ++j) EXPECT_NEAR(r[j].r0 + r[j].rd + r[j].rj, s.rates[j], 1e-12);
}

TEST(Codec, ZeroRateBooksAreSingletons) {
  const Codebooks b = build_code(bemac_spec(0.0, 0.0, 10));
  EXPECT_EQ(b.sizes.w0_total, 1u);
  EXPECT_EQ(b.u0.size(), 10u);
  for (int j = 0; j < 2; ++j) EXPECT_EQ(b.x[j].size(), 10u);
  ASSERT_EQ(b.z.size(), 1u);
  EXPECT_EQ(b.z[0], (std::vector<std::uint64_t>{0, 0}));
}

TEST(Codec, ZeroRateDeterministicChannelNeverErrs) {
  const ErrorEstimate e = estimate_error(bemac_spec(0.0, 0.0, 16), 200);
  EXPECT_EQ(e.errors, 0);
  EXPECT_EQ(e.p_error, 0.0);
}

TEST(Codec, BooksAreDeterministic) {
  const CodeSpec s = common_spec(8);
  const Codebooks a = build_code(s), b = build_code(s);
  EXPECT_EQ(a.u0, b.u0);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.z, b.z);
  CodeSpec t = s;
  t.seed = s.seed + 1;
  EXPECT_NE(build_code(t).u0, a.u0);
}

TEST(Codec, CommonBookFrequenciesMatchPmf) {
  const Codebooks b = build_code(common_spec(14));
  const double m = static_cast<double>(b.u0.size());
  ASSERT_GE(m, 1e4);
  double ones = 0.0;
  for (Symbol s : b.u0) ones += s;
  const double sigma = std::sqrt(m * 0.7 * 0.3);
  EXPECT_LE(std::abs(ones - 0.7 * m), 4.0 * sigma);
}

TEST(Codec, RejectsBadSpecs) {
  CodeSpec s = bemac_spec(0.5, 0.5, 65);
  EXPECT_THROW(build_code(s), ConfigError);
  s = bemac_spec(0.5, 0.5, 8);
  s.delta = 0.0;
  EXPECT_THROW(build_code(s), ConfigError);
  s = bemac_spec(0.5, 0.5, 8);
  s.coord = JointPmf::uniform({1, 1, 1, 2, 2});
  s.coord.mutable_mass() = {0.5, 0.0, 0.0, 0.5};  // X_1 = X_2 breaks the factorization
  EXPECT_THROW(build_code(s), ConfigError);
  EXPECT_THROW(build_code(bemac_spec(0.6, 0.6, 64)), PreconditionError);
  EXPECT_THROW(estimate_error(bemac_spec(0.0, 0.0, 8), 99), ConfigError);
}

TEST(Codec, CoordinateMatchesExhaustiveSearch) {
  Rng rng = derive_rng(11, 0);
  const int n = 8;
  int found = 0;
  for (int inst = 0; inst < 100; ++inst) {
    std::vector<double> m(8);
    for (auto& v : m) v = 0.05 + uniform01(rng);
    JointPmf p({2, 2, 2}, m);
    p.normalize();
    const double delta = 0.15;
    const TypicalityTester tester(p, delta);
    Sequence u0(n);
    for (auto& s : u0) s = static_cast<Symbol>(rng() % 2);
    std::vector<std::vector<Sequence>> store(2, std::vector<Sequence>(5, Sequence(n)));
    std::vector<std::vector<const Symbol*>> maps(2);
    for (int j = 0; j < 2; ++j)
      for (auto& w : store[j]) {
        for (auto& s : w) s = static_cast<Symbol>(rng() % 2);
        maps[j].push_back(w.data());
      }
    const CoordinateResult r = cf_coordinate(u0.data(), maps, tester, n);
    std::vector<std::uint64_t> want{0, 0};
    bool any = false;
    for (int a = 0; a < 5 && !any; ++a)
      for (int b = 0; b < 5 && !any; ++b)
        if (is_weakly_typical({u0, store[0][a], store[1][b]}, {p, delta, n}).typical) {
          want = {static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b)};
          any = true;
        }
    EXPECT_EQ(r.found, any) << inst;
    EXPECT_EQ(r.z, want) << inst;
    found += any;
  }
  EXPECT_GT(found, 10);
  EXPECT_LT(found, 100);
}

TEST(Codec, DecoderFallsBackWhenNothingIsTypical) {
  const CodeSpec s = bemac_spec(0.25, 0.25, 8);
  const Codebooks b = build_code(s);
  const TypicalityTester t(attach_output(s.mac, s.coord, {3, 4}), 0.1);
  const DecodeResult r = decode(Sequence(8, 1), b, t);  // all erasures: far from H(Y)
  EXPECT_EQ(r.typical_count, 0);
  EXPECT_EQ(r.messages, std::vector<Message>(2));
}

TEST(Codec, DecoderFallsBackOnAmbiguity) {
  CodeSpec s;
  s.mac = make_identity_channel(2);
  s.coord = product_coordination({{0.5, 0.5}});
  s.cfg = {{0.0}, {0.0}};
  s.split = {{0.0}, {0.0}};
  s.rates = {0.25};
  s.n = 8;
  s.delta = 0.05;
  Codebooks b = build_code(s);
  ASSERT_EQ(b.sizes.wj[0], 4u);
  const Sequence word{0, 1, 0, 1, 1, 0, 1, 0};
  for (std::uint64_t w : {2, 3}) std::copy(word.begin(), word.end(), b.x[0].begin() + w * 8);
  std::fill_n(b.x[0].begin(), 8, Symbol{0});
  std::fill_n(b.x[0].begin() + 8, 8, Symbol{1});
  const TypicalityTester t(attach_output(s.mac, s.coord, {2}), 0.1);
  DecodeResult r = decode(word, b, t);
  EXPECT_EQ(r.typical_count, 2);
  EXPECT_EQ(r.messages[0].wj, 0u);
  // With a single copy the decode is unique.
  std::fill_n(b.x[0].begin() + 16, 8, Symbol{0});
  r = decode(word, b, t);
  EXPECT_EQ(r.typical_count, 1);
  EXPECT_EQ(r.messages[0].wj, 3u);
}

TEST(Codec, NoiselessChannelFailsOnlyOnAtypicalCodewords) {
  CodeSpec s;
  s.mac = make_identity_channel(2);
  s.coord = product_coordination({{0.5, 0.5}});
  s.cfg = {{0.0}, {0.0}};
  s.split = {{0.0}, {0.0}};
  s.rates = {0.5};
  s.n = 16;
  s.delta = 0.05;
  const ErrorEstimate e = estimate_error(s, 300);
  for (const auto& [key, count] : e.classes) EXPECT_EQ(key, "typ") << count;
}

TEST(Codec, HistogramSumsToErrorCount) {
  const ErrorEstimate e = estimate_error(bemac_spec(0.85, 0.85, 12), 200);
  int sum = 0;
  for (const auto& [key, count] : e.classes) sum += count;
  EXPECT_EQ(sum, e.errors);
  EXPECT_DOUBLE_EQ(e.p_error, static_cast<double>(sum) / e.trials);
  EXPECT_GT(e.errors, 0);
  EXPECT_LE(e.ci_low, e.p_error);
  EXPECT_GE(e.ci_high, e.p_error);
}

TEST(Codec, EstimateIsDeterministic) {
  const CodeSpec s = bemac_spec(0.6, 0.6, 12, 99);
  const ErrorEstimate a = estimate_error(s, 150), b = estimate_error(s, 150);
  EXPECT_EQ(a.errors, b.errors);
  EXPECT_EQ(a.classes, b.classes);
}

TEST(Codec, BemacBelowAndAboveSumCapacity) {
  const ErrorEstimate lo = estimate_error(bemac_spec(0.6, 0.6, 16), 300);
  const ErrorEstimate hi = estimate_error(bemac_spec(0.85, 0.85, 16), 300);
  EXPECT_LT(lo.p_error, hi.p_error);
  EXPECT_GE(hi.p_error, 0.5);
}

TEST(Codec, CostViolationsAreCounted) {
  CodeSpec s = bemac_spec(0.25, 0.25, 10);
  s.mac.costs = {{{0.0, 1.0}, 0.1}, {{0.0, 1.0}, 1.0}};  // encoder 1 may send few ones
  const ErrorEstimate e = estimate_error(s, 200);
  EXPECT_GT(e.classes.count("cost"), 0u);
  const Codebooks b = build_code(s);
  for (std::uint64_t w = 0; w < b.sizes.wj[0]; ++w) {
    int ones = 0;
    for (int t = 0; t < 10; ++t) ones += b.x[0][w * 10 + t];
    EXPECT_EQ(static_cast<bool>(b.x_cost_ok[0][w]), ones <= 1);
  }
}

TEST(Codec, CoordinationPullsJointTypeTowardTarget) {
  CodeSpec s;
  s.mac = make_binary_erasure_mac();
  s.coord = dsbs_coord();
  s.cfg = {{0.2, 0.2}, {0.6, 0.6}};
  s.split = {{0.0, 0.0}, {0.6, 0.6}};
  s.rates = {0.2, 0.2};
  s.n = 12;
  s.delta = 0.1;
  const Codebooks b = build_code(s);
  const double target[4] = {0.45, 0.05, 0.05, 0.45};
  auto l1 = [&](const Symbol* a, const Symbol* c) {
    double type[4] = {0, 0, 0, 0};
    for (int t = 0; t < s.n; ++t) type[a[t] * 2 + c[t]] += 1.0 / s.n;
    double d = 0.0;
    for (int i = 0; i < 4; ++i) d += std::abs(type[i] - target[i]);
    return d;
  };
  int success = 0, closer = 0;
  Rng rng = derive_rng(3, 0);
  for (std::uint64_t t = 0; t < b.sizes.wd_total; ++t) {
    if (!b.z_found[t]) continue;
    ++success;
    const std::uint64_t w1 = t / b.sizes.wd[1], w2 = t % b.sizes.wd[1];
    const auto& z = b.z[t];
    const double chosen = l1(b.u_word(0, 0, w1, z[0]), b.u_word(1, 0, w2, z[1]));
    const double indep = l1(b.u_word(0, 0, w1, rng() % b.sizes.z[0]), b.u_word(1, 0, w2, rng() % b.sizes.z[1]));
    closer += chosen < indep;
  }
  ASSERT_GT(success, 20);
  EXPECT_GE(closer, 0.9 * success);
}

TEST(Codec, ExperimentJsonAndCsv) {
  const auto e = codec_experiment_from_json(
      R"({"channel": "bemac", "rates": [[0.3, 0.3], [0.5, 0.5]], "n": [8, 12], "trials": 100, "seed": 5})");
  EXPECT_EQ(e.block_lengths, (std::vector<int>{8, 12}));
  EXPECT_EQ(e.rate_points.size(), 2u);
  EXPECT_EQ(e.spec.seed, 5u);
  EXPECT_EQ(e.spec.coord.rank(), 5);
  EXPECT_THROW(codec_experiment_from_json(R"({"channel": "bemac"})"), ConfigError);
  EXPECT_THROW(codec_experiment_from_json("{"), ConfigError);
  CodeSpec s = e.spec;
  const auto est = estimate_error(s, 100);
  const std::string csv = codec_results_csv({{s, est}});
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "n,r1,r2,sum_rate,trials,errors,p_error,ci_low,ci_high,cost,enc,typ,common,wrong_message,classes");
}
