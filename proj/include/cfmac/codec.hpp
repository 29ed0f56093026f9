#ifndef CFMAC_CODEC_HPP_
#define CFMAC_CODEC_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cfmac/channel.hpp"
#include "cfmac/pmf.hpp"
#include "cfmac/region.hpp"
#include "cfmac/typicality.hpp"

namespace cfmac {

inline constexpr int kCodecMaxBlock = 64;
inline constexpr std::uint64_t kCodecMemorySymbols = std::uint64_t{1} << 26;

struct CodeSpec {
  DiscreteMac mac;
  JointPmf coord;  // axes (U_0, U_1..U_k, X_1..X_k)
  CfConfig cfg;
  CfSplit split;
  std::vector<double> rates;
  int n = 16;
  double delta = 0.05;  // encoder typicality; the decoder uses 2 * delta
  std::uint64_t seed = 0;
};

struct SubRates {
  double r0 = 0.0, rd = 0.0, rj = 0.0;
};

// R_j0 = min(R_j, C_j0), R_jd = min(R_j, C_in^j) - R_j0, R_jj = (R_j - C_in^j)^+.
std::vector<SubRates> split_rates(const CodeSpec& spec);

// Index-set sizes per encoder: ceil(2^{n R}) for each part, ceil(2^{n C_jd}) for Z.
struct CodeSizes {
  std::vector<std::uint64_t> w0, wd, wj, z;
  std::uint64_t w0_total = 1;  // |W_0| = prod_j |W_j0|
  std::uint64_t wd_total = 1;  // prod_j |W_jd|
  std::uint64_t symbols = 0;   // stored codeword symbols
};

CodeSizes code_sizes(const CodeSpec& spec);

struct Codebooks {
  int k = 0;
  int n = 0;
  CodeSizes sizes;
  Sequence u0;  // |W_0| codewords
  // u[j] holds codewords for (w0, w_jd, z_j) in that nesting order.
  std::vector<Sequence> u;
  // x[j] holds codewords for (w0, w_jd, z_j, w_jj).
  std::vector<Sequence> x;
  // Z chosen by the CF for each (w0, w_d tuple); w_d tuples are mixed-radix
  // with user 1 most significant.
  std::vector<std::vector<std::uint64_t>> z;
  std::vector<char> z_found;
  std::vector<std::vector<char>> x_cost_ok;  // per X codeword

  const Symbol* u0_word(std::uint64_t w0) const { return u0.data() + w0 * n; }
  std::uint64_t u_index(int j, std::uint64_t w0, std::uint64_t wd, std::uint64_t zj) const;
  const Symbol* u_word(int j, std::uint64_t w0, std::uint64_t wd, std::uint64_t zj) const;
  std::uint64_t x_index(int j, std::uint64_t w0, std::uint64_t wd, std::uint64_t zj, std::uint64_t wj) const;
  const Symbol* x_word(int j, std::uint64_t w0, std::uint64_t wd, std::uint64_t zj, std::uint64_t wj) const;
  std::uint64_t wd_tuple(const std::vector<std::uint64_t>& wd) const;
};

// Throws ConfigError on invalid specs and PreconditionError when the books
// exceed 2^26 symbols.
Codebooks build_code(const CodeSpec& spec);

struct CoordinateResult {
  std::vector<std::uint64_t> z;  // 0-based; all zeros is the fallback
  bool found = false;
};

// Lexicographically smallest z with (u0, mu_1(z_1), .., mu_k(z_k)) typical
// with respect to p(u_0, u_[k]). maps[j][z] points at mu_j(z). The tester's
// axes are (U_0, U_1..U_k).
CoordinateResult cf_coordinate(const Symbol* u0n, const std::vector<std::vector<const Symbol*>>& maps,
                               const TypicalityTester& tester, int n);

// Per-encoder message split into (w_j0, w_jd, w_jj).
struct Message {
  std::uint64_t w0 = 0, wd = 0, wj = 0;
  bool operator==(const Message&) const = default;
};

struct DecodeResult {
  std::vector<Message> messages;  // all zeros when no unique tuple
  int typical_count = 0;          // 0, 1 or 2 (meaning at least two)
  std::vector<std::vector<Message>> typical;  // tuples found, at most two
};

// Enumerates every hypothesis (w0, w_d, w_jj) with Z looked up from the
// books, pruning on subset typicality. The tester covers
// (U_0, U_[k], X_[k], Y) with tolerance 2 delta.
DecodeResult decode(const Sequence& yn, const Codebooks& books, const TypicalityTester& tester);

enum class FailureClass { kNone, kCost, kEncoder, kTypicality, kWrongCommon, kWrongMessage };

struct TrialResult {
  std::vector<Message> sent;
  std::vector<Message> decoded;
  bool error = false;
  FailureClass failure = FailureClass::kNone;
  Mask s = 0, t = 0;  // for kWrongMessage
};

struct ErrorEstimate {
  int trials = 0;
  int errors = 0;
  double p_error = 0.0;
  double ci_low = 0.0, ci_high = 1.0;
  std::map<std::string, int> classes;  // "cost", "enc", "typ", "S={..} T={..}"; counts sum to errors
};

TrialResult run_trial(const CodeSpec& spec, const Codebooks& books, const TypicalityTester& decoder_tester,
                      std::uint64_t trial);

// One code drawn from spec.seed, then `trials` uniform messages with fresh
// channel noise. Requires trials >= 100.
ErrorEstimate estimate_error(const CodeSpec& spec, int trials);

// JSON experiment: {"channel": <channel json> | "bemac", "coord": {"sizes","mass"} (optional,
// product uniform inputs by default), "c_in", "c_out", "c0", "cd", "rates", "n", "delta",
// "trials", "seed"}.
struct CodecExperiment {
  CodeSpec spec;
  std::vector<int> block_lengths;
  std::vector<std::vector<double>> rate_points;
  int trials = 100;
};

CodecExperiment codec_experiment_from_json(const std::string& text);
std::string codec_results_csv(const std::vector<std::pair<CodeSpec, ErrorEstimate>>& rows);

// Product coordination pmf with trivial U axes: X_j ~ px[j].
JointPmf product_coordination(const std::vector<std::vector<double>>& px);

}  // namespace cfmac

#endif  // CFMAC_CODEC_HPP_
