#ifndef CFMAC_COVERING_HPP_
#define CFMAC_COVERING_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "cfmac/pmf.hpp"
#include "cfmac/typicality.hpp"

namespace cfmac {

// Target pmfs have axes (U_0, U_1..U_k, U_{k+1}).
inline constexpr double kCoveringBudgetLog2 = 20.0;
// Stored codeword symbols per trial.
inline constexpr std::uint64_t kCoveringMemorySymbols = std::uint64_t{1} << 26;

struct CoveringConfig {
  std::vector<double> rates;  // bits per symbol
  int trials = 100;
  std::uint64_t seed = 0;
};

// M_j = ceil(2^{n R_j}).
std::vector<std::uint64_t> codebook_sizes(const std::vector<double>& rates, int n);

struct CoveringOutcome {
  bool success = false;
  std::vector<std::uint64_t> m;  // first typical tuple in lexicographic order, 0-based
  std::uint64_t tuples_checked = 0;
};

// One trial with explicit codebook sizes. Codewords of user j are drawn in
// order from a per-user stream, so a smaller codebook is a prefix of a larger
// one under the same (seed, trial). Throws PreconditionError when
// prod M_j > 2^20 or the stored codebooks exceed the memory budget.
CoveringOutcome covering_search(const JointPmf& p, const std::vector<std::uint64_t>& sizes,
                                const TypicalityCheck& check, std::uint64_t seed, std::uint64_t trial);

bool covering_trial(const JointPmf& p, const CoveringConfig& cfg, const TypicalityCheck& check, std::uint64_t trial);

struct CoveringThreshold {
  Mask users = 0;         // nonempty subset of [k], 0-based bits
  double base = 0.0;      // sum_S H(U_j|U_0) - H(U_S|U_0,U_{k+1})
  double direct = 0.0;    // base + (8k - 2|S| + 10) delta
  double converse = 0.0;  // base - 2(|S| + 1) delta
};

std::vector<CoveringThreshold> covering_thresholds(const JointPmf& p, double delta);

struct PhasePoint {
  std::vector<double> rates;
  double sum_rate = 0.0;
  int successes = 0;
  int trials = 0;
  double fraction = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  bool above_direct = false;     // every S satisfies the direct condition
  bool below_converse = false;   // some S violates the converse condition
  double base_sum_threshold = 0.0;
  double direct_sum_threshold = 0.0;
  double converse_sum_threshold = 0.0;
};

std::vector<PhasePoint> covering_phase_curve(const JointPmf& p, const TypicalityCheck& check,
                                             const std::vector<std::vector<double>>& rate_grid, int trials,
                                             std::uint64_t seed);
std::string phase_curve_csv(const std::vector<PhasePoint>& rows);

struct CoveringExperiment {
  JointPmf distribution;
  int n = 0;
  double delta = 0.05;
  std::vector<std::vector<double>> rates;
  int trials = 100;
  std::uint64_t seed = 0;
};

// {"distribution": {"sizes": [...], "mass": [...]}, "n", "delta", "rates": [[...]], "trials", "seed"}
CoveringExperiment covering_experiment_from_json(const std::string& text);
std::string covering_experiment_to_json(const CoveringExperiment& e);

// Chernoff exponent in bits for the event that -(1/n) log2 p(U_S^n) deviates
// from H(U_S) by at least epsilon, minimized over the two tails. The supremum
// over t in (1e-6, t_max) is found by golden-section search (the objective is
// concave in t). Axes of p play the role of users.
double ldp_subset_exponent(const JointPmf& p, Mask subset, double epsilon, double t_max = 8.0);

struct LdpResult {
  std::vector<std::pair<Mask, double>> subsets;
  double combined = 0.0;  // half the minimum over nonempty subsets
};

LdpResult ldp_exponent(const JointPmf& p, double epsilon, double t_max = 8.0);

// Fraction of trials in which n i.i.d. draws from p are not epsilon-typical.
double atypicality_rate(const JointPmf& p, double epsilon, int n, int trials, std::uint64_t seed);

}  // namespace cfmac

#endif  // CFMAC_COVERING_HPP_
