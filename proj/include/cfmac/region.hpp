#ifndef CFMAC_REGION_HPP_
#define CFMAC_REGION_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cfmac/channel.hpp"
#include "cfmac/pmf.hpp"

namespace cfmac {

struct CfConfig {
  std::vector<double> c_in;
  std::vector<double> c_out;
};

struct CfSplit {
  std::vector<double> c0;  // bits forwarded verbatim by each encoder
  std::vector<double> cd;  // coordination bits sent to each encoder
  Mask sd() const;         // encoders with cd != 0
};

void validate_config(const CfConfig& cfg, int k);
// Checks c0 <= c_in and cd_j + sum_{i != j} c0_i <= c_out_j.
void validate_split(const CfSplit& split, const CfConfig& cfg);

// Axis layout of a coordination pmf: U_0, U_1..U_k, X_1..X_k, and Y once
// attached. Users are 0-based in masks; user j has U axis 1+j, X axis 1+k+j.
struct CoordLayout {
  int k;
  int u0() const { return 0; }
  int u(int j) const { return 1 + j; }
  int x(int j) const { return 1 + k + j; }
  int y() const { return 1 + 2 * k; }
  Mask u_axes(Mask users) const;
  Mask x_axes(Mask users) const;
};

// Max |p - p(base) prod_i p(part_i | cond_i)| over the support of the
// marginal on base and all parts. Zero exactly when p has that form.
double factorization_error(const JointPmf& p, Mask base,
                           const std::vector<std::pair<Mask, Mask>>& factors);

// Sum_{j in S} C_jd - Sum H(U_j|U_0) + H(U_S | U_0, U_{Sd^c}) for any S.
double zeta_value(Mask users, const CfSplit& split, const JointPmf& coord);
// Same, requiring a nonempty S within S_d.
double zeta(Mask users, const CfSplit& split, const JointPmf& coord);

struct Constraint {
  std::vector<double> coeffs;
  double bound = 0.0;
  std::string tag;
};

// Region = all `constraints`, plus for every group at least one option
// whose constraints all hold. Rates are implicitly nonnegative.
struct RateRegion {
  int k = 0;
  std::vector<Constraint> constraints;
  struct Option {
    std::vector<Constraint> constraints;
    std::string tag;
  };
  std::vector<std::vector<Option>> groups;
  bool disjunctive() const { return !groups.empty(); }
  bool contains(const std::vector<double>& rates, double tol = 1e-9) const;
};

Constraint subset_constraint(int k, Mask users, double bound, std::string tag);

struct WeightedSum {
  double value = 0.0;
  std::vector<double> rates;
  int lp_solves = 0;
};

// LP optimum of w.R over the region and R >= 0. Disjunctive groups are
// resolved exactly by branch and bound over the options.
WeightedSum max_weighted_sum(const RateRegion& region, const std::vector<double>& weights);

// Coordination pmf over (U_0, U, X) for the general inner bound.
RateRegion inner_bound(const JointPmf& coord, const CfSplit& split, const CfConfig& cfg,
                       const DiscreteMac& mac);
// p over (U_0, X_1..X_k) of the form p(u_0) prod p(x_j|u_0).
RateRegion forwarding_bound(const JointPmf& p, const std::vector<double>& c0, const CfConfig& cfg,
                            const DiscreteMac& mac);
RateRegion outer_bound(const DiscreteMac& mac, const CfConfig& cfg, const JointPmf& p);
// Outer bound with c_in_j = sum_{i != j} c[j][i].
RateRegion conferencing_outer(const DiscreteMac& mac, const std::vector<std::vector<double>>& c,
                              const JointPmf& p);
std::vector<double> conferencing_effective_cin(const std::vector<std::vector<double>>& c);

// Inserts singleton U_1..U_k axes into a (U_0, X) pmf.
JointPmf coordination_from_forwarding(const JointPmf& p, int k);

// Phi(S) = I(X_S;Y|U_{S^c},X_{S^c}) + sum_{j in S} H(U_j) - H(U_S|U_{S^c})
// for p over (U_1..U_k, X_1..X_k, Y) of the form p(u) prod p(x_j|u_j) p(y|x).
double submodular_phi(const JointPmf& p, Mask users);
std::vector<double> phi_table(const JointPmf& p, int k);
// Greedy corner for the order perm (0-based users).
std::vector<double> corner_point(const std::vector<double>& phi, const std::vector<int>& perm);

enum class BoundKind { kForwarding, kOuter };

struct EnvelopeOptions {
  int u0_size = 2;
  int random_starts = 4;
  std::uint64_t seed = 0;
};

struct EnvelopeResult {
  double value = 0.0;
  JointPmf best;  // over (U_0, X)
  int evaluations = 0;
};

// Local search over p(u_0) prod p(x_j|u_0) maximizing the weighted sum of
// the chosen bound. Not certified globally optimal.
EnvelopeResult envelope_max_weighted_sum(const DiscreteMac& mac, const CfConfig& cfg, BoundKind kind,
                                         const std::vector<double>& weights,
                                         const EnvelopeOptions& opts = {});

std::string region_to_csv(const RateRegion& region);
std::string region_to_json(const RateRegion& region);

}  // namespace cfmac

#endif  // CFMAC_REGION_HPP_
