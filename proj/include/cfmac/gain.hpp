#ifndef CFMAC_GAIN_HPP_
#define CFMAC_GAIN_HPP_

#include <optional>
#include <vector>

#include "cfmac/channel.hpp"
#include "cfmac/pmf.hpp"
#include "cfmac/region.hpp"
#include "cfmac/search.hpp"

namespace cfmac {

struct CStarWitness {
  JointPmf p_ind;  // product input pmf maximizing I(X;Y)
  JointPmf p_dep;  // support within support(p_ind)
  double i_ind = 0.0;
  double i_dep = 0.0;
  double d_out = 0.0;   // D(p_dep(y) || p_ind(y))
  double margin = 0.0;  // i_dep + d_out - i_ind
};

// Evaluates the margin of a candidate pair. Throws PreconditionError on a
// support violation.
CStarWitness evaluate_witness(const DiscreteMac& mac, const JointPmf& p_ind, const JointPmf& p_dep);

// Searches for a witness. The margin equals E_dep[D(p(y|x)||p_ind(y))] - I_ind,
// which is linear in p_dep, so the best p_dep on support(p_ind) is an LP vertex.
// Returns nullopt when the best margin is at most 1e-6, and always for k = 1.
std::optional<CStarWitness> cstar_test(const DiscreteMac& mac, const ProductSearchOptions& opts = {});

bool gaussian_cstar(const std::vector<double>& powers);

// d/dlambda H(marginal on axes of (1-l) p_a + l p_b).
double mixture_entropy_derivative(const JointPmf& p_a, const JointPmf& p_b, double lambda, Mask axes);
// d/dlambda I(X;Y) along the input mixture.
double mixture_mi_derivative(const DiscreteMac& mac, const JointPmf& p_a, const JointPmf& p_b, double lambda);
// Derivative of the total correlation of `axes` at lambda = 0+. p_a must be
// a product on those axes and contain the support of p_b.
double mixture_tc_derivative_at_zero(const JointPmf& p_a, const JointPmf& p_b, Mask axes);

JointPmf mix(const JointPmf& p_a, const JointPmf& p_b, double lambda);

struct MixtureFamily {
  JointPmf p_a;           // product input pmf
  JointPmf p_b;           // dependent input pmf
  double mix_weight = 0;  // P(U_0 = 1)
  double epsilon = 0;
  std::vector<double> v;  // unit direction with positive entries
  std::vector<double> c_in;
  double sum_v() const;
};

// Picks the largest mix weight on a 0.01 grid with
// mix_weight * I_a(X_S;Y|X_{S^c}) < sum_{S} c_in - 1e-6 for all S.
MixtureFamily make_mixture_family(const DiscreteMac& mac, const CStarWitness& w, const std::vector<double>& c_in,
                                  double epsilon, const std::vector<double>& v);

// TC_lambda(U) + eps*lambda*sum(v) - h*sum(v).
double lambda_residual(const MixtureFamily& fam, double h, double lambda);
// Largest h for which the defining equation has a root in [0,1).
double lambda_h_max(const MixtureFamily& fam);
// Smallest root in [0,1); lambda*(0) = 0. Throws PreconditionError with
// h_max in the message when there is no root.
double solve_lambda_star(const MixtureFamily& fam, double h);

// Joint pmf over (U_0, U_1..U_k, X_1..X_k, Y) at mixture parameter lambda.
JointPmf family_joint(const MixtureFamily& fam, const DiscreteMac& mac, double lambda);
// zeta_S(h) = h sum_S v - TC_{lambda*}(U_S).
double family_zeta(const MixtureFamily& fam, Mask users, double h, double lambda);

struct GainCurvePoint {
  double h = 0.0;
  double lambda_star = 0.0;
  double r_sum = 0.0;
  double g = 0.0;
  double slope_ratio = 0.0;  // g / h; NaN at h = 0
};

GainCurvePoint achievable_sum_rate(const MixtureFamily& fam, const DiscreteMac& mac, const CfConfig& cfg,
                                   double h);

struct TwoRoundRow {
  double c_out = 0.0;
  double g1 = 0.0;
  double g2_lower = 0.0;
};

struct TwoRoundDemo {
  bool applicable = false;
  int x3_star = 0;
  double g1 = 0.0;
  std::vector<TwoRoundRow> rows;
  double c_out_advantage_max = 0.0;  // largest grid c_out with g2 > g1
};

// Three-user MAC whose third encoder talks to encoders 1 and 2 over links of
// capacity c_out each, with one (g1) or two (g2) conferencing rounds.
TwoRoundDemo two_round_conferencing_demo(const DiscreteMac& mac3, double c_in1, double c_in2,
                                         const std::vector<double>& c_out_grid, double epsilon = 0.1);

// Restricts encoder 3 to a fixed symbol.
DiscreteMac restrict_third_input(const DiscreteMac& mac3, int x3);

}  // namespace cfmac

#endif  // CFMAC_GAIN_HPP_
