#ifndef CFMAC_INFO_HPP_
#define CFMAC_INFO_HPP_

#include <vector>

#include "cfmac/channel.hpp"
#include "cfmac/pmf.hpp"

namespace cfmac {

// All measures are in bits. Axis sets are bitmasks over the pmf's axes.

double entropy(const JointPmf& p, Mask axes);
// H(A|C); C may be empty.
double cond_entropy(const JointPmf& p, Mask a, Mask cond);
// I(A;B|C), clamped at 0.
double mutual_information(const JointPmf& p, Mask a, Mask b, Mask cond = 0);
double kl_divergence(const JointPmf& p, const JointPmf& q);
double kl_divergence(const std::vector<double>& p, const std::vector<double>& q);
// sum_{j in axes} H(j|cond) - H(axes|cond).
double total_correlation(const JointPmf& p, Mask axes, Mask cond = 0);

double entropy_of(const std::vector<double>& p);

// p(y) for an input pmf over (X_1..X_k).
JointPmf output_pmf(const DiscreteMac& mac, const JointPmf& input);
// p(x_1..x_k, y) = p(x) p(y|x); the y axis is last.
JointPmf joint_input_output(const DiscreteMac& mac, const JointPmf& input);
// I(X_[k];Y) for an input pmf.
double io_mutual_information(const DiscreteMac& mac, const JointPmf& input);
// D(p(y|x) || q(y)) for one input row; throws on support violation.
double row_divergence(const double* row, const std::vector<double>& q, int ny);

// Appends Y to a pmf whose axes include the k channel inputs at positions
// x_axes[0..k-1]. Used to extend (U_0, U, X) coordination pmfs.
JointPmf attach_output(const DiscreteMac& mac, const JointPmf& p, const std::vector<int>& x_axes);

}  // namespace cfmac

#endif  // CFMAC_INFO_HPP_
