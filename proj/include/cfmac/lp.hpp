#ifndef CFMAC_LP_HPP_
#define CFMAC_LP_HPP_

#include <vector>

namespace cfmac {

enum class Rel { kLe, kGe, kEq };
enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

// maximize c.x subject to rows (a_i . x rel b_i) and x >= 0.
struct LinearProgram {
  int num_vars = 0;
  std::vector<double> objective;
  std::vector<std::vector<double>> rows;
  std::vector<Rel> rels;
  std::vector<double> rhs;

  void add(std::vector<double> row, Rel rel, double b) {
    rows.push_back(std::move(row));
    rels.push_back(rel);
    rhs.push_back(b);
  }
};

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  double value = 0.0;
  std::vector<double> x;
};

// Dense two-phase simplex with Bland's rule. Meant for the small problems
// in this library (tens of variables, hundreds of rows).
LpResult solve_lp(const LinearProgram& lp);

}  // namespace cfmac

#endif  // CFMAC_LP_HPP_
