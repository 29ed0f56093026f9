#include "cfmac/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cfmac {
namespace {

constexpr double kEps = 1e-11;

struct Tableau {
  int m = 0, cols = 0;  // cols excludes the rhs column
  std::vector<std::vector<double>> t;  // m constraint rows, then objective row
  std::vector<int> basis;

  double& rhs(int r) { return t[r][cols]; }

  void pivot(int r, int c) {
    double pv = t[r][c];
    for (double& v : t[r]) v /= pv;
    for (int i = 0; i <= m; ++i) {
      if (i == r) continue;
      double f = t[i][c];
      if (f == 0.0) continue;
      for (int j = 0; j <= cols; ++j) t[i][j] -= f * t[r][j];
      t[i][c] = 0.0;
    }
    basis[r] = c;
  }

  // Objective row holds reduced costs as (z_j - c_j); optimal when all >= 0.
  // Returns false if unbounded.
  bool run(const std::vector<bool>& allowed) {
    for (;;) {
      int enter = -1;
      for (int j = 0; j < cols; ++j) {
        if (allowed[j] && t[m][j] < -kEps) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        if (t[i][enter] <= kEps) continue;
        double ratio = t[i][cols] / t[i][enter];
        if (leave < 0 || ratio < best - kEps ||
            (ratio <= best + kEps && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  }
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp) {
  const int n = lp.num_vars;
  const int m = static_cast<int>(lp.rows.size());
  if (static_cast<int>(lp.objective.size()) != n) throw std::invalid_argument("lp: objective size");
  if (lp.rels.size() != lp.rows.size() || lp.rhs.size() != lp.rows.size())
    throw std::invalid_argument("lp: row metadata size");

  // Normalize to nonnegative right-hand sides.
  std::vector<std::vector<double>> a = lp.rows;
  std::vector<Rel> rel = lp.rels;
  std::vector<double> b = lp.rhs;
  for (int i = 0; i < m; ++i) {
    if (static_cast<int>(a[i].size()) != n) throw std::invalid_argument("lp: row size");
    if (b[i] < 0.0) {
      for (double& v : a[i]) v = -v;
      b[i] = -b[i];
      if (rel[i] == Rel::kLe) rel[i] = Rel::kGe;
      else if (rel[i] == Rel::kGe) rel[i] = Rel::kLe;
    }
  }
  int n_slack = 0, n_art = 0;
  for (Rel r : rel) {
    if (r != Rel::kEq) ++n_slack;
    if (r != Rel::kLe) ++n_art;
  }
  Tableau tb;
  tb.m = m;
  tb.cols = n + n_slack + n_art;
  tb.t.assign(m + 1, std::vector<double>(tb.cols + 1, 0.0));
  tb.basis.assign(m, -1);
  int s = n, art = n + n_slack;
  std::vector<bool> is_art(tb.cols, false);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) tb.t[i][j] = a[i][j];
    tb.rhs(i) = b[i];
    if (rel[i] == Rel::kLe) {
      tb.t[i][s] = 1.0;
      tb.basis[i] = s++;
    } else {
      if (rel[i] == Rel::kGe) tb.t[i][s++] = -1.0;
      tb.t[i][art] = 1.0;
      is_art[art] = true;
      tb.basis[i] = art++;
    }
  }

  std::vector<bool> allowed(tb.cols, true);
  if (n_art > 0) {
    // Phase 1: maximize -sum(artificials), i.e. reduced costs = -sum of their rows.
    for (int i = 0; i < m; ++i) {
      if (!is_art[tb.basis[i]]) continue;
      for (int j = 0; j <= tb.cols; ++j) tb.t[m][j] -= tb.t[i][j];
    }
    for (int j = 0; j < tb.cols; ++j)
      if (is_art[j]) tb.t[m][j] = 0.0;
    tb.run(allowed);
    if (tb.t[m][tb.cols] < -1e-9) return {LpStatus::kInfeasible, 0.0, {}};
    // Drive remaining artificial variables out of the basis.
    for (int i = 0; i < m; ++i) {
      if (!is_art[tb.basis[i]]) continue;
      for (int j = 0; j < tb.cols; ++j) {
        if (!is_art[j] && std::abs(tb.t[i][j]) > 1e-9) {
          tb.pivot(i, j);
          break;
        }
      }
    }
    for (int j = 0; j < tb.cols; ++j)
      if (is_art[j]) allowed[j] = false;
  }

  // Phase 2 objective row: z_j - c_j expressed in the current basis.
  std::fill(tb.t[m].begin(), tb.t[m].end(), 0.0);
  for (int j = 0; j < n; ++j) tb.t[m][j] = -lp.objective[j];
  for (int i = 0; i < m; ++i) {
    int bj = tb.basis[i];
    if (bj < n && lp.objective[bj] != 0.0) {
      double f = tb.t[m][bj];
      for (int j = 0; j <= tb.cols; ++j) tb.t[m][j] -= f * tb.t[i][j];
    }
  }
  for (int i = 0; i < m; ++i)
    if (is_art[tb.basis[i]]) tb.rhs(i) = 0.0;  // redundant row, artificial stuck at zero
  if (!tb.run(allowed)) return {LpStatus::kUnbounded, std::numeric_limits<double>::infinity(), {}};

  LpResult res;
  res.status = LpStatus::kOptimal;
  res.x.assign(n, 0.0);
  for (int i = 0; i < m; ++i)
    if (tb.basis[i] < n) res.x[tb.basis[i]] = std::max(0.0, tb.rhs(i));
  res.value = 0.0;
  for (int j = 0; j < n; ++j) res.value += lp.objective[j] * res.x[j];
  return res;
}

}  // namespace cfmac
