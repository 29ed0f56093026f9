#include "cfmac/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cfmac/errors.hpp"
#include "cfmac/info.hpp"
#include "cfmac/rng.hpp"

namespace cfmac {

namespace {

constexpr double kInvPhi = 0.6180339887498949;

double cost_of(const std::vector<double>& p, const BlockConstraint& c) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += p[i] * c.table[i];
  return s;
}

std::vector<double> random_simplex(int n, Rng& rng) {
  std::vector<double> p(n);
  double s = 0.0;
  for (double& v : p) s += (v = -std::log(1.0 - uniform01(rng)));
  for (double& v : p) v /= s;
  return p;
}

}  // namespace

void make_feasible(std::vector<double>& p, const BlockConstraint& c) {
  double cost = cost_of(p, c);
  if (cost <= c.budget) return;
  int cheap = static_cast<int>(std::min_element(c.table.begin(), c.table.end()) - c.table.begin());
  double cmin = c.table[cheap];
  if (cmin > c.budget) throw PreconditionError("cost budget below the cheapest symbol");
  double theta = (cost - c.budget) / (cost - cmin);
  theta = std::min(1.0, theta * (1.0 + 1e-12) + 1e-15);
  for (double& v : p) v *= (1.0 - theta);
  p[cheap] += theta;
}

double coordinate_ascent(Blocks& blocks, const std::function<double(const Blocks&)>& f,
                         const std::vector<std::optional<BlockConstraint>>& constraints,
                         const AscentOptions& opts) {
  double best = f(blocks);
  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    const double start = best;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      auto& p = blocks[b];
      const int n = static_cast<int>(p.size());
      const BlockConstraint* con =
          (b < constraints.size() && constraints[b]) ? &*constraints[b] : nullptr;
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          // Move t from j to i; t in [-p_i, p_j] intersected with the budget.
          double lo = -p[i], hi = p[j];
          if (con) {
            double slack = std::max(0.0, con->budget - cost_of(p, *con));
            double dc = con->table[i] - con->table[j];
            if (dc > 0) hi = std::min(hi, slack / dc);
            else if (dc < 0) lo = std::max(lo, slack / dc);
          }
          if (hi - lo < 1e-15) continue;
          const double pi = p[i], pj = p[j];
          auto eval = [&](double t) {
            p[i] = std::max(0.0, pi + t);
            p[j] = std::max(0.0, pj - t);
            double v = f(blocks);
            p[i] = pi;
            p[j] = pj;
            return v;
          };
          double a = lo, c = hi;
          double x1 = c - kInvPhi * (c - a), x2 = a + kInvPhi * (c - a);
          double f1 = eval(x1), f2 = eval(x2);
          for (int it = 0; it < opts.golden_iters && c - a > 1e-14; ++it) {
            if (f1 < f2) {
              a = x1;
              x1 = x2;
              f1 = f2;
              x2 = a + kInvPhi * (c - a);
              f2 = eval(x2);
            } else {
              c = x2;
              x2 = x1;
              f2 = f1;
              x1 = c - kInvPhi * (c - a);
              f1 = eval(x1);
            }
          }
          // Endpoints matter: optima often sit on a face of the simplex.
          double cand[4] = {x1, x2, lo, hi};
          double bt = 0.0, bv = best;
          for (double t : cand) {
            double v = eval(t);
            if (v > bv) {
              bv = v;
              bt = t;
            }
          }
          if (bv > best) {
            p[i] = std::max(0.0, pi + bt);
            p[j] = std::max(0.0, pj - bt);
            best = bv;
          }
        }
      }
    }
    if (best - start <= opts.tol) break;
  }
  return best;
}

std::vector<std::vector<double>> simplex_lattice(int size, int denominator) {
  std::vector<std::vector<double>> out;
  std::vector<int> c(size, 0);
  // Enumerate compositions of `denominator` into `size` parts.
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == size - 1) {
      c[pos] = left;
      std::vector<double> p(size);
      for (int i = 0; i < size; ++i) p[i] = static_cast<double>(c[i]) / denominator;
      out.push_back(std::move(p));
      return;
    }
    for (int v = 0; v <= left; ++v) {
      c[pos] = v;
      rec(pos + 1, left - v);
    }
  };
  rec(0, denominator);
  return out;
}

std::vector<std::vector<double>> block_gradients(const DiscreteMac& mac, const Blocks& marginals) {
  JointPmf input = JointPmf::product(marginals);
  const auto py = output_pmf(mac, input).mass();
  std::vector<std::vector<double>> g(mac.k);
  for (int j = 0; j < mac.k; ++j) g[j].assign(mac.input_sizes[j], 0.0);
  for (std::size_t r = 0; r < input.size(); ++r) {
    auto x = input.symbols(r);
    double d = -1.0;
    for (int j = 0; j < mac.k; ++j) {
      double rest = 1.0;
      for (int i = 0; i < mac.k; ++i)
        if (i != j) rest *= marginals[i][x[i]];
      if (rest == 0.0) continue;
      if (d < 0.0) d = row_divergence(mac.row(r), py, mac.output_size);
      g[j][x[j]] += rest * d;
    }
  }
  return g;
}

namespace {

double product_mi(const DiscreteMac& mac, const Blocks& m) {
  return io_mutual_information(mac, JointPmf::product(m));
}

// Block Blahut-Arimoto: each block update is the alternating-maximization
// step for I(X_j;Y) plus a term linear in p_j, so I never decreases.
double blahut_arimoto(const DiscreteMac& mac, Blocks& m, const ProductSearchOptions& opts,
                      double* gap) {
  double value = product_mi(mac, m);
  for (int it = 0; it < opts.max_iters; ++it) {
    for (int j = 0; j < mac.k; ++j) {
      auto g = block_gradients(mac, m);
      double z = 0.0;
      for (std::size_t x = 0; x < m[j].size(); ++x) z += (m[j][x] *= std::exp2(g[j][x]));
      for (double& v : m[j]) v /= z;
    }
    value = product_mi(mac, m);
    auto g = block_gradients(mac, m);
    double gmax = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < mac.k; ++j)
      for (std::size_t x = 0; x < g[j].size(); ++x) gmax = std::max(gmax, g[j][x]);
    *gap = gmax - value;
    if (*gap < opts.tol) break;
  }
  return value;
}

}  // namespace

ProductSearchResult max_product_mi(const DiscreteMac& mac, const ProductSearchOptions& opts) {
  require_valid(mac);
  const bool has_costs = !mac.costs.empty();
  std::vector<std::optional<BlockConstraint>> cons(mac.k);
  if (has_costs)
    for (int j = 0; j < mac.k; ++j) cons[j] = BlockConstraint{mac.costs[j].table, mac.costs[j].budget};

  // Starts: best points of a coarse product grid, then random points.
  std::vector<Blocks> starts;
  {
    std::vector<std::vector<std::vector<double>>> lat(mac.k);
    std::size_t combos = 1;
    for (int j = 0; j < mac.k; ++j) {
      lat[j] = simplex_lattice(mac.input_sizes[j], opts.grid_denominator);
      combos *= lat[j].size();
    }
    std::vector<std::pair<double, Blocks>> scored;
    if (combos <= 20000) {
      for (std::size_t c = 0; c < combos; ++c) {
        Blocks b(mac.k);
        std::size_t rem = c;
        for (int j = 0; j < mac.k; ++j) {
          b[j] = lat[j][rem % lat[j].size()];
          rem /= lat[j].size();
        }
        bool ok = true;
        for (int j = 0; j < mac.k && ok; ++j)
          if (cons[j] && cost_of(b[j], *cons[j]) > cons[j]->budget) ok = false;
        if (ok) scored.emplace_back(product_mi(mac, b), std::move(b));
      }
      std::stable_sort(scored.begin(), scored.end(),
                       [](const auto& a, const auto& b) { return a.first > b.first; });
    }
    for (int s = 0; s < opts.grid_starts && s < static_cast<int>(scored.size()); ++s)
      starts.push_back(scored[s].second);
    Rng rng = derive_rng(opts.seed, 0x5eed);
    for (int s = 0; s < opts.random_starts; ++s) {
      Blocks b(mac.k);
      for (int j = 0; j < mac.k; ++j) {
        b[j] = random_simplex(mac.input_sizes[j], rng);
        if (cons[j]) make_feasible(b[j], *cons[j]);
      }
      starts.push_back(std::move(b));
    }
  }

  ProductSearchResult best;
  best.value = -1.0;
  for (auto& m : starts) {
    double gap = 0.0, v;
    if (!has_costs) {
      // Blahut-Arimoto cannot revive a zero mass, so keep starts interior.
      for (auto& b : m) {
        for (double& x : b) x = 0.98 * x + 0.02 / b.size();
      }
      v = blahut_arimoto(mac, m, opts, &gap);
    } else {
      v = coordinate_ascent(m, [&](const Blocks& b) { return product_mi(mac, b); }, cons);
      gap = 0.0;
    }
    ++best.starts_tried;
    if (v > best.value) {
      best.value = v;
      best.marginals = m;
      best.gap = gap;
    }
  }
  for (auto& b : best.marginals) {
    for (double& x : b)
      if (x < 1e-10) x = 0.0;
    double s = 0.0;
    for (double x : b) s += x;
    for (double& x : b) x /= s;
  }
  best.input = JointPmf::product(best.marginals);
  best.value = io_mutual_information(mac, best.input);
  best.converged = has_costs || best.gap < std::max(opts.tol, 1e-8);
  return best;
}

}  // namespace cfmac
