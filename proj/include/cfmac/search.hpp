#ifndef CFMAC_SEARCH_HPP_
#define CFMAC_SEARCH_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "cfmac/channel.hpp"
#include "cfmac/pmf.hpp"

namespace cfmac {

using Blocks = std::vector<std::vector<double>>;

// Linear constraint sum_x table[x] p(x) <= budget on one block.
struct BlockConstraint {
  std::vector<double> table;
  double budget = 0.0;
};

struct AscentOptions {
  int max_sweeps = 400;
  double tol = 1e-12;
  int golden_iters = 64;
};

// Maximizes f over a product of probability simplices by golden-section
// line searches along pairwise mass transfers. Each constrained block must
// start feasible and stays feasible. Returns the final objective value.
// Locally optimal only; callers supply several starts.
double coordinate_ascent(Blocks& blocks, const std::function<double(const Blocks&)>& f,
                         const std::vector<std::optional<BlockConstraint>>& constraints,
                         const AscentOptions& opts = {});

// Makes p satisfy the constraint by mixing toward the cheapest symbol.
// Throws PreconditionError when even that symbol exceeds the budget.
void make_feasible(std::vector<double>& p, const BlockConstraint& c);

// Lattice points of the probability simplex of dimension `size` with the
// given denominator.
std::vector<std::vector<double>> simplex_lattice(int size, int denominator);

struct ProductSearchOptions {
  int random_starts = 6;
  int grid_denominator = 4;  // coarse grid, best few used as starts
  int grid_starts = 3;
  int max_iters = 20000;
  double tol = 1e-11;        // on the Blahut-Arimoto gap
  std::uint64_t seed = 0;
};

struct ProductSearchResult {
  Blocks marginals;
  JointPmf input;
  double value = 0.0;
  double gap = 0.0;  // max_j max_x g_j(x) - I; zero at a block stationary point
  bool converged = false;
  int starts_tried = 0;
};

// Best I(X_[k];Y) over product input pmfs satisfying the channel's costs.
ProductSearchResult max_product_mi(const DiscreteMac& mac, const ProductSearchOptions& opts = {});

// g_j(x_j) = E_{x_-j}[ D(p(y|x) || p(y)) ] for the product pmf given by blocks.
std::vector<std::vector<double>> block_gradients(const DiscreteMac& mac, const Blocks& marginals);

}  // namespace cfmac

#endif  // CFMAC_SEARCH_HPP_
