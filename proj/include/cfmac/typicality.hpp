#ifndef CFMAC_TYPICALITY_HPP_
#define CFMAC_TYPICALITY_HPP_

#include <cstdint>
#include <vector>

#include "cfmac/pmf.hpp"

namespace cfmac {

using Symbol = std::uint8_t;
using Sequence = std::vector<Symbol>;

struct TypicalityCheck {
  JointPmf base;
  double delta = 0.05;
  int n = 1;
};

struct SubsetDiagnostic {
  Mask axes = 0;
  double empirical = 0.0;  // -(1/n) log2 p(u_A^n); +inf on a zero-probability symbol
  double entropy = 0.0;
  bool ok = false;
};

struct TypicalityReport {
  bool typical = false;
  std::vector<SubsetDiagnostic> subsets;  // every nonempty subset of the axes
};

// Weak joint typicality over every nonempty subset of the base axes.
TypicalityReport is_weakly_typical(const std::vector<Sequence>& sequences, const TypicalityCheck& check);

// Precomputed -log2 p tables for every nonempty subset of the base axes.
class TypicalityTester {
 public:
  TypicalityTester(const JointPmf& base, double delta);

  int rank() const { return rank_; }
  double delta() const { return delta_; }
  double entropy(Mask axes) const { return tables_[axes].entropy; }

  // Sum over t of -log2 p_A(u_{A,t}); +inf as soon as a zero-probability
  // symbol appears. seqs[a] points at the length-n sequence of axis a.
  double neg_log2(Mask axes, const Symbol* const* seqs, int n) const;
  bool subset_ok(Mask axes, const Symbol* const* seqs, int n) const;
  // All nonempty subsets of `within` that contain `must` (must may be 0).
  // Subsets touching a size-1 axis are skipped: they score the same as the
  // subset without it, which callers check at some level of their search.
  bool all_ok(Mask within, Mask must, const Symbol* const* seqs, int n) const;
  // Same, for subsets that meet `any_of`.
  bool all_ok_any(Mask within, Mask any_of, const Symbol* const* seqs, int n) const;
  Mask trivial_axes() const { return trivial_; }

 private:
  struct Table {
    std::vector<int> axes;
    std::vector<std::size_t> strides;
    std::vector<double> neg_log;
    double entropy = 0.0;
  };
  int rank_;
  double delta_;
  Mask trivial_ = 0;
  std::vector<Table> tables_;
};

}  // namespace cfmac

#endif  // CFMAC_TYPICALITY_HPP_
