#include "cfmac/typicality.hpp"

#include <cmath>
#include <limits>

#include "cfmac/errors.hpp"
#include "cfmac/info.hpp"

namespace cfmac {

TypicalityTester::TypicalityTester(const JointPmf& base, double delta) : rank_(base.rank()), delta_(delta) {
  if (!(delta > 0.0)) throw ConfigError("typicality delta must be positive");
  if (rank_ > 16) throw ConfigError("too many axes for subset typicality");
  tables_.resize(std::size_t{1} << rank_);
  for (int a = 0; a < rank_; ++a)
    if (base.sizes()[a] == 1) trivial_ |= Mask{1} << a;
  for (Mask a = 1; a < (Mask{1} << rank_); ++a) {
    Table& t = tables_[a];
    JointPmf m = base.marginal(a);
    for (int ax = 0; ax < rank_; ++ax)
      if (contains(a, ax)) t.axes.push_back(ax);
    t.strides.resize(t.axes.size());
    for (std::size_t i = 0; i < t.axes.size(); ++i) t.strides[i] = m.stride(static_cast<int>(i));
    t.neg_log.resize(m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
      t.neg_log[i] = m[i] > 0.0 ? -std::log2(m[i]) : std::numeric_limits<double>::infinity();
    t.entropy = entropy_of(m.mass());
  }
}

double TypicalityTester::neg_log2(Mask axes, const Symbol* const* seqs, int n) const {
  const Table& t = tables_[axes];
  const std::size_t na = t.axes.size();
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    std::size_t idx = 0;
    for (std::size_t a = 0; a < na; ++a) idx += seqs[t.axes[a]][i] * t.strides[a];
    const double v = t.neg_log[idx];
    if (std::isinf(v)) return v;
    s += v;
  }
  return s;
}

bool TypicalityTester::subset_ok(Mask axes, const Symbol* const* seqs, int n) const {
  const double e = neg_log2(axes, seqs, n) / n;
  return std::abs(e - tables_[axes].entropy) <= delta_;
}

bool TypicalityTester::all_ok(Mask within, Mask must, const Symbol* const* seqs, int n) const {
  for (Mask a = within; a; a = (a - 1) & within)
    if ((a & must) == must && !(a & trivial_) && !subset_ok(a, seqs, n)) return false;
  return true;
}

bool TypicalityTester::all_ok_any(Mask within, Mask any_of, const Symbol* const* seqs, int n) const {
  for (Mask a = within; a; a = (a - 1) & within)
    if ((a & any_of) && !(a & trivial_) && !subset_ok(a, seqs, n)) return false;
  return true;
}

TypicalityReport is_weakly_typical(const std::vector<Sequence>& sequences, const TypicalityCheck& check) {
  const int r = check.base.rank();
  if (static_cast<int>(sequences.size()) != r) throw ConfigError("need one sequence per axis");
  if (check.n < 1) throw ConfigError("n must be positive");
  std::vector<const Symbol*> ptrs;
  for (int a = 0; a < r; ++a) {
    if (static_cast<int>(sequences[a].size()) != check.n) throw ConfigError("sequence length differs from n");
    for (Symbol s : sequences[a])
      if (s >= check.base.sizes()[a]) throw ConfigError("symbol outside the alphabet of axis " + std::to_string(a));
    ptrs.push_back(sequences[a].data());
  }
  TypicalityTester tester(check.base, check.delta);
  TypicalityReport rep;
  rep.typical = true;
  for (Mask a = 1; a < (Mask{1} << r); ++a) {
    SubsetDiagnostic d;
    d.axes = a;
    d.empirical = tester.neg_log2(a, ptrs.data(), check.n) / check.n;
    d.entropy = tester.entropy(a);
    d.ok = std::abs(d.empirical - d.entropy) <= check.delta;
    rep.typical = rep.typical && d.ok;
    rep.subsets.push_back(d);
  }
  return rep;
}

}  // namespace cfmac
