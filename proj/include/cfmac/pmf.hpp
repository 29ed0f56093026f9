#ifndef CFMAC_PMF_HPP_
#define CFMAC_PMF_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace cfmac {

// Subsets of axes, players or users are bitmasks; bit i is element i.
using Mask = std::uint32_t;

inline int popcount(Mask m) { return __builtin_popcount(m); }
inline bool contains(Mask m, int i) { return (m >> i) & 1u; }
inline Mask full_mask(int k) { return k >= 32 ? ~Mask{0} : (Mask{1} << k) - 1; }

// Probability mass over a product of finite alphabets, flat row-major
// with the last axis varying fastest.
class JointPmf {
 public:
  JointPmf() = default;
  JointPmf(std::vector<int> sizes, std::vector<double> mass);

  static JointPmf uniform(std::vector<int> sizes);
  static JointPmf point(std::vector<int> sizes, const std::vector<int>& at);
  // Product of independent factors, one per axis.
  static JointPmf product(const std::vector<std::vector<double>>& factors);

  int rank() const { return static_cast<int>(sizes_.size()); }
  const std::vector<int>& sizes() const { return sizes_; }
  const std::vector<double>& mass() const { return mass_; }
  std::vector<double>& mutable_mass() { return mass_; }
  std::size_t size() const { return mass_.size(); }
  double operator[](std::size_t i) const { return mass_[i]; }

  std::size_t index(const std::vector<int>& symbols) const;
  std::vector<int> symbols(std::size_t flat) const;
  std::size_t stride(int axis) const { return strides_[axis]; }

  // Marginal on the axes of `axes`, kept in increasing axis order.
  JointPmf marginal(Mask axes) const;
  // Single-axis marginal as a plain vector.
  std::vector<double> marginal_of(int axis) const;

  // For each flat index, the flat index into marginal(axes).
  std::vector<std::size_t> projection(Mask axes) const;

  double total() const;
  void normalize();
  // True when every entry is within tol of the product of its marginals.
  bool is_product(double tol = 1e-9) const;
  // True when support(*this) is contained in support(other).
  bool support_within(const JointPmf& other) const;

  std::vector<std::string> labels;

 private:
  void init_strides();
  std::vector<int> sizes_;
  std::vector<double> mass_;
  std::vector<std::size_t> strides_;
};

}  // namespace cfmac

#endif  // CFMAC_PMF_HPP_
