#include "cfmac/pmf.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cfmac {

JointPmf::JointPmf(std::vector<int> sizes, std::vector<double> mass)
    : sizes_(std::move(sizes)), mass_(std::move(mass)) {
  std::size_t n = 1;
  for (int s : sizes_) {
    if (s <= 0) throw std::invalid_argument("pmf: axis size must be positive");
    n *= static_cast<std::size_t>(s);
  }
  if (n != mass_.size()) throw std::invalid_argument("pmf: mass length does not match axis sizes");
  for (double v : mass_) {
    if (!(v >= 0.0)) throw std::invalid_argument("pmf: negative or NaN mass");
  }
  init_strides();
}

void JointPmf::init_strides() {
  strides_.assign(sizes_.size(), 1);
  for (int a = rank() - 2; a >= 0; --a) strides_[a] = strides_[a + 1] * sizes_[a + 1];
}

JointPmf JointPmf::uniform(std::vector<int> sizes) {
  std::size_t n = 1;
  for (int s : sizes) n *= static_cast<std::size_t>(s);
  return JointPmf(std::move(sizes), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

JointPmf JointPmf::point(std::vector<int> sizes, const std::vector<int>& at) {
  std::size_t n = 1;
  for (int s : sizes) n *= static_cast<std::size_t>(s);
  JointPmf p(std::move(sizes), std::vector<double>(n, 0.0));
  p.mass_[p.index(at)] = 1.0;
  return p;
}

JointPmf JointPmf::product(const std::vector<std::vector<double>>& factors) {
  std::vector<int> sizes;
  for (const auto& f : factors) sizes.push_back(static_cast<int>(f.size()));
  std::size_t n = 1;
  for (int s : sizes) n *= static_cast<std::size_t>(s);
  JointPmf p(sizes, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    double v = 1.0;
    std::size_t rem = i;
    for (int a = p.rank() - 1; a >= 0; --a) {
      v *= factors[a][rem % sizes[a]];
      rem /= sizes[a];
    }
    p.mass_[i] = v;
  }
  return p;
}

std::size_t JointPmf::index(const std::vector<int>& symbols) const {
  if (symbols.size() != sizes_.size()) throw std::invalid_argument("pmf: wrong number of symbols");
  std::size_t idx = 0;
  for (int a = 0; a < rank(); ++a) {
    if (symbols[a] < 0 || symbols[a] >= sizes_[a]) throw std::out_of_range("pmf: symbol out of range");
    idx += strides_[a] * symbols[a];
  }
  return idx;
}

std::vector<int> JointPmf::symbols(std::size_t flat) const {
  std::vector<int> s(sizes_.size());
  for (int a = rank() - 1; a >= 0; --a) {
    s[a] = static_cast<int>(flat % sizes_[a]);
    flat /= sizes_[a];
  }
  return s;
}

std::vector<std::size_t> JointPmf::projection(Mask axes) const {
  std::vector<std::size_t> sub_stride(sizes_.size(), 0);
  std::size_t st = 1;
  for (int a = rank() - 1; a >= 0; --a) {
    if (contains(axes, a)) {
      sub_stride[a] = st;
      st *= sizes_[a];
    }
  }
  std::vector<std::size_t> out(mass_.size());
  // Odometer walk keeps this linear in the table size.
  std::vector<int> sym(sizes_.size(), 0);
  std::size_t sub = 0;
  for (std::size_t i = 0; i < mass_.size(); ++i) {
    out[i] = sub;
    for (int a = rank() - 1; a >= 0; --a) {
      if (++sym[a] < sizes_[a]) {
        sub += sub_stride[a];
        break;
      }
      sub -= sub_stride[a] * (sizes_[a] - 1);
      sym[a] = 0;
    }
  }
  return out;
}

JointPmf JointPmf::marginal(Mask axes) const {
  if (axes >> rank()) throw std::invalid_argument("pmf: axis mask out of range");
  std::vector<int> sz;
  for (int a = 0; a < rank(); ++a)
    if (contains(axes, a)) sz.push_back(sizes_[a]);
  std::size_t n = 1;
  for (int s : sz) n *= static_cast<std::size_t>(s);
  std::vector<double> m(n, 0.0);
  auto proj = projection(axes);
  for (std::size_t i = 0; i < mass_.size(); ++i) m[proj[i]] += mass_[i];
  if (sz.empty()) return JointPmf({1}, {total()});
  JointPmf out;
  out.sizes_ = std::move(sz);
  out.mass_ = std::move(m);
  out.init_strides();
  return out;
}

std::vector<double> JointPmf::marginal_of(int axis) const {
  return marginal(Mask{1} << axis).mass();
}

double JointPmf::total() const { return std::accumulate(mass_.begin(), mass_.end(), 0.0); }

void JointPmf::normalize() {
  double t = total();
  if (!(t > 0.0)) throw std::invalid_argument("pmf: cannot normalize zero mass");
  for (double& v : mass_) v /= t;
}

bool JointPmf::is_product(double tol) const {
  std::vector<std::vector<double>> f;
  for (int a = 0; a < rank(); ++a) f.push_back(marginal_of(a));
  JointPmf q = product(f);
  for (std::size_t i = 0; i < mass_.size(); ++i)
    if (std::abs(mass_[i] - q.mass_[i]) > tol) return false;
  return true;
}

bool JointPmf::support_within(const JointPmf& other) const {
  if (other.sizes_ != sizes_) return false;
  for (std::size_t i = 0; i < mass_.size(); ++i)
    if (mass_[i] > 0.0 && other.mass_[i] <= 0.0) return false;
  return true;
}

}  // namespace cfmac
