#include "cfmac/info.hpp"

#include <cmath>
#include <sstream>

#include "cfmac/errors.hpp"

namespace cfmac {

double entropy_of(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log2(v);
  return h < 0.0 ? 0.0 : h;
}

double entropy(const JointPmf& p, Mask axes) {
  if (axes == 0) throw ConfigError("entropy: empty axis set");
  if (axes >> p.rank()) throw ConfigError("entropy: axis out of range");
  if (axes == full_mask(p.rank())) return entropy_of(p.mass());
  return entropy_of(p.marginal(axes).mass());
}

namespace {
double h0(const JointPmf& p, Mask axes) { return axes == 0 ? 0.0 : entropy(p, axes); }
}  // namespace

double cond_entropy(const JointPmf& p, Mask a, Mask cond) {
  if (a & cond) throw ConfigError("cond_entropy: overlapping axis sets");
  double v = h0(p, a | cond) - h0(p, cond);
  return v < 0.0 ? 0.0 : v;
}

double mutual_information(const JointPmf& p, Mask a, Mask b, Mask cond) {
  if ((a & b) || (a & cond) || (b & cond))
    throw ConfigError("mutual_information: overlapping axis sets");
  if (a == 0 || b == 0) return 0.0;
  double v = h0(p, a | cond) + h0(p, b | cond) - h0(p, a | b | cond) - h0(p, cond);
  return v < 0.0 ? 0.0 : v;
}

double kl_divergence(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw ConfigError("kl_divergence: shape mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) {
      std::ostringstream os;
      os << "kl_divergence: support violation at index " << i;
      throw PreconditionError(os.str());
    }
    d += p[i] * std::log2(p[i] / q[i]);
  }
  return d < 0.0 ? 0.0 : d;
}

double kl_divergence(const JointPmf& p, const JointPmf& q) {
  if (p.sizes() != q.sizes()) throw ConfigError("kl_divergence: shape mismatch");
  return kl_divergence(p.mass(), q.mass());
}

double total_correlation(const JointPmf& p, Mask axes, Mask cond) {
  if (axes == 0) throw ConfigError("total_correlation: empty axis set");
  if (axes & cond) throw ConfigError("total_correlation: axes overlap the condition");
  double s = 0.0;
  for (int a = 0; a < p.rank(); ++a)
    if (contains(axes, a)) s += cond_entropy(p, Mask{1} << a, cond);
  double v = s - cond_entropy(p, axes, cond);
  return v < 0.0 ? 0.0 : v;
}

namespace {
void check_input_shape(const DiscreteMac& mac, const JointPmf& input) {
  if (input.sizes() != mac.input_sizes) throw ConfigError("input pmf shape does not match channel inputs");
}
}  // namespace

JointPmf output_pmf(const DiscreteMac& mac, const JointPmf& input) {
  check_input_shape(mac, input);
  std::vector<double> py(mac.output_size, 0.0);
  for (std::size_t r = 0; r < input.size(); ++r) {
    double w = input[r];
    if (w == 0.0) continue;
    const double* row = mac.row(r);
    for (int y = 0; y < mac.output_size; ++y) py[y] += w * row[y];
  }
  return JointPmf({mac.output_size}, std::move(py));
}

JointPmf joint_input_output(const DiscreteMac& mac, const JointPmf& input) {
  check_input_shape(mac, input);
  std::vector<int> sizes = mac.input_sizes;
  sizes.push_back(mac.output_size);
  std::vector<double> m(input.size() * mac.output_size);
  for (std::size_t r = 0; r < input.size(); ++r)
    for (int y = 0; y < mac.output_size; ++y) m[r * mac.output_size + y] = input[r] * mac.row(r)[y];
  return JointPmf(std::move(sizes), std::move(m));
}

double row_divergence(const double* row, const std::vector<double>& q, int ny) {
  double d = 0.0;
  for (int y = 0; y < ny; ++y) {
    if (row[y] <= 0.0) continue;
    if (q[y] <= 0.0) throw PreconditionError("row_divergence: output support violation");
    d += row[y] * std::log2(row[y] / q[y]);
  }
  return d;
}

double io_mutual_information(const DiscreteMac& mac, const JointPmf& input) {
  const auto py = output_pmf(mac, input).mass();
  double i = 0.0;
  for (std::size_t r = 0; r < input.size(); ++r)
    if (input[r] > 0.0) i += input[r] * row_divergence(mac.row(r), py, mac.output_size);
  return i < 0.0 ? 0.0 : i;
}

JointPmf attach_output(const DiscreteMac& mac, const JointPmf& p, const std::vector<int>& x_axes) {
  if (static_cast<int>(x_axes.size()) != mac.k) throw ConfigError("attach_output: need one axis per input");
  for (int j = 0; j < mac.k; ++j)
    if (p.sizes().at(x_axes[j]) != mac.input_sizes[j])
      throw ConfigError("attach_output: input axis size mismatch");
  std::vector<int> sizes = p.sizes();
  sizes.push_back(mac.output_size);
  std::vector<double> m(p.size() * mac.output_size, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    auto s = p.symbols(i);
    std::size_t r = 0;
    for (int j = 0; j < mac.k; ++j) r = r * mac.input_sizes[j] + s[x_axes[j]];
    for (int y = 0; y < mac.output_size; ++y) m[i * mac.output_size + y] = p[i] * mac.row(r)[y];
  }
  return JointPmf(std::move(sizes), std::move(m));
}

}  // namespace cfmac
