#include "cfmac/gain.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "cfmac/errors.hpp"
#include "cfmac/info.hpp"
#include "cfmac/io.hpp"
#include "cfmac/lp.hpp"

namespace cfmac {

CStarWitness evaluate_witness(const DiscreteMac& mac, const JointPmf& p_ind, const JointPmf& p_dep) {
  if (p_ind.sizes() != mac.input_sizes || p_dep.sizes() != mac.input_sizes)
    throw ConfigError("witness pmfs must match the channel inputs");
  if (!p_dep.support_within(p_ind)) throw PreconditionError("p_dep has mass outside the support of p_ind");
  CStarWitness w{p_ind, p_dep};
  w.i_ind = io_mutual_information(mac, p_ind);
  w.i_dep = io_mutual_information(mac, p_dep);
  w.d_out = kl_divergence(output_pmf(mac, p_dep), output_pmf(mac, p_ind));
  w.margin = w.i_dep + w.d_out - w.i_ind;
  return w;
}

std::optional<CStarWitness> cstar_test(const DiscreteMac& mac, const ProductSearchOptions& opts) {
  require_valid(mac);
  for (int s : mac.input_sizes)
    if (s > 4) throw ConfigError("cstar_test supports input alphabets of size at most 4");
  if (mac.k == 1) return std::nullopt;
  auto best = max_product_mi(mac, opts);
  if (!best.converged) {
    std::ostringstream os;
    os << "product search did not converge (gap " << best.gap << ", best I=" << best.value << ")";
    throw PreconditionError(os.str());
  }
  const JointPmf& p_ind = best.input;
  const auto q = output_pmf(mac, p_ind).mass();
  std::vector<std::size_t> support;
  for (std::size_t x = 0; x < p_ind.size(); ++x)
    if (p_ind[x] > 0.0) support.push_back(x);

  LinearProgram lp;
  lp.num_vars = static_cast<int>(support.size());
  for (std::size_t x : support) lp.objective.push_back(row_divergence(mac.row(x), q, mac.output_size));
  lp.add(std::vector<double>(support.size(), 1.0), Rel::kEq, 1.0);
  if (!mac.costs.empty()) {
    for (int j = 0; j < mac.k; ++j) {
      std::vector<double> row;
      for (std::size_t x : support) row.push_back(mac.costs[j].table[p_ind.symbols(x)[j]]);
      lp.add(std::move(row), Rel::kLe, mac.costs[j].budget);
    }
  }
  auto res = solve_lp(lp);
  if (res.status != LpStatus::kOptimal) throw PreconditionError("witness LP failed");
  std::vector<double> m(p_ind.size(), 0.0);
  for (std::size_t i = 0; i < support.size(); ++i) m[support[i]] = res.x[i];
  JointPmf p_dep(mac.input_sizes, m);
  p_dep.normalize();
  auto w = evaluate_witness(mac, p_ind, p_dep);
  if (!(w.margin > 1e-6)) return std::nullopt;
  return w;
}

bool gaussian_cstar(const std::vector<double>& powers) {
  int positive = 0;
  for (double p : powers) {
    if (!(p >= 0.0)) throw ConfigError("powers must be nonnegative");
    if (p > 0.0) ++positive;
  }
  return positive >= 2;
}

JointPmf mix(const JointPmf& p_a, const JointPmf& p_b, double lambda) {
  if (p_a.sizes() != p_b.sizes()) throw ConfigError("mixture components differ in shape");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("mixture weight must lie in [0,1]");
  std::vector<double> m(p_a.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = (1.0 - lambda) * p_a[i] + lambda * p_b[i];
  return JointPmf(p_a.sizes(), std::move(m));
}

double mixture_entropy_derivative(const JointPmf& p_a, const JointPmf& p_b, double lambda, Mask axes) {
  const auto a = p_a.marginal(axes).mass();
  const auto b = p_b.marginal(axes).mass();
  const auto l = mix(p_a, p_b, lambda).marginal(axes).mass();
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double diff = b[i] - a[i];
    if (diff == 0.0) continue;
    if (l[i] <= 0.0) throw PreconditionError("entropy derivative undefined: mixture has zero mass where p_b - p_a != 0");
    d -= diff * std::log2(l[i]);
  }
  return d;
}

double mixture_mi_derivative(const DiscreteMac& mac, const JointPmf& p_a, const JointPmf& p_b, double lambda) {
  const JointPmf pl = mix(p_a, p_b, lambda);
  const auto q = output_pmf(mac, pl).mass();
  double d = 0.0;
  for (std::size_t x = 0; x < pl.size(); ++x) {
    double diff = p_b[x] - p_a[x];
    if (diff == 0.0) continue;
    d += diff * row_divergence(mac.row(x), q, mac.output_size);
  }
  return d;
}

double mixture_tc_derivative_at_zero(const JointPmf& p_a, const JointPmf& p_b, Mask axes) {
  if (!p_a.marginal(axes).is_product()) throw PreconditionError("p_a is not a product on the given axes");
  if (!p_b.support_within(p_a)) throw PreconditionError("support of p_b is not within support of p_a");
  double d = -mixture_entropy_derivative(p_a, p_b, 0.0, axes);
  for (int a = 0; a < p_a.rank(); ++a)
    if (contains(axes, a)) d += mixture_entropy_derivative(p_a, p_b, 0.0, Mask{1} << a);
  return d;
}

double MixtureFamily::sum_v() const {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

MixtureFamily make_mixture_family(const DiscreteMac& mac, const CStarWitness& w, const std::vector<double>& c_in,
                                  double epsilon, const std::vector<double>& v) {
  const int k = mac.k;
  if (static_cast<int>(c_in.size()) != k || static_cast<int>(v.size()) != k)
    throw ConfigError("c_in and v need one entry per encoder");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  double norm = 0.0;
  for (double x : v) {
    if (!(x > 0.0)) throw ConfigError("direction v must be strictly positive");
    norm += x * x;
  }
  if (std::abs(std::sqrt(norm) - 1.0) > 1e-9) throw ConfigError("direction v must have unit length");
  const JointPmf ja = joint_input_output(mac, w.p_ind);
  const Mask y = Mask{1} << k;
  std::vector<double> ia(std::size_t{1} << k, 0.0);
  for (Mask s = 1; s <= full_mask(k); ++s) ia[s] = mutual_information(ja, s, y, full_mask(k) & ~s);
  for (int step = 99; step >= 1; --step) {
    double mu = step / 100.0;
    bool ok = true;
    for (Mask s = 1; s <= full_mask(k) && ok; ++s) {
      double cs = 0.0;
      for (int j = 0; j < k; ++j)
        if (contains(s, j)) cs += c_in[j];
      ok = mu * ia[s] < cs - 1e-6;
    }
    if (ok) return MixtureFamily{w.p_ind, w.p_dep, mu, epsilon, v, c_in};
  }
  throw PreconditionError("no mix weight on the 0.01 grid satisfies mu*I_a(X_S;Y|X_S^c) < sum_S C_in");
}

double lambda_residual(const MixtureFamily& fam, double h, double lambda) {
  const double sv = fam.sum_v();
  const JointPmf pl = mix(fam.p_a, fam.p_b, lambda);
  return total_correlation(pl, full_mask(pl.rank())) + fam.epsilon * lambda * sv - h * sv;
}

namespace {

// Scan points on [0,1): dense geometric near 0, then linear.
const std::vector<double>& lambda_scan() {
  static const std::vector<double> pts = [] {
    std::vector<double> p{0.0};
    for (int i = 0; i <= 560; ++i) p.push_back(std::pow(10.0, -15.0 + i * 14.0 / 560.0));
    for (int i = 1; i < 400; ++i) p.push_back(0.1 + 0.9 * i / 400.0);
    p.push_back(1.0 - 1e-12);
    return p;
  }();
  return pts;
}

}  // namespace

double lambda_h_max(const MixtureFamily& fam) {
  double best = 0.0;
  for (double l : lambda_scan()) best = std::max(best, lambda_residual(fam, 0.0, l) / fam.sum_v());
  return best;
}

double solve_lambda_star(const MixtureFamily& fam, double h) {
  if (!(h >= 0.0)) throw ConfigError("h must be nonnegative");
  if (h == 0.0) return 0.0;
  const auto& pts = lambda_scan();
  double lo = 0.0, hi = -1.0;
  for (double l : pts) {
    if (lambda_residual(fam, h, l) >= 0.0) {
      hi = l;
      break;
    }
    lo = l;
  }
  if (hi < 0.0) {
    std::ostringstream os;
    os << "no root of the lambda equation for h=" << h << "; h_max=" << lambda_h_max(fam);
    throw PreconditionError(os.str());
  }
  // Absolute tolerance 1e-12, tightened for roots near zero.
  while (hi - lo > std::min(1e-12, 1e-9 * hi)) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (lambda_residual(fam, h, mid) >= 0.0) hi = mid;
    else lo = mid;
  }
  return 0.5 * (lo + hi);
}

JointPmf family_joint(const MixtureFamily& fam, const DiscreteMac& mac, double lambda) {
  const int k = mac.k;
  const JointPmf pl = mix(fam.p_a, fam.p_b, lambda);
  std::vector<std::vector<double>> pa(k);
  for (int j = 0; j < k; ++j) pa[j] = fam.p_a.marginal_of(j);
  std::vector<int> sizes{2};
  for (int s : mac.input_sizes) sizes.push_back(s);
  for (int s : mac.input_sizes) sizes.push_back(s);
  const std::size_t nx = pl.size();
  std::vector<double> m(2 * nx * nx, 0.0);
  for (int u0 = 0; u0 < 2; ++u0) {
    const double pu0 = u0 == 1 ? fam.mix_weight : 1.0 - fam.mix_weight;
    for (std::size_t u = 0; u < nx; ++u) {
      if (pl[u] == 0.0) continue;
      const auto us = pl.symbols(u);
      for (std::size_t x = 0; x < nx; ++x) {
        const auto xs = pl.symbols(x);
        double px = 1.0;
        for (int j = 0; j < k && px > 0.0; ++j) px *= u0 == 1 ? (xs[j] == us[j] ? 1.0 : 0.0) : pa[j][xs[j]];
        m[(u0 * nx + u) * nx + x] = pu0 * pl[u] * px;
      }
    }
  }
  JointPmf p(sizes, std::move(m));
  std::vector<int> xa;
  for (int j = 0; j < k; ++j) xa.push_back(1 + k + j);
  return attach_output(mac, p, xa);
}

double family_zeta(const MixtureFamily& fam, Mask users, double h, double lambda) {
  double hv = 0.0;
  for (std::size_t j = 0; j < fam.v.size(); ++j)
    if (contains(users, static_cast<int>(j))) hv += h * fam.v[j];
  if (popcount(users) <= 1) return hv;
  return hv - total_correlation(mix(fam.p_a, fam.p_b, lambda), users);
}

GainCurvePoint achievable_sum_rate(const MixtureFamily& fam, const DiscreteMac& mac, const CfConfig& cfg, double h) {
  const int k = mac.k;
  validate_config(cfg, k);
  const JointPmf ja = joint_input_output(mac, fam.p_a);
  const Mask y = Mask{1} << k;
  const double i_a = mutual_information(ja, full_mask(k), y);
  for (int j = 0; j < k; ++j) {
    if (!(mutual_information(ja, Mask{1} << j, y, full_mask(k) & ~(Mask{1} << j)) > 0.0))
      throw PreconditionError("I_a(X_j;Y|X_-j) is zero for encoder " + std::to_string(j + 1));
  }
  GainCurvePoint pt;
  pt.h = h;
  if (h == 0.0) {
    pt.r_sum = i_a;
    pt.slope_ratio = std::numeric_limits<double>::quiet_NaN();
    return pt;
  }
  const double lam = solve_lambda_star(fam, h);
  pt.lambda_star = lam;

  for (Mask s = 1; s <= full_mask(k); ++s) {
    if (!(family_zeta(fam, s, h, lam) > 0.0))
      throw PreconditionError("zeta_S(h) <= 0 for S=" + mask_to_string(s, k));
  }
  const JointPmf joint = family_joint(fam, mac, lam);
  const CoordLayout L{k};
  const Mask u0 = Mask{1} << L.u0(), ya = Mask{1} << L.y();
  const Mask all = full_mask(k);
  const double zk = family_zeta(fam, all, h, lam);
  auto big_f = [&](Mask s) {
    const Mask sc = all & ~s;
    return mutual_information(joint, L.x_axes(s), ya, u0 | L.u_axes(sc) | L.x_axes(sc)) - zk;
  };
  for (Mask s = 0; s <= all; ++s) {
    for (Mask t = 0; t <= all; ++t) {
      const Mask st = s | t;
      if (st == 0) continue;
      const Mask sc = all & ~s;
      double f = mutual_information(joint, L.x_axes(st), ya, u0 | L.u_axes(sc) | L.x_axes(all & ~st)) - zk;
      for (int j = 0; j < k; ++j)
        if (contains(t & ~s, j)) f += cfg.c_in[j];
      if (f < big_f(st) - 1e-12)
        throw PreconditionError("f_{S,T}(h) < F_{S u T}(h) for S=" + mask_to_string(s, k) +
                                " T=" + mask_to_string(t, k));
    }
  }
  const double i_l = io_mutual_information(mac, mix(fam.p_a, fam.p_b, lam));
  pt.r_sum = fam.mix_weight * i_l + (1.0 - fam.mix_weight) * i_a - k * h * fam.sum_v();
  pt.g = pt.r_sum - i_a;
  pt.slope_ratio = pt.g / h;
  return pt;
}

DiscreteMac restrict_third_input(const DiscreteMac& mac3, int x3) {
  if (mac3.k != 3) throw ConfigError("expected a 3-user channel");
  if (x3 < 0 || x3 >= mac3.input_sizes[2]) throw ConfigError("x3 out of range");
  DiscreteMac m;
  m.k = 2;
  m.input_sizes = {mac3.input_sizes[0], mac3.input_sizes[1]};
  m.output_size = mac3.output_size;
  for (int a = 0; a < m.input_sizes[0]; ++a)
    for (int b = 0; b < m.input_sizes[1]; ++b) {
      const double* row = mac3.row(mac3.input_index({a, b, x3}));
      m.transition.insert(m.transition.end(), row, row + m.output_size);
    }
  if (!mac3.costs.empty()) m.costs = {mac3.costs[0], mac3.costs[1]};
  return m;
}

TwoRoundDemo two_round_conferencing_demo(const DiscreteMac& mac3, double c_in1, double c_in2,
                                         const std::vector<double>& c_out_grid, double epsilon) {
  require_valid(mac3);
  TwoRoundDemo demo;
  demo.g1 = -1.0;
  for (int x3 = 0; x3 < mac3.input_sizes.at(2); ++x3) {
    double v = max_product_mi(restrict_third_input(mac3, x3)).value;
    if (v > demo.g1 + 1e-12) {
      demo.g1 = v;
      demo.x3_star = x3;
    }
  }
  const DiscreteMac induced = restrict_third_input(mac3, demo.x3_star);
  std::optional<MixtureFamily> fam;
  if (auto w = cstar_test(induced)) {
    const double r = 1.0 / std::sqrt(2.0);
    fam = make_mixture_family(induced, *w, {c_in1, c_in2}, epsilon, {r, r});
    demo.applicable = true;
  }
  const CfConfig cfg{{c_in1, c_in2}, {0.0, 0.0}};
  for (double c : c_out_grid) {
    if (!(c >= 0.0)) throw ConfigError("c_out grid must be nonnegative");
    TwoRoundRow row{c, demo.g1, demo.g1};
    if (fam && c > 0.0) {
      // C_out^j = h v_j = c for both encoders.
      try {
        auto pt = achievable_sum_rate(*fam, induced, cfg, std::sqrt(2.0) * c);
        row.g2_lower = demo.g1 + std::max(0.0, pt.g);
      } catch (const PreconditionError&) {
        // Outside the small-h regime: fall back to not cooperating.
      }
    }
    if (row.g2_lower > row.g1) demo.c_out_advantage_max = std::max(demo.c_out_advantage_max, c);
    demo.rows.push_back(row);
  }
  return demo;
}

}  // namespace cfmac
