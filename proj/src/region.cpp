#include "cfmac/region.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <limits>
#include <sstream>

#include "cfmac/errors.hpp"
#include "cfmac/info.hpp"
#include "cfmac/io.hpp"
#include "cfmac/lp.hpp"
#include "cfmac/rng.hpp"
#include "cfmac/search.hpp"
#include "json.hpp"

namespace cfmac {

namespace {

constexpr double kFeasTol = 1e-9;

std::string st_tag(const char* what, Mask s, int k) { return std::string(what) + "=" + mask_to_string(s, k); }

void check_costs(const JointPmf& p, const std::vector<int>& x_axes, const DiscreteMac& mac) {
  if (mac.costs.empty()) return;
  for (int j = 0; j < mac.k; ++j) {
    auto px = p.marginal_of(x_axes[j]);
    double e = 0.0;
    for (std::size_t x = 0; x < px.size(); ++x) e += px[x] * mac.costs[j].table[x];
    if (e > mac.costs[j].budget + 1e-12) {
      std::ostringstream os;
      os << "cost constraint violated for encoder " << j + 1 << ": E[b]=" << e << " > " << mac.costs[j].budget;
      throw PreconditionError(os.str());
    }
  }
}

}  // namespace

Mask CfSplit::sd() const {
  Mask m = 0;
  for (std::size_t j = 0; j < cd.size(); ++j)
    if (cd[j] != 0.0) m |= Mask{1} << j;
  return m;
}

void validate_config(const CfConfig& cfg, int k) {
  if (static_cast<int>(cfg.c_in.size()) != k || static_cast<int>(cfg.c_out.size()) != k)
    throw ConfigError("CF capacities must list one value per encoder");
  for (int j = 0; j < k; ++j)
    if (!(cfg.c_in[j] >= 0.0) || !(cfg.c_out[j] >= 0.0)) throw ConfigError("CF capacities must be nonnegative");
}

void validate_split(const CfSplit& split, const CfConfig& cfg) {
  const int k = static_cast<int>(cfg.c_in.size());
  validate_config(cfg, k);
  if (static_cast<int>(split.c0.size()) != k || static_cast<int>(split.cd.size()) != k)
    throw ConfigError("split must list one value per encoder");
  double c0_total = 0.0;
  for (int j = 0; j < k; ++j) {
    if (!(split.c0[j] >= 0.0) || !(split.cd[j] >= 0.0)) throw ConfigError("split values must be nonnegative");
    c0_total += split.c0[j];
  }
  for (int j = 0; j < k; ++j) {
    if (split.c0[j] > cfg.c_in[j] + 1e-12) throw ConfigError("split: C_j0 exceeds C_in for encoder " + std::to_string(j + 1));
    if (split.cd[j] + c0_total - split.c0[j] > cfg.c_out[j] + 1e-12)
      throw ConfigError("split: C_jd + sum of other C_i0 exceeds C_out for encoder " + std::to_string(j + 1));
  }
}

Mask CoordLayout::u_axes(Mask users) const {
  Mask m = 0;
  for (int j = 0; j < k; ++j)
    if (contains(users, j)) m |= Mask{1} << u(j);
  return m;
}

Mask CoordLayout::x_axes(Mask users) const {
  Mask m = 0;
  for (int j = 0; j < k; ++j)
    if (contains(users, j)) m |= Mask{1} << x(j);
  return m;
}

double factorization_error(const JointPmf& p, Mask base,
                           const std::vector<std::pair<Mask, Mask>>& factors) {
  Mask all = base;
  for (auto [part, cond] : factors) all |= part | cond;
  auto table = [&](Mask m) { return std::make_pair(p.marginal(m).mass(), p.projection(m)); };
  auto [pm, jm] = table(all);
  auto [pb, jb] = table(base);
  std::vector<std::pair<std::vector<double>, std::vector<std::size_t>>> num, den;
  for (auto [part, cond] : factors) {
    num.push_back(table(part | cond));
    den.push_back(cond ? table(cond) : std::make_pair(std::vector<double>{1.0}, std::vector<std::size_t>(p.size(), 0)));
  }
  double err = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double q = pb[jb[i]];
    for (std::size_t f = 0; f < factors.size() && q > 0.0; ++f) {
      double d = den[f].first[den[f].second[i]];
      q = d > 0.0 ? q * num[f].first[num[f].second[i]] / d : 0.0;
    }
    err = std::max(err, std::abs(pm[jm[i]] - q));
  }
  return err;
}

double zeta_value(Mask users, const CfSplit& split, const JointPmf& coord) {
  if (users == 0) return 0.0;
  const int k = static_cast<int>(split.cd.size());
  CoordLayout L{k};
  const Mask sdc = full_mask(k) & ~split.sd();
  const Mask u0 = Mask{1} << L.u0();
  double z = 0.0;
  for (int j = 0; j < k; ++j) {
    if (!contains(users, j)) continue;
    z += split.cd[j] - cond_entropy(coord, Mask{1} << L.u(j), u0);
  }
  // U_S given U_0 and the U's of S_d^c that are not in S.
  Mask cond = u0 | L.u_axes(sdc & ~users);
  return z + cond_entropy(coord, L.u_axes(users), cond);
}

double zeta(Mask users, const CfSplit& split, const JointPmf& coord) {
  if (users == 0) throw ConfigError("zeta: empty set");
  if (users & ~split.sd()) throw ConfigError("zeta: S is not contained in S_d");
  return zeta_value(users, split, coord);
}

Constraint subset_constraint(int k, Mask users, double bound, std::string tag) {
  Constraint c;
  c.coeffs.assign(k, 0.0);
  for (int j = 0; j < k; ++j)
    if (contains(users, j)) c.coeffs[j] = 1.0;
  c.bound = bound;
  c.tag = std::move(tag);
  return c;
}

namespace {

bool satisfied(const Constraint& c, const std::vector<double>& r, double tol) {
  double s = 0.0;
  for (std::size_t j = 0; j < r.size(); ++j) s += c.coeffs[j] * r[j];
  return s <= c.bound + tol;
}

bool all_zero(const Constraint& c) {
  return std::all_of(c.coeffs.begin(), c.coeffs.end(), [](double v) { return v == 0.0; });
}

}  // namespace

bool RateRegion::contains(const std::vector<double>& rates, double tol) const {
  for (double r : rates)
    if (r < -tol) return false;
  for (const auto& c : constraints)
    if (!satisfied(c, rates, tol)) return false;
  for (const auto& g : groups) {
    bool any = false;
    for (const auto& o : g) {
      bool ok = true;
      for (const auto& c : o.constraints) ok = ok && satisfied(c, rates, tol);
      if (ok) {
        any = true;
        break;
      }
    }
    if (!any) return false;
  }
  return true;
}

WeightedSum max_weighted_sum(const RateRegion& region, const std::vector<double>& weights) {
  const int k = region.k;
  if (static_cast<int>(weights.size()) != k) throw ConfigError("weights must have one entry per user");
  for (double w : weights)
    if (!(w >= 0.0)) throw ConfigError("weights must be nonnegative");

  std::vector<const Constraint*> base;
  for (const auto& c : region.constraints) {
    if (all_zero(c)) {
      if (c.bound < -kFeasTol) throw PreconditionError("region is empty: " + c.tag);
      continue;
    }
    base.push_back(&c);
  }
  // Groups reduced to options with live constraints; trivially true groups dropped.
  std::vector<std::vector<std::vector<const Constraint*>>> groups;
  for (const auto& g : region.groups) {
    std::vector<std::vector<const Constraint*>> opts;
    bool always = false;
    for (const auto& o : g) {
      std::vector<const Constraint*> live;
      bool dead = false;
      for (const auto& c : o.constraints) {
        if (all_zero(c)) {
          if (c.bound < -kFeasTol) dead = true;
        } else {
          live.push_back(&c);
        }
      }
      if (dead) continue;
      if (live.empty()) {
        always = true;
        break;
      }
      opts.push_back(std::move(live));
    }
    if (always) continue;
    if (opts.empty()) throw PreconditionError("region is empty: a constraint family has no feasible option");
    groups.push_back(std::move(opts));
  }

  WeightedSum best;
  best.value = -std::numeric_limits<double>::infinity();
  int solves = 0;
  std::vector<const Constraint*> chosen = base;

  auto lp_for = [&](const std::vector<const Constraint*>& cs) {
    LinearProgram lp;
    lp.num_vars = k;
    lp.objective = weights;
    for (const auto* c : cs) lp.add(c->coeffs, Rel::kLe, c->bound);
    ++solves;
    return solve_lp(lp);
  };

  std::function<void()> rec = [&]() {
    auto res = lp_for(chosen);
    if (res.status == LpStatus::kUnbounded)
      throw PreconditionError("weighted sum is unbounded: no constraint covers some weighted user");
    if (res.status != LpStatus::kOptimal) return;
    if (res.value <= best.value + 1e-12) return;
    for (const auto& g : groups) {
      bool any = false;
      for (const auto& o : g) {
        bool ok = true;
        for (const auto* c : o) ok = ok && satisfied(*c, res.x, kFeasTol);
        if (ok) {
          any = true;
          break;
        }
      }
      if (any) continue;
      for (const auto& o : g) {
        const std::size_t mark = chosen.size();
        chosen.insert(chosen.end(), o.begin(), o.end());
        rec();
        chosen.resize(mark);
      }
      return;
    }
    best.value = res.value;
    best.rates = res.x;
  };
  rec();
  if (best.rates.empty()) throw PreconditionError("region is empty");
  best.lp_solves = solves;
  return best;
}

RateRegion inner_bound(const JointPmf& coord, const CfSplit& split, const CfConfig& cfg,
                       const DiscreteMac& mac) {
  require_valid(mac);
  const int k = mac.k;
  CoordLayout L{k};
  validate_config(cfg, k);
  validate_split(split, cfg);
  if (coord.rank() != 2 * k + 1) throw ConfigError("coordination pmf must have axes (U_0, U_1..U_k, X_1..X_k)");
  std::vector<int> xs;
  for (int j = 0; j < k; ++j) xs.push_back(L.x(j));
  const Mask sd = split.sd();
  const Mask sdc = full_mask(k) & ~sd;

  // Factorization p(u0) prod_{Sd^c} p(u_i|u0) p(u_Sd|u0,u_Sd^c) prod p(x_j|u0,u_j).
  {
    const Mask u0 = Mask{1} << L.u0();
    std::vector<std::pair<Mask, Mask>> uf;
    for (int j = 0; j < k; ++j)
      if (contains(sdc, j)) uf.push_back({Mask{1} << L.u(j), u0});
    double e1 = uf.empty() ? 0.0 : factorization_error(coord, u0, uf);
    std::vector<std::pair<Mask, Mask>> xf;
    for (int j = 0; j < k; ++j) xf.push_back({Mask{1} << L.x(j), u0 | (Mask{1} << L.u(j))});
    double e2 = factorization_error(coord, u0 | L.u_axes(full_mask(k)), xf);
    if (e1 > 1e-9 || e2 > 1e-9) throw ConfigError("coordination pmf does not have the required factorization");
  }
  check_costs(coord, xs, mac);
  for (Mask s = sd; s; s = (s - 1) & sd) {
    double z = zeta(s, split, coord);
    if (!(z > 0.0))
      throw PreconditionError("dependence constraint zeta_S > 0 fails for S=" + mask_to_string(s, k));
  }

  const JointPmf py = attach_output(mac, coord, xs);
  const Mask yax = Mask{1} << L.y();
  const Mask u0ax = Mask{1} << L.u0();

  RateRegion r;
  r.k = k;
  r.constraints.push_back(subset_constraint(
      k, full_mask(k), mutual_information(py, L.x_axes(full_mask(k)), yax) - zeta_value(sd, split, coord), "sum"));

  const Mask all = full_mask(k);
  for (Mask s = 0; s <= all; ++s) {
    for (Mask t = 0; t <= all; ++t) {
      if ((s | t) == 0) continue;
      std::vector<RateRegion::Option> opts;
      bool always = false;
      const Mask a_fixed = s & sdc, a_free = s & sd;
      const Mask sc = all & ~s;
      const Mask b_fixed = sc & sdc, b_free = sc & sd;
      for (Mask af = a_free;; af = (af - 1) & a_free) {
        for (Mask bf = b_free;; bf = (bf - 1) & b_free) {
          const Mask a = a_fixed | af, b = b_fixed | bf;
          const Mask w = a | (b & t);
          double gamma = mutual_information(py, L.u_axes(a) | L.x_axes(w), yax,
                                            u0ax | L.u_axes(b) | L.x_axes(b & ~t)) -
                         zeta_value((a | b) & sd, split, coord);
          std::string tag = st_tag("S", s, k) + " " + st_tag("T", t, k) + " " + st_tag("A", a, k) + " " +
                            st_tag("B", b, k);
          if (gamma >= -1e-12) {
            gamma = std::max(gamma, 0.0);
            if (w == 0) always = true;
            RateRegion::Option o;
            o.tag = tag;
            for (Mask v = w; v; v = (v - 1) & w) {
              double bound = gamma;
              for (int j = 0; j < k; ++j) {
                if (!contains(v, j)) continue;
                bound += contains(a, j) ? split.c0[j] : cfg.c_in[j];
              }
              o.constraints.push_back(subset_constraint(k, v, bound, tag + " " + st_tag("W", v, k)));
            }
            opts.push_back(std::move(o));
          }
          if (bf == 0) break;
        }
        if (af == 0) break;
      }
      if (always) continue;
      if (opts.empty())
        throw PreconditionError("no admissible (A,B) for S=" + mask_to_string(s, k) + " T=" + mask_to_string(t, k));
      // A single option is unconditional.
      if (opts.size() == 1) {
        for (auto& c : opts[0].constraints) r.constraints.push_back(std::move(c));
      } else {
        r.groups.push_back(std::move(opts));
      }
    }
  }
  return r;
}

namespace {

RateRegion subset_sum_region(const DiscreteMac& mac, const JointPmf& p, const std::vector<double>& extra,
                             const char* kind) {
  require_valid(mac);
  const int k = mac.k;
  if (p.rank() != k + 1) throw ConfigError(std::string(kind) + ": pmf must have axes (U_0, X_1..X_k)");
  for (int j = 0; j < k; ++j)
    if (p.sizes()[1 + j] != mac.input_sizes[j]) throw ConfigError(std::string(kind) + ": input axis size mismatch");
  std::vector<std::pair<Mask, Mask>> f;
  for (int j = 0; j < k; ++j) f.push_back({Mask{1} << (1 + j), Mask{1}});
  if (factorization_error(p, 1, f) > 1e-9)
    throw ConfigError(std::string(kind) + ": pmf is not of the form p(u0) prod p(x_j|u0)");
  std::vector<int> xs;
  for (int j = 0; j < k; ++j) xs.push_back(1 + j);
  check_costs(p, xs, mac);
  const JointPmf py = attach_output(mac, p, xs);
  const Mask yax = Mask{1} << (k + 1);
  auto xm = [](Mask users) { return users << 1; };
  RateRegion r;
  r.k = k;
  const Mask all = full_mask(k);
  for (Mask s = 1; s <= all; ++s) {
    double b = mutual_information(py, xm(s), yax, 1 | xm(all & ~s));
    for (int j = 0; j < k; ++j)
      if (contains(s, j)) b += extra[j];
    r.constraints.push_back(subset_constraint(k, s, b, st_tag("S", s, k)));
  }
  r.constraints.push_back(subset_constraint(k, all, mutual_information(py, xm(all), yax), "sum"));
  return r;
}

}  // namespace

RateRegion forwarding_bound(const JointPmf& p, const std::vector<double>& c0, const CfConfig& cfg,
                            const DiscreteMac& mac) {
  CfSplit split{c0, std::vector<double>(mac.k, 0.0)};
  validate_split(split, cfg);
  return subset_sum_region(mac, p, c0, "forwarding_bound");
}

RateRegion outer_bound(const DiscreteMac& mac, const CfConfig& cfg, const JointPmf& p) {
  validate_config(cfg, mac.k);
  return subset_sum_region(mac, p, cfg.c_in, "outer_bound");
}

std::vector<double> conferencing_effective_cin(const std::vector<std::vector<double>>& c) {
  const std::size_t k = c.size();
  std::vector<double> cin(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    if (c[j].size() != k) throw ConfigError("conferencing matrix must be square");
    for (std::size_t i = 0; i < k; ++i) {
      if (!(c[j][i] >= 0.0)) throw ConfigError("conferencing capacities must be nonnegative");
      if (i == j) {
        if (c[j][i] != 0.0) throw ConfigError("conferencing matrix must have a zero diagonal");
        continue;
      }
      cin[j] += c[j][i];
    }
  }
  return cin;
}

RateRegion conferencing_outer(const DiscreteMac& mac, const std::vector<std::vector<double>>& c,
                              const JointPmf& p) {
  if (static_cast<int>(c.size()) != mac.k) throw ConfigError("conferencing matrix must be k x k");
  CfConfig cfg{conferencing_effective_cin(c), std::vector<double>(mac.k, 0.0)};
  return outer_bound(mac, cfg, p);
}

JointPmf coordination_from_forwarding(const JointPmf& p, int k) {
  if (p.rank() != k + 1) throw ConfigError("expected a (U_0, X_1..X_k) pmf");
  std::vector<int> sizes{p.sizes()[0]};
  for (int j = 0; j < k; ++j) sizes.push_back(1);
  for (int j = 0; j < k; ++j) sizes.push_back(p.sizes()[1 + j]);
  return JointPmf(sizes, p.mass());  // singleton axes do not change the flat order
}

double submodular_phi(const JointPmf& p, Mask users) {
  if (p.rank() % 2 != 1 || p.rank() < 3) throw ConfigError("phi: pmf must have axes (U_1..U_k, X_1..X_k, Y)");
  const int k = (p.rank() - 1) / 2;
  if (users & ~full_mask(k)) throw ConfigError("phi: subset out of range");
  {
    std::vector<std::pair<Mask, Mask>> f;
    for (int j = 0; j < k; ++j) f.push_back({Mask{1} << (k + j), Mask{1} << j});
    f.push_back({Mask{1} << (2 * k), full_mask(k) << k});
    if (factorization_error(p, full_mask(k), f) > 1e-9)
      throw ConfigError("phi: pmf is not of the form p(u) prod p(x_j|u_j) p(y|x)");
  }
  if (users == 0) return 0.0;
  const Mask sc = full_mask(k) & ~users;
  const Mask y = Mask{1} << (2 * k);
  double v = mutual_information(p, users << k, y, sc | (sc << k));
  for (int j = 0; j < k; ++j)
    if (contains(users, j)) v += entropy(p, Mask{1} << j);
  return v - cond_entropy(p, users, sc);
}

std::vector<double> phi_table(const JointPmf& p, int k) {
  std::vector<double> t(std::size_t{1} << k);
  for (Mask s = 0; s < t.size(); ++s) t[s] = submodular_phi(p, s);
  return t;
}

std::vector<double> corner_point(const std::vector<double>& phi, const std::vector<int>& perm) {
  const int k = static_cast<int>(perm.size());
  if (phi.size() != (std::size_t{1} << k)) throw ConfigError("corner_point: phi table size must be 2^k");
  if (phi[0] != 0.0) throw ConfigError("corner_point: phi(empty) must be 0");
  std::vector<double> r(k, 0.0);
  Mask prefix = 0;
  for (int i = 0; i < k; ++i) {
    Mask next = prefix | (Mask{1} << perm[i]);
    r[perm[i]] = phi[next] - phi[prefix];
    prefix = next;
  }
  return r;
}

EnvelopeResult envelope_max_weighted_sum(const DiscreteMac& mac, const CfConfig& cfg, BoundKind kind,
                                         const std::vector<double>& weights, const EnvelopeOptions& opts) {
  require_valid(mac);
  validate_config(cfg, mac.k);
  const int k = mac.k, m = opts.u0_size;
  std::vector<int> sizes{m};
  for (int s : mac.input_sizes) sizes.push_back(s);
  // Blocks: p(u0), then p(x_j|u0) for u0-major, j-minor.
  auto build = [&](const Blocks& b) {
    JointPmf p = JointPmf::uniform(sizes);
    auto& mass = p.mutable_mass();
    for (std::size_t i = 0; i < mass.size(); ++i) {
      auto s = p.symbols(i);
      double v = b[0][s[0]];
      for (int j = 0; j < k; ++j) v *= b[1 + s[0] * k + j][s[1 + j]];
      mass[i] = v;
    }
    return p;
  };
  int evals = 0;
  auto objective = [&](const Blocks& b) {
    ++evals;
    JointPmf p = build(b);
    RateRegion r = kind == BoundKind::kOuter ? outer_bound(mac, cfg, p) : forwarding_bound(p, cfg.c_in, cfg, mac);
    return max_weighted_sum(r, weights).value;
  };
  std::vector<std::optional<BlockConstraint>> cons(1 + m * k);
  if (!mac.costs.empty())
    for (int u = 0; u < m; ++u)
      for (int j = 0; j < k; ++j) cons[1 + u * k + j] = BlockConstraint{mac.costs[j].table, mac.costs[j].budget};

  EnvelopeResult best;
  best.value = -std::numeric_limits<double>::infinity();
  for (int s = 0; s <= opts.random_starts; ++s) {
    Blocks b(1 + m * k);
    Rng rng = derive_rng(opts.seed, static_cast<std::uint64_t>(s));
    b[0].assign(m, 1.0 / m);
    for (int u = 0; u < m; ++u)
      for (int j = 0; j < k; ++j) b[1 + u * k + j].assign(mac.input_sizes[j], 1.0 / mac.input_sizes[j]);
    if (s > 0) {
      // Start 0 is the uniform product; the rest are random.
      for (auto& blk : b) {
        double t = 0.0;
        for (double& v : blk) t += (v = -std::log(1.0 - uniform01(rng)));
        for (double& v : blk) v /= t;
      }
    }
    for (std::size_t i = 0; i < b.size(); ++i)
      if (cons[i]) make_feasible(b[i], *cons[i]);
    AscentOptions ao;
    ao.max_sweeps = 60;
    ao.tol = 1e-11;
    ao.golden_iters = 48;
    double v = coordinate_ascent(b, objective, cons, ao);
    if (v > best.value) {
      best.value = v;
      best.best = build(b);
    }
  }
  best.evaluations = evals;
  return best;
}

namespace {
nlohmann::json constraint_json(const Constraint& c) {
  return {{"coeffs", c.coeffs}, {"bound", c.bound}, {"tag", c.tag}};
}
Mask coeff_mask(const Constraint& c) {
  Mask m = 0;
  for (std::size_t j = 0; j < c.coeffs.size(); ++j)
    if (c.coeffs[j] != 0.0) m |= Mask{1} << j;
  return m;
}
}  // namespace

std::string region_to_csv(const RateRegion& region) {
  std::vector<std::string> header{"group", "option", "mask"};
  for (int j = 0; j < region.k; ++j) header.push_back("c" + std::to_string(j + 1));
  header.push_back("bound");
  header.push_back("tag");
  CsvTable t(header);
  auto row = [&](int g, int o, const Constraint& c) {
    std::vector<std::string> cells{std::to_string(g), std::to_string(o), std::to_string(coeff_mask(c))};
    for (double v : c.coeffs) cells.push_back(fmt_double(v));
    cells.push_back(fmt_double(c.bound));
    cells.push_back(c.tag);
    t.add_row(std::move(cells));
  };
  for (const auto& c : region.constraints) row(-1, -1, c);
  for (std::size_t g = 0; g < region.groups.size(); ++g)
    for (std::size_t o = 0; o < region.groups[g].size(); ++o)
      for (const auto& c : region.groups[g][o].constraints) row(static_cast<int>(g), static_cast<int>(o), c);
  return t.str();
}

std::string region_to_json(const RateRegion& region) {
  nlohmann::json j;
  j["k"] = region.k;
  j["constraints"] = nlohmann::json::array();
  for (const auto& c : region.constraints) j["constraints"].push_back(constraint_json(c));
  j["groups"] = nlohmann::json::array();
  for (const auto& g : region.groups) {
    nlohmann::json opts = nlohmann::json::array();
    for (const auto& o : g) {
      nlohmann::json cs = nlohmann::json::array();
      for (const auto& c : o.constraints) cs.push_back(constraint_json(c));
      opts.push_back({{"tag", o.tag}, {"constraints", cs}});
    }
    j["groups"].push_back(opts);
  }
  return j.dump(2);
}

}  // namespace cfmac
