#include "cfmac/covering.hpp"

#include <cmath>
#include <functional>
#include <tuple>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cfmac/errors.hpp"
#include "cfmac/info.hpp"
#include "cfmac/io.hpp"
#include "cfmac/parallel.hpp"
#include "cfmac/rng.hpp"
#include "cfmac/stats.hpp"

namespace cfmac {

namespace {

int users_of(const JointPmf& p) {
  if (p.rank() < 3) throw ConfigError("covering target needs axes (U_0, U_1..U_k, U_{k+1}) with k >= 1");
  for (int s : p.sizes())
    if (s > 255) throw ConfigError("alphabets above 255 symbols are not supported");
  return p.rank() - 2;
}

// cond[u0 * |U| + u] = p(u | u0) for one axis.
std::vector<double> conditional_on_first(const JointPmf& p, int axis) {
  JointPmf pair = p.marginal((Mask{1} << 0) | (Mask{1} << axis));
  const int n0 = p.sizes()[0], na = p.sizes()[axis];
  std::vector<double> c(pair.mass());
  for (int u0 = 0; u0 < n0; ++u0) {
    double s = 0.0;
    for (int u = 0; u < na; ++u) s += c[u0 * na + u];
    for (int u = 0; u < na; ++u) c[u0 * na + u] = s > 0.0 ? c[u0 * na + u] / s : 0.0;
  }
  return c;
}

void check_budget(const std::vector<double>& rates, int n) {
  double e = 0.0;
  for (double r : rates) e += n * std::max(0.0, r);
  // Rejects before 2^{nR} can overflow; covering_search checks the rounded sizes.
  if (e > kCoveringBudgetLog2 + 1e-9) {
    std::ostringstream os;
    os << "covering search budget exceeded: prod M_j >= 2^" << e << " > 2^" << kCoveringBudgetLog2;
    throw PreconditionError(os.str());
  }
}

}  // namespace

std::vector<std::uint64_t> codebook_sizes(const std::vector<double>& rates, int n) {
  if (n < 1) throw ConfigError("n must be positive");
  std::vector<std::uint64_t> m;
  for (double r : rates) {
    if (!(r >= 0.0)) throw ConfigError("rates must be nonnegative");
    const double e = n * r;
    if (e > 62.0) throw PreconditionError("codebook size 2^" + fmt_double(e) + " is not representable");
    // Guard against 2^{nR} landing a hair above an integer through rounding.
    m.push_back(static_cast<std::uint64_t>(std::ceil(std::exp2(e) - 1e-9)));
  }
  return m;
}

CoveringOutcome covering_search(const JointPmf& p, const std::vector<std::uint64_t>& sizes,
                                const TypicalityCheck& check, std::uint64_t seed, std::uint64_t trial) {
  const int k = users_of(p);
  const int n = check.n;
  if (n < 1) throw ConfigError("n must be positive");
  if (static_cast<int>(sizes.size()) != k) throw ConfigError("need one codebook size per user");
  double log_total = 0.0;
  std::uint64_t stored = 0;
  for (int j = 0; j < k; ++j) {
    if (sizes[j] < 1) throw ConfigError("codebook sizes must be at least 1");
    log_total += std::log2(static_cast<double>(sizes[j]));
    if (j > 0) stored += sizes[j] * static_cast<std::uint64_t>(n);
  }
  if (log_total > kCoveringBudgetLog2 + 1e-9) {
    std::ostringstream os;
    os << "covering search budget exceeded: prod M_j = 2^" << log_total << " > 2^" << kCoveringBudgetLog2;
    throw PreconditionError(os.str());
  }
  if (stored > kCoveringMemorySymbols) throw PreconditionError("covering codebooks exceed the memory budget");

  const TypicalityTester tester(p, check.delta);
  const std::uint64_t tseed = derive_seed(seed, trial);
  const int y_axis = k + 1;
  const Mask fixed = Mask{1} | (Mask{1} << y_axis);

  // (U_0^n, U_{k+1}^n) drawn jointly.
  std::vector<Sequence> seq(k + 2, Sequence(n));
  {
    JointPmf side = p.marginal(fixed);
    Rng rng = derive_rng(tseed, 0);
    for (int t = 0; t < n; ++t) {
      const auto s = side.symbols(sample_index(side.mass(), rng));
      seq[0][t] = static_cast<Symbol>(s[0]);
      seq[y_axis][t] = static_cast<Symbol>(s[1]);
    }
  }
  CoveringOutcome out;
  std::vector<const Symbol*> ptrs(k + 2);
  ptrs[0] = seq[0].data();
  ptrs[y_axis] = seq[y_axis].data();
  if (!tester.all_ok(fixed, 0, ptrs.data(), n)) return out;

  std::vector<std::vector<double>> cond(k + 2);
  std::vector<Rng> streams;
  for (int j = 1; j <= k; ++j) cond[j] = conditional_on_first(p, j);
  for (int j = 1; j <= k; ++j) streams.push_back(derive_rng(tseed, static_cast<std::uint64_t>(j)));
  auto draw = [&](int j, Symbol* dst) {
    const int na = p.sizes()[j];
    for (int t = 0; t < n; ++t)
      dst[t] = static_cast<Symbol>(sample_index(cond[j].data() + seq[0][t] * na, na, streams[j - 1]));
  };
  // Single-user checks: subsets of {U_0, U_j, U_{k+1}} containing U_j.
  auto single_ok = [&](int j, const Symbol* cw) {
    ptrs[j] = cw;
    return tester.all_ok(fixed | (Mask{1} << j), Mask{1} << j, ptrs.data(), n);
  };
  // Users 2..k are stored, user 1 is generated in order.
  std::vector<Sequence> books(k + 1);
  std::vector<std::vector<char>> good(k + 1);
  for (int j = 2; j <= k; ++j) {
    books[j].resize(sizes[j - 1] * n);
    good[j].resize(sizes[j - 1]);
    for (std::uint64_t m = 0; m < sizes[j - 1]; ++m) {
      draw(j, books[j].data() + m * n);
      good[j][m] = single_ok(j, books[j].data() + m * n);
    }
  }

  std::vector<std::uint64_t> m(k, 0);
  // Subsets containing user d and at least one earlier user.
  auto joint_ok = [&](int d) {
    Mask prev = 0;
    for (int j = 1; j < d; ++j) prev |= Mask{1} << j;
    const Mask within = fixed | prev | (Mask{1} << d);
    for (Mask a = within; a; a = (a - 1) & within)
      if (contains(a, d) && (a & prev) && !tester.subset_ok(a, ptrs.data(), n)) return false;
    return true;
  };
  std::function<bool(int)> descend = [&](int d) -> bool {
    if (d > k) return true;
    for (std::uint64_t md = 0; md < sizes[d - 1]; ++md) {
      if (!good[d][md]) continue;
      ptrs[d] = books[d].data() + md * n;
      m[d - 1] = md;
      if (d == k) ++out.tuples_checked;
      if (joint_ok(d) && (d == k || descend(d + 1))) return true;
    }
    return false;
  };

  Sequence first(n);
  for (std::uint64_t m1 = 0; m1 < sizes[0]; ++m1) {
    draw(1, first.data());
    if (!single_ok(1, first.data())) continue;
    m[0] = m1;
    if (k == 1) ++out.tuples_checked;
    if (k == 1 || descend(2)) {
      out.success = true;
      out.m = m;
      return out;
    }
  }
  return out;
}

bool covering_trial(const JointPmf& p, const CoveringConfig& cfg, const TypicalityCheck& check, std::uint64_t trial) {
  check_budget(cfg.rates, check.n);
  return covering_search(p, codebook_sizes(cfg.rates, check.n), check, cfg.seed, trial).success;
}

std::vector<CoveringThreshold> covering_thresholds(const JointPmf& p, double delta) {
  const int k = users_of(p);
  const Mask u0 = 1, side = u0 | (Mask{1} << (k + 1));
  std::vector<CoveringThreshold> out;
  for (Mask s = 1; s < (Mask{1} << k); ++s) {
    CoveringThreshold t;
    t.users = s;
    const Mask axes = s << 1;
    for (int j = 0; j < k; ++j)
      if (contains(s, j)) t.base += cond_entropy(p, Mask{1} << (j + 1), u0);
    t.base -= cond_entropy(p, axes, side);
    const int sz = popcount(s);
    t.direct = t.base + (8.0 * k - 2.0 * sz + 10.0) * delta;
    t.converse = t.base - 2.0 * (sz + 1) * delta;
    out.push_back(t);
  }
  return out;
}

std::vector<PhasePoint> covering_phase_curve(const JointPmf& p, const TypicalityCheck& check,
                                             const std::vector<std::vector<double>>& rate_grid, int trials,
                                             std::uint64_t seed) {
  const int k = users_of(p);
  if (trials < 1) throw ConfigError("trials must be positive");
  const auto th = covering_thresholds(p, check.delta);
  std::vector<PhasePoint> rows;
  for (const auto& rates : rate_grid) {
    if (static_cast<int>(rates.size()) != k) throw ConfigError("rate point needs one rate per user");
    check_budget(rates, check.n);
    const auto sizes = codebook_sizes(rates, check.n);
    std::vector<char> ok(trials, 0);
    parallel_for(static_cast<std::size_t>(trials),
                 [&](std::size_t t) { ok[t] = covering_search(p, sizes, check, seed, t).success; });
    PhasePoint pt;
    pt.rates = rates;
    pt.trials = trials;
    for (double r : rates) pt.sum_rate += r;
    for (char c : ok) pt.successes += c;
    pt.fraction = static_cast<double>(pt.successes) / trials;
    std::tie(pt.ci_low, pt.ci_high) = wilson_interval(pt.successes, trials);
    pt.above_direct = true;
    for (const auto& t : th) {
      double rs = 0.0;
      for (int j = 0; j < k; ++j)
        if (contains(t.users, j)) rs += rates[j];
      pt.above_direct = pt.above_direct && rs > t.direct;
      pt.below_converse = pt.below_converse || rs < t.converse;
      if (t.users == full_mask(k)) {
        pt.base_sum_threshold = t.base;
        pt.direct_sum_threshold = t.direct;
        pt.converse_sum_threshold = t.converse;
      }
    }
    rows.push_back(pt);
  }
  return rows;
}

std::string phase_curve_csv(const std::vector<PhasePoint>& rows) {
  const std::size_t k = rows.empty() ? 0 : rows.front().rates.size();
  std::vector<std::string> header;
  for (std::size_t j = 0; j < k; ++j) header.push_back("r" + std::to_string(j + 1));
  for (const char* h : {"sum_rate", "successes", "trials", "fraction", "ci_low", "ci_high", "base_sum_threshold",
                        "direct_sum_threshold", "converse_sum_threshold", "above_direct", "below_converse"})
    header.push_back(h);
  CsvTable t(header);
  for (const auto& r : rows) {
    std::vector<std::string> c;
    for (double x : r.rates) c.push_back(fmt_double(x));
    c.push_back(fmt_double(r.sum_rate));
    c.push_back(std::to_string(r.successes));
    c.push_back(std::to_string(r.trials));
    c.push_back(fmt_double(r.fraction));
    c.push_back(fmt_double(r.ci_low));
    c.push_back(fmt_double(r.ci_high));
    c.push_back(fmt_double(r.base_sum_threshold));
    c.push_back(fmt_double(r.direct_sum_threshold));
    c.push_back(fmt_double(r.converse_sum_threshold));
    c.push_back(r.above_direct ? "1" : "0");
    c.push_back(r.below_converse ? "1" : "0");
    t.add_row(std::move(c));
  }
  return t.str();
}

CoveringExperiment covering_experiment_from_json(const std::string& text) {
  using nlohmann::json;
  try {
    const json j = json::parse(text);
    CoveringExperiment e{JointPmf(j.at("distribution").at("sizes").get<std::vector<int>>(),
                                  j.at("distribution").at("mass").get<std::vector<double>>()),
                         0, 0.05, {}, 100, 0};
    if (std::abs(e.distribution.total() - 1.0) > 1e-9) throw ConfigError("distribution mass must sum to 1");
    users_of(e.distribution);
    e.n = j.at("n").get<int>();
    e.delta = j.value("delta", e.n >= 400 ? 0.05 : 0.1);
    e.rates = j.at("rates").get<std::vector<std::vector<double>>>();
    e.trials = j.value("trials", 100);
    e.seed = j.value("seed", std::uint64_t{0});
    if (e.n < 1 || e.trials < 1 || !(e.delta > 0.0)) throw ConfigError("n, trials and delta must be positive");
    return e;
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("covering experiment: ") + ex.what());
  }
}

std::string covering_experiment_to_json(const CoveringExperiment& e) {
  nlohmann::json j;
  j["distribution"] = {{"sizes", e.distribution.sizes()}, {"mass", e.distribution.mass()}};
  j["n"] = e.n;
  j["delta"] = e.delta;
  j["rates"] = e.rates;
  j["trials"] = e.trials;
  j["seed"] = e.seed;
  return j.dump(2);
}

namespace {

// log2 sum_i p_i^{a}, over positive masses.
double log2_power_sum(const std::vector<double>& p, double a) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : p)
    if (v > 0.0) mx = std::max(mx, a * std::log2(v));
  double s = 0.0;
  for (double v : p)
    if (v > 0.0) s += std::exp2(a * std::log2(v) - mx);
  return mx + std::log2(s);
}

template <class F>
double golden_max(F f, double lo, double hi) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && b - a > 1e-12; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return std::max({fc, fd, f(lo), f(hi)});
}

}  // namespace

double ldp_subset_exponent(const JointPmf& p, Mask subset, double epsilon, double t_max) {
  if (subset == 0 || subset >= (Mask{1} << p.rank())) throw ConfigError("subset must be a nonempty set of axes");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (!(t_max > 1e-6) || !std::isfinite(t_max)) throw ConfigError("t_max must be finite and above 1e-6");
  const auto m = p.marginal(subset).mass();
  const double h = entropy_of(m);
  // E[p^{-t}] = sum p^{1-t}; E[p^{t}] = sum p^{1+t}.
  auto upper = [&](double t) { return t * (h + epsilon) - log2_power_sum(m, 1.0 - t); };
  auto lower = [&](double t) { return -t * (h - epsilon) - log2_power_sum(m, 1.0 + t); };
  const double iu = golden_max(upper, 1e-6, t_max);
  const double il = golden_max(lower, 1e-6, t_max);
  return std::min(iu, il);
}

LdpResult ldp_exponent(const JointPmf& p, double epsilon, double t_max) {
  LdpResult r;
  double mn = std::numeric_limits<double>::infinity();
  for (Mask s = 1; s < (Mask{1} << p.rank()); ++s) {
    const double v = ldp_subset_exponent(p, s, epsilon, t_max);
    r.subsets.push_back({s, v});
    mn = std::min(mn, v);
  }
  r.combined = 0.5 * mn;
  return r;
}

double atypicality_rate(const JointPmf& p, double epsilon, int n, int trials, std::uint64_t seed) {
  if (n < 1 || trials < 1) throw ConfigError("n and trials must be positive");
  const TypicalityTester tester(p, epsilon);
  const int r = p.rank();
  std::vector<char> bad(trials, 0);
  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
    Rng rng = derive_rng(seed, t);
    std::vector<Sequence> seq(r, Sequence(n));
    for (int i = 0; i < n; ++i) {
      const auto s = p.symbols(sample_index(p.mass(), rng));
      for (int a = 0; a < r; ++a) seq[a][i] = static_cast<Symbol>(s[a]);
    }
    std::vector<const Symbol*> ptrs;
    for (auto& s : seq) ptrs.push_back(s.data());
    bad[t] = !tester.all_ok(full_mask(r), 0, ptrs.data(), n);
  });
  int count = 0;
  for (char b : bad) count += b;
  return static_cast<double>(count) / trials;
}

}  // namespace cfmac
