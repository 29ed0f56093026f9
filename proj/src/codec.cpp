#include "cfmac/codec.hpp"

#include <cmath>
#include <functional>
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

std::uint64_t pow2_ceil(double e) {
  if (e > 62.0) throw PreconditionError("index set of size 2^" + fmt_double(e) + " exceeds the codebook budget");
  return static_cast<std::uint64_t>(std::ceil(std::exp2(e) - 1e-9));
}

void validate_spec(const CodeSpec& s) {
  require_valid(s.mac);
  const int k = s.mac.k;
  validate_split(s.split, s.cfg);
  if (static_cast<int>(s.cfg.c_in.size()) != k) throw ConfigError("CF config must list one link per encoder");
  if (static_cast<int>(s.rates.size()) != k) throw ConfigError("need one rate per encoder");
  for (double r : s.rates)
    if (!(r >= 0.0) || !std::isfinite(r)) throw ConfigError("rates must be finite and nonnegative");
  if (s.n < 1 || s.n > kCodecMaxBlock) throw ConfigError("block length must lie in [1, 64]");
  if (!(s.delta > 0.0)) throw ConfigError("delta must be positive");
  const CoordLayout L{k};
  if (s.coord.rank() != 2 * k + 1) throw ConfigError("coordination pmf must have axes (U_0, U_1..U_k, X_1..X_k)");
  if (std::abs(s.coord.total() - 1.0) > 1e-9) throw ConfigError("coordination pmf must sum to 1");
  for (int a = 0; a < s.coord.rank(); ++a)
    if (s.coord.sizes()[a] > 4) throw ConfigError("codec alphabets are limited to 4 symbols");
  for (int j = 0; j < k; ++j)
    if (s.coord.sizes()[L.x(j)] != s.mac.input_sizes[j]) throw ConfigError("X alphabets differ from the channel");
  if (s.mac.output_size > 255) throw ConfigError("output alphabet too large");
  const Mask u0 = Mask{1} << L.u0();
  std::vector<std::pair<Mask, Mask>> uf, xf;
  for (int j = 0; j < k; ++j) {
    if (s.split.cd[j] == 0.0) uf.push_back({Mask{1} << L.u(j), u0});
    xf.push_back({Mask{1} << L.x(j), u0 | (Mask{1} << L.u(j))});
  }
  const double e1 = uf.empty() ? 0.0 : factorization_error(s.coord, u0, uf);
  const double e2 = factorization_error(s.coord, u0 | L.u_axes(full_mask(k)), xf);
  if (e1 > 1e-9 || e2 > 1e-9) throw ConfigError("coordination pmf does not have the required factorization");
}

// Conditional table of the last axis of `axes` given the others, flattened
// in marginal order.
std::vector<double> conditional_last(const JointPmf& p, Mask axes, int last_size) {
  std::vector<double> c = p.marginal(axes).mass();
  for (std::size_t base = 0; base < c.size(); base += last_size) {
    double s = 0.0;
    for (int i = 0; i < last_size; ++i) s += c[base + i];
    for (int i = 0; i < last_size; ++i) c[base + i] = s > 0.0 ? c[base + i] / s : 0.0;
  }
  return c;
}

std::vector<std::uint64_t> unpack(std::uint64_t idx, const std::vector<std::uint64_t>& radix) {
  std::vector<std::uint64_t> d(radix.size());
  for (std::size_t j = radix.size(); j-- > 0;) {
    d[j] = idx % radix[j];
    idx /= radix[j];
  }
  return d;
}

std::uint64_t pack(const std::vector<std::uint64_t>& d, const std::vector<std::uint64_t>& radix) {
  std::uint64_t idx = 0;
  for (std::size_t j = 0; j < radix.size(); ++j) idx = idx * radix[j] + d[j];
  return idx;
}

// Subsets a of `within` containing `axis`, meeting `others`, free of trivial axes.
bool cross_ok(const TypicalityTester& t, Mask within, int axis, Mask others, const Symbol* const* ptrs, int n) {
  const Mask triv = t.trivial_axes();
  for (Mask a = within; a; a = (a - 1) & within)
    if (contains(a, axis) && (a & others) && !(a & triv) && !t.subset_ok(a, ptrs, n)) return false;
  return true;
}

}  // namespace

std::vector<SubRates> split_rates(const CodeSpec& spec) {
  std::vector<SubRates> out;
  for (std::size_t j = 0; j < spec.rates.size(); ++j) {
    const double r = spec.rates[j];
    SubRates s;
    s.r0 = std::min(r, spec.split.c0[j]);
    s.rd = std::min(r, spec.cfg.c_in[j]) - s.r0;
    s.rj = std::max(0.0, r - spec.cfg.c_in[j]);
    out.push_back(s);
  }
  return out;
}

CodeSizes code_sizes(const CodeSpec& spec) {
  const auto sr = split_rates(spec);
  CodeSizes c;
  const int n = spec.n;
  double total = 0.0;
  for (std::size_t j = 0; j < sr.size(); ++j) {
    c.w0.push_back(pow2_ceil(n * sr[j].r0));
    c.wd.push_back(pow2_ceil(n * sr[j].rd));
    c.wj.push_back(pow2_ceil(n * sr[j].rj));
    c.z.push_back(pow2_ceil(n * spec.split.cd[j]));
  }
  double w0 = 1.0, wd = 1.0;
  for (std::size_t j = 0; j < sr.size(); ++j) {
    w0 *= static_cast<double>(c.w0[j]);
    wd *= static_cast<double>(c.wd[j]);
  }
  total = w0;
  for (std::size_t j = 0; j < sr.size(); ++j) {
    const double u = w0 * static_cast<double>(c.wd[j]) * static_cast<double>(c.z[j]);
    total += u + u * static_cast<double>(c.wj[j]);
  }
  total *= n;
  if (total > static_cast<double>(kCodecMemorySymbols) || w0 * wd > 1e15) {
    std::ostringstream os;
    os << "codebooks need 2^" << std::log2(total) << " symbols, above the budget of 2^26";
    throw PreconditionError(os.str());
  }
  for (auto v : c.w0) c.w0_total *= v;
  for (auto v : c.wd) c.wd_total *= v;
  c.symbols = static_cast<std::uint64_t>(total);
  return c;
}

std::uint64_t Codebooks::u_index(int j, std::uint64_t w0, std::uint64_t wd, std::uint64_t zj) const {
  return (w0 * sizes.wd[j] + wd) * sizes.z[j] + zj;
}

const Symbol* Codebooks::u_word(int j, std::uint64_t w0, std::uint64_t wd, std::uint64_t zj) const {
  return u[j].data() + u_index(j, w0, wd, zj) * n;
}

std::uint64_t Codebooks::x_index(int j, std::uint64_t w0, std::uint64_t wd, std::uint64_t zj, std::uint64_t wj) const {
  return u_index(j, w0, wd, zj) * sizes.wj[j] + wj;
}

const Symbol* Codebooks::x_word(int j, std::uint64_t w0, std::uint64_t wd, std::uint64_t zj, std::uint64_t wj) const {
  return x[j].data() + x_index(j, w0, wd, zj, wj) * n;
}

std::uint64_t Codebooks::wd_tuple(const std::vector<std::uint64_t>& wd) const { return pack(wd, sizes.wd); }

CoordinateResult cf_coordinate(const Symbol* u0n, const std::vector<std::vector<const Symbol*>>& maps,
                               const TypicalityTester& tester, int n) {
  const int k = static_cast<int>(maps.size());
  if (tester.rank() != k + 1) throw ConfigError("coordination tester must cover (U_0, U_1..U_k)");
  CoordinateResult res;
  res.z.assign(k, 0);
  std::vector<const Symbol*> ptrs(k + 1, nullptr);
  ptrs[0] = u0n;
  if (!tester.all_ok(1, 1, ptrs.data(), n)) return res;
  // Candidates passing the checks on (U_0, U_j) alone.
  std::vector<std::vector<std::uint64_t>> good(k);
  for (int j = 0; j < k; ++j) {
    for (std::uint64_t z = 0; z < maps[j].size(); ++z) {
      ptrs[1 + j] = maps[j][z];
      if (tester.all_ok(1 | (Mask{1} << (1 + j)), Mask{1} << (1 + j), ptrs.data(), n)) good[j].push_back(z);
    }
    if (good[j].empty()) return res;
  }
  std::vector<std::uint64_t> z(k);
  std::function<bool(int)> descend = [&](int d) -> bool {
    const Mask prev = ((Mask{1} << (d + 1)) - 1) & ~Mask{1};
    const Mask within = prev | 1 | (Mask{1} << (1 + d));
    for (std::uint64_t c : good[d]) {
      ptrs[1 + d] = maps[d][c];
      z[d] = c;
      if (d > 0 && !cross_ok(tester, within, 1 + d, prev, ptrs.data(), n)) continue;
      if (d + 1 == k || descend(d + 1)) return true;
    }
    return false;
  };
  if (descend(0)) {
    res.z = z;
    res.found = true;
  }
  return res;
}

Codebooks build_code(const CodeSpec& spec) {
  validate_spec(spec);
  const int k = spec.mac.k, n = spec.n;
  const CoordLayout L{k};
  Codebooks b;
  b.k = k;
  b.n = n;
  b.sizes = code_sizes(spec);
  const auto& sz = b.sizes;

  const std::vector<double> p0 = spec.coord.marginal_of(0);
  {
    Rng rng = derive_rng(spec.seed, 1);
    b.u0.resize(sz.w0_total * n);
    for (auto& s : b.u0) s = static_cast<Symbol>(sample_index(p0, rng));
  }
  b.u.resize(k);
  b.x.resize(k);
  b.x_cost_ok.resize(k);
  for (int j = 0; j < k; ++j) {
    const int nu = spec.coord.sizes()[L.u(j)], nx = spec.coord.sizes()[L.x(j)];
    const auto cu = conditional_last(spec.coord, 1 | (Mask{1} << L.u(j)), nu);
    const auto cx = conditional_last(spec.coord, 1 | (Mask{1} << L.u(j)) | (Mask{1} << L.x(j)), nx);
    Rng ru = derive_rng(spec.seed, 16 + j), rx = derive_rng(spec.seed, 32 + j);
    const std::uint64_t nuw = sz.w0_total * sz.wd[j] * sz.z[j];
    b.u[j].resize(nuw * n);
    b.x[j].resize(nuw * sz.wj[j] * n);
    b.x_cost_ok[j].assign(nuw * sz.wj[j], 1);
    for (std::uint64_t i = 0; i < nuw; ++i) {
      const Symbol* u0 = b.u0_word(i / (sz.wd[j] * sz.z[j]));
      Symbol* uw = b.u[j].data() + i * n;
      for (int t = 0; t < n; ++t) uw[t] = static_cast<Symbol>(sample_index(cu.data() + u0[t] * nu, nu, ru));
      for (std::uint64_t w = 0; w < sz.wj[j]; ++w) {
        Symbol* xw = b.x[j].data() + (i * sz.wj[j] + w) * n;
        double cost = 0.0;
        for (int t = 0; t < n; ++t) {
          xw[t] = static_cast<Symbol>(sample_index(cx.data() + (u0[t] * nu + uw[t]) * nx, nx, rx));
          if (!spec.mac.costs.empty()) cost += spec.mac.costs[j].table[xw[t]];
        }
        if (!spec.mac.costs.empty()) b.x_cost_ok[j][i * sz.wj[j] + w] = cost <= n * spec.mac.costs[j].budget + 1e-9;
      }
    }
  }

  // The CF's choice of Z for every (w0, w_d).
  const TypicalityTester enc(spec.coord.marginal(full_mask(k + 1)), spec.delta);
  b.z.resize(sz.w0_total * sz.wd_total);
  b.z_found.resize(b.z.size());
  for (std::uint64_t w0 = 0; w0 < sz.w0_total; ++w0) {
    for (std::uint64_t t = 0; t < sz.wd_total; ++t) {
      const auto wd = unpack(t, sz.wd);
      std::vector<std::vector<const Symbol*>> maps(k);
      for (int j = 0; j < k; ++j)
        for (std::uint64_t z = 0; z < sz.z[j]; ++z) maps[j].push_back(b.u_word(j, w0, wd[j], z));
      auto r = cf_coordinate(b.u0_word(w0), maps, enc, n);
      b.z[w0 * sz.wd_total + t] = r.z;
      b.z_found[w0 * sz.wd_total + t] = r.found;
    }
  }
  return b;
}

DecodeResult decode(const Sequence& yn, const Codebooks& books, const TypicalityTester& tester) {
  const int k = books.k, n = books.n;
  const CoordLayout L{k};
  if (tester.rank() != 2 * k + 2) throw ConfigError("decoder tester must cover (U_0, U_[k], X_[k], Y)");
  if (static_cast<int>(yn.size()) != n) throw ConfigError("received sequence has the wrong length");
  const auto& sz = books.sizes;
  DecodeResult res;
  res.messages.assign(k, Message{});
  std::vector<const Symbol*> ptrs(2 * k + 2, nullptr);
  const int ya = L.y();
  const Mask ym = Mask{1} << ya, u0m = 1, uall = L.u_axes(full_mask(k));
  ptrs[ya] = yn.data();
  if (!tester.all_ok(ym, ym, ptrs.data(), n)) return res;

  std::vector<std::uint64_t> wj(k);
  std::vector<std::vector<std::uint64_t>> good(k);
  std::uint64_t cur_w0 = 0;
  std::vector<std::uint64_t> cur_wd, cur_z;
  auto record = [&] {
    const auto w0 = unpack(cur_w0, sz.w0);
    std::vector<Message> m(k);
    for (int j = 0; j < k; ++j) m[j] = Message{w0[j], cur_wd[j], wj[j]};
    res.typical.push_back(std::move(m));
  };
  std::function<bool(int)> descend = [&](int d) -> bool {
    const Mask prev = L.x_axes((Mask{1} << d) - 1);
    const Mask within = u0m | uall | ym | prev | (Mask{1} << L.x(d));
    for (std::uint64_t w : good[d]) {
      ptrs[L.x(d)] = books.x_word(d, cur_w0, cur_wd[d], cur_z[d], w);
      wj[d] = w;
      if (d > 0 && !cross_ok(tester, within, L.x(d), prev, ptrs.data(), n)) continue;
      if (d + 1 == k) {
        record();
        if (res.typical.size() >= 2) return true;
      } else if (descend(d + 1)) {
        return true;
      }
    }
    return false;
  };

  for (std::uint64_t w0 = 0; w0 < sz.w0_total; ++w0) {
    ptrs[0] = books.u0_word(w0);
    if (!tester.all_ok(u0m | ym, u0m, ptrs.data(), n)) continue;
    cur_w0 = w0;
    for (std::uint64_t t = 0; t < sz.wd_total; ++t) {
      cur_wd = unpack(t, sz.wd);
      cur_z = books.z[w0 * sz.wd_total + t];
      for (int j = 0; j < k; ++j) ptrs[L.u(j)] = books.u_word(j, w0, cur_wd[j], cur_z[j]);
      if (!tester.all_ok_any(u0m | uall | ym, uall, ptrs.data(), n)) continue;
      bool empty = false;
      for (int j = 0; j < k && !empty; ++j) {
        good[j].clear();
        const Mask xj = Mask{1} << L.x(j);
        for (std::uint64_t w = 0; w < sz.wj[j]; ++w) {
          ptrs[L.x(j)] = books.x_word(j, w0, cur_wd[j], cur_z[j], w);
          if (tester.all_ok(u0m | uall | ym | xj, xj, ptrs.data(), n)) good[j].push_back(w);
        }
        empty = good[j].empty();
      }
      if (empty) continue;
      if (descend(0)) {
        res.typical_count = 2;
        return res;
      }
    }
  }
  res.typical_count = static_cast<int>(res.typical.size());
  if (res.typical_count == 1) res.messages = res.typical[0];
  return res;
}

TrialResult run_trial(const CodeSpec& spec, const Codebooks& books, const TypicalityTester& decoder_tester,
                      std::uint64_t trial) {
  const int k = books.k, n = books.n;
  const auto& sz = books.sizes;
  Rng rng = derive_rng(derive_seed(spec.seed, 2), trial);
  TrialResult r;
  r.sent.resize(k);
  std::vector<std::uint64_t> w0(k), wd(k);
  for (int j = 0; j < k; ++j) {
    r.sent[j].w0 = w0[j] = rng() % sz.w0[j];
    r.sent[j].wd = wd[j] = rng() % sz.wd[j];
    r.sent[j].wj = rng() % sz.wj[j];
  }
  const std::uint64_t w0i = pack(w0, sz.w0), wdi = books.wd_tuple(wd);
  const auto& z = books.z[w0i * sz.wd_total + wdi];
  const bool z_found = books.z_found[w0i * sz.wd_total + wdi];
  bool cost_ok = true;
  std::vector<const Symbol*> xs(k);
  for (int j = 0; j < k; ++j) {
    xs[j] = books.x_word(j, w0i, wd[j], z[j], r.sent[j].wj);
    cost_ok = cost_ok && books.x_cost_ok[j][books.x_index(j, w0i, wd[j], z[j], r.sent[j].wj)];
  }
  Sequence y(n);
  std::vector<int> x(k);
  for (int t = 0; t < n; ++t) {
    for (int j = 0; j < k; ++j) x[j] = xs[j][t];
    y[t] = static_cast<Symbol>(sample_output(spec.mac, x, rng));
  }
  const auto dec = decode(y, books, decoder_tester);
  r.decoded = dec.messages;
  r.error = !cost_ok || r.decoded != r.sent;
  if (!r.error) return r;
  if (!cost_ok) {
    r.failure = FailureClass::kCost;
  } else if (!z_found) {
    r.failure = FailureClass::kEncoder;
  } else {
    const CoordLayout L{k};
    std::vector<const Symbol*> ptrs(2 * k + 2);
    ptrs[0] = books.u0_word(w0i);
    for (int j = 0; j < k; ++j) {
      ptrs[L.u(j)] = books.u_word(j, w0i, wd[j], z[j]);
      ptrs[L.x(j)] = xs[j];
    }
    ptrs[L.y()] = y.data();
    if (!decoder_tester.all_ok(full_mask(2 * k + 2), 0, ptrs.data(), n)) {
      r.failure = FailureClass::kTypicality;
    } else {
      // The true tuple is typical, so a competitor was found.
      const std::vector<Message>* other = nullptr;
      for (const auto& c : dec.typical)
        if (c != r.sent) other = &c;
      r.failure = FailureClass::kWrongMessage;
      for (int j = 0; j < k && other; ++j) {
        if ((*other)[j].w0 != r.sent[j].w0) r.failure = FailureClass::kWrongCommon;
        if ((*other)[j].wd != r.sent[j].wd) r.s |= Mask{1} << j;
        if ((*other)[j].wj != r.sent[j].wj) r.t |= Mask{1} << j;
      }
      if (r.failure == FailureClass::kWrongCommon) r.s = r.t = 0;
    }
  }
  return r;
}

ErrorEstimate estimate_error(const CodeSpec& spec, int trials) {
  if (trials < 100) throw ConfigError("estimate_error needs at least 100 trials");
  const Codebooks books = build_code(spec);
  const int k = spec.mac.k;
  std::vector<int> xs;
  for (int j = 0; j < k; ++j) xs.push_back(CoordLayout{k}.x(j));
  const TypicalityTester tester(attach_output(spec.mac, spec.coord, xs), 2.0 * spec.delta);
  std::vector<TrialResult> res(trials);
  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) { res[t] = run_trial(spec, books, tester, t); });
  ErrorEstimate e;
  e.trials = trials;
  for (const auto& r : res) {
    if (!r.error) continue;
    ++e.errors;
    std::string key;
    switch (r.failure) {
      case FailureClass::kCost: key = "cost"; break;
      case FailureClass::kEncoder: key = "enc"; break;
      case FailureClass::kTypicality: key = "typ"; break;
      case FailureClass::kWrongCommon: key = "common"; break;
      default: key = "S=" + mask_to_string(r.s, k) + " T=" + mask_to_string(r.t, k);
    }
    ++e.classes[key];
  }
  e.p_error = static_cast<double>(e.errors) / trials;
  std::tie(e.ci_low, e.ci_high) = wilson_interval(e.errors, trials);
  return e;
}

JointPmf product_coordination(const std::vector<std::vector<double>>& px) {
  const int k = static_cast<int>(px.size());
  std::vector<std::vector<double>> parts(k + 1, std::vector<double>{1.0});
  for (const auto& p : px) parts.push_back(p);
  return JointPmf::product(parts);
}

CodecExperiment codec_experiment_from_json(const std::string& text) {
  using nlohmann::json;
  try {
    const json j = json::parse(text);
    CodecExperiment e;
    const json& ch = j.at("channel");
    e.spec.mac = ch.is_string() && ch.get<std::string>() == "bemac" ? make_binary_erasure_mac()
                                                                     : channel_from_json_text(ch.dump());
    const int k = e.spec.mac.k;
    if (j.contains("coord")) {
      e.spec.coord = JointPmf(j["coord"].at("sizes").get<std::vector<int>>(),
                              j["coord"].at("mass").get<std::vector<double>>());
    } else {
      std::vector<std::vector<double>> px;
      for (int s : e.spec.mac.input_sizes) px.push_back(std::vector<double>(s, 1.0 / s));
      e.spec.coord = product_coordination(px);
    }
    const std::vector<double> zeros(k, 0.0);
    e.spec.cfg.c_in = j.value("c_in", zeros);
    e.spec.cfg.c_out = j.value("c_out", zeros);
    e.spec.split.c0 = j.value("c0", zeros);
    e.spec.split.cd = j.value("cd", zeros);
    e.rate_points = j.at("rates").get<std::vector<std::vector<double>>>();
    if (e.rate_points.empty()) throw ConfigError("codec experiment needs at least one rate point");
    e.spec.rates = e.rate_points.front();
    if (j.at("n").is_array()) e.block_lengths = j["n"].get<std::vector<int>>();
    else e.block_lengths = {j["n"].get<int>()};
    if (e.block_lengths.empty()) throw ConfigError("codec experiment needs at least one block length");
    e.spec.n = e.block_lengths.front();
    e.spec.delta = j.value("delta", 0.05);
    e.spec.seed = j.value("seed", std::uint64_t{0});
    e.trials = j.value("trials", 100);
    validate_spec(e.spec);
    return e;
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("codec experiment: ") + ex.what());
  }
}

std::string codec_results_csv(const std::vector<std::pair<CodeSpec, ErrorEstimate>>& rows) {
  const std::size_t k = rows.empty() ? 0 : rows.front().first.rates.size();
  std::vector<std::string> header{"n"};
  for (std::size_t j = 0; j < k; ++j) header.push_back("r" + std::to_string(j + 1));
  for (const char* h : {"sum_rate", "trials", "errors", "p_error", "ci_low", "ci_high", "cost", "enc", "typ",
                        "common", "wrong_message", "classes"})
    header.push_back(h);
  CsvTable t(header);
  for (const auto& [spec, e] : rows) {
    std::vector<std::string> c{std::to_string(spec.n)};
    double sum = 0.0;
    for (double r : spec.rates) {
      c.push_back(fmt_double(r));
      sum += r;
    }
    auto count = [&](const char* key) {
      auto it = e.classes.find(key);
      return it == e.classes.end() ? 0 : it->second;
    };
    int wrong = e.errors - count("cost") - count("enc") - count("typ") - count("common");
    std::string detail;
    for (const auto& [key, v] : e.classes) detail += (detail.empty() ? "" : ";") + key + ":" + std::to_string(v);
    for (std::string s : {fmt_double(sum), std::to_string(e.trials), std::to_string(e.errors), fmt_double(e.p_error),
                          fmt_double(e.ci_low), fmt_double(e.ci_high), std::to_string(count("cost")),
                          std::to_string(count("enc")), std::to_string(count("typ")), std::to_string(count("common")),
                          std::to_string(wrong), detail})
      c.push_back(s);
    t.add_row(std::move(c));
  }
  return t.str();
}

}  // namespace cfmac
