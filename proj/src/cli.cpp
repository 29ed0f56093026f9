#include "cfmac/cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cfmac/channel.hpp"
#include "cfmac/codec.hpp"
#include "cfmac/covering.hpp"
#include "cfmac/errors.hpp"
#include "cfmac/gain.hpp"
#include "cfmac/gaussian2.hpp"
#include "cfmac/io.hpp"
#include "cfmac/region.hpp"

namespace cfmac {

namespace {

using nlohmann::json;

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(std::string("bad number in ") + what + ": '" + item + "'");
    }
  }
  if (v.empty()) throw ConfigError(std::string(what) + " is empty");
  return v;
}

// "a:b:step", inclusive of b up to rounding.
std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(parse_list(item, "--grid").front());
  if (parts.size() == 1) return parts;
  if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0])
    throw ConfigError("--grid expects start:stop:step with step > 0");
  const long steps = std::lround(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
  if (steps > 100000) throw ConfigError("--grid has too many points");
  std::vector<double> g;
  for (long i = 0; i <= steps; ++i) g.push_back(parts[0] + static_cast<double>(i) * parts[2]);
  return g;
}

DiscreteMac channel_arg(const std::string& spec) {
  if (spec == "bemac") return make_binary_erasure_mac();
  if (spec.rfind("identity:", 0) == 0) return make_identity_channel(static_cast<int>(parse_list(spec.substr(9), "--channel").front()));
  return load_channel(spec);
}

JointPmf pmf_from_json_text(const std::string& text) {
  try {
    const json j = json::parse(text);
    return JointPmf(j.at("sizes").get<std::vector<int>>(), j.at("mass").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("pmf file: ") + e.what());
  }
}

struct Output {
  std::string path;  // empty: stdout, no manifest
  std::string subcommand;
  std::string config;
  std::uint64_t seed = 0;
  json extra = json::object();
};

void emit(const Output& o, const std::string& csv, double seconds, std::ostream& out) {
  if (o.path.empty()) {
    out << csv;
    return;
  }
  write_text_file(o.path, csv);
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  json m{{"subcommand", o.subcommand}, {"config", o.config},  {"output", o.path},
         {"seed", o.seed},             {"version", CFMAC_VERSION}, {"wall_clock_seconds", seconds},
         {"timestamp", stamp},         {"results", o.extra}};
  write_text_file(o.path + ".manifest.json", m.dump(2) + "\n");
}

std::string gain_csv(const std::vector<GainCurvePoint>& pts) {
  CsvTable t({"h", "lambda_star", "r_sum", "gain", "slope_ratio"});
  for (const auto& p : pts)
    t.add_row({fmt_double(p.h), fmt_double(p.lambda_star), fmt_double(p.r_sum), fmt_double(p.g),
               fmt_double(p.slope_ratio)});
  return t.str();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cooperation-facilitator MAC toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(CFMAC_VERSION));

  Output o;
  std::string channel = "bemac", cin_s, cout_s, weights_s, pmf_path, bound = "forwarding", config_path, h_s,
              v_s, eps_s = "0.1", grid_s = "0:1:0.01", target;
  int u0_size = 2, starts = 4, opt_grid = 64, trials = -1;
  double gamma1 = 100.0, gamma2 = 100.0;
  bool seed_set = false;

  auto add_output = [&](CLI::App* s) { s->add_option("-o,--output", o.path, "CSV path; a manifest is written next to it"); };
  auto add_seed = [&](CLI::App* s) {
    s->add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& v) { o.seed = v; seed_set = true; },
                                          "master seed (default 0)");
  };

  auto* region = app.add_subcommand("region", "max weighted sum and constraints of a CF region");
  region->add_option("--channel", channel, "bemac, identity:N or a channel JSON file");
  region->add_option("--cin", cin_s, "comma-separated C_in")->required();
  region->add_option("--cout", cout_s, "comma-separated C_out")->required();
  region->add_option("--bound", bound, "forwarding or outer")->check(CLI::IsMember({"forwarding", "outer"}));
  region->add_option("--weights", weights_s, "comma-separated weights (default all ones)");
  region->add_option("--pmf", pmf_path, "JSON pmf over (U_0, X_1..X_k); skips the search");
  region->add_option("--u0-size", u0_size, "|U_0| for the search")->check(CLI::Range(1, 8));
  region->add_option("--starts", starts, "random restarts")->check(CLI::Range(0, 1000));
  add_seed(region);
  add_output(region);

  auto* gain = app.add_subcommand("gain", "sum-rate gain curve along a direction v");
  gain->set_help_flag("--help", "Print this help message and exit");
  gain->add_option("--channel", channel, "bemac, identity:N or a channel JSON file");
  gain->add_option("--h", h_s, "comma-separated scales h")->required();
  gain->add_option("--cin", cin_s, "comma-separated C_in (default all ones)");
  gain->add_option("--v", v_s, "direction (normalized; default uniform)");
  gain->add_option("--epsilon", eps_s, "mixture slack epsilon");
  add_output(gain);

  auto* g2 = app.add_subcommand("gaussian2", "two-user Gaussian gain curves");
  g2->add_option("--gamma1", gamma1, "SNR of encoder 1")->check(CLI::PositiveNumber);
  g2->add_option("--gamma2", gamma2, "SNR of encoder 2")->check(CLI::PositiveNumber);
  g2->add_option("--grid", grid_s, "C_out values as start:stop:step or a single value");
  g2->add_option("--opt-grid", opt_grid, "optimizer grid size")->check(CLI::Range(50, 256));
  add_output(g2);

  auto* cov = app.add_subcommand("covering", "covering phase curve from a JSON experiment");
  cov->add_option("config", config_path, "experiment JSON")->required();
  cov->add_option("--trials", trials, "override the trial count")->check(CLI::PositiveNumber);
  add_seed(cov);
  add_output(cov);

  auto* codec = app.add_subcommand("codec", "end-to-end code simulation from a JSON experiment");
  codec->add_option("config", config_path, "experiment JSON")->required();
  codec->add_option("--trials", trials, "override the trial count")->check(CLI::Range(100, 100000000));
  add_seed(codec);
  add_output(codec);

  auto* val = app.add_subcommand("validate", "check a channel, covering or codec JSON file");
  val->add_option("file", target, "JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
  try {
    if (*val) {
      const std::string text = read_text_file(target);
      json j;
      try {
        j = json::parse(text);
      } catch (const json::exception& e) {
        throw ConfigError(target + ": " + e.what());
      }
      if (j.contains("transition")) {
        const DiscreteMac mac = channel_from_json_text(text);
        if (auto v = validate(mac)) throw ConfigError(target + ": " + v->what);
        out << "ok: channel with k=" << mac.k << "\n";
      } else if (j.contains("distribution")) {
        covering_experiment_from_json(text);
        out << "ok: covering experiment\n";
      } else if (j.contains("channel") && j.contains("rates")) {
        codec_experiment_from_json(text);
        out << "ok: codec experiment\n";
      } else {
        throw ConfigError(target + ": not a channel, covering or codec file");
      }
      return 0;
    }

    if (*region) {
      o.subcommand = "region";
      const DiscreteMac mac = channel_arg(channel);
      const CfConfig cfg{parse_list(cin_s, "--cin"), parse_list(cout_s, "--cout")};
      validate_config(cfg, mac.k);
      const std::vector<double> w = weights_s.empty() ? std::vector<double>(mac.k, 1.0) : parse_list(weights_s, "--weights");
      if (static_cast<int>(w.size()) != mac.k) throw ConfigError("--weights needs one entry per encoder");
      const BoundKind kind = bound == "outer" ? BoundKind::kOuter : BoundKind::kForwarding;
      JointPmf p;
      if (!pmf_path.empty()) {
        p = pmf_from_json_text(read_text_file(pmf_path));
        o.config = pmf_path;
      } else {
        EnvelopeOptions eo;
        eo.u0_size = u0_size;
        eo.random_starts = starts;
        eo.seed = o.seed;
        p = envelope_max_weighted_sum(mac, cfg, kind, w, eo).best;
      }
      const RateRegion r = kind == BoundKind::kOuter ? outer_bound(mac, cfg, p) : forwarding_bound(p, cfg.c_in, cfg, mac);
      const WeightedSum ws = max_weighted_sum(r, w);
      o.extra = {{"bound", bound}, {"weights", w}, {"max_weighted_sum", ws.value}, {"rates", ws.rates},
                 {"pmf", {{"sizes", p.sizes()}, {"mass", p.mass()}}}};
      err << "max weighted sum: " << fmt_double(ws.value) << "\n";
      emit(o, region_to_csv(r), elapsed(), out);
      return 0;
    }

    if (*gain) {
      o.subcommand = "gain";
      const DiscreteMac mac = channel_arg(channel);
      const auto hs = parse_list(h_s, "--h");
      const std::vector<double> c_in = cin_s.empty() ? std::vector<double>(mac.k, 1.0) : parse_list(cin_s, "--cin");
      std::vector<double> v = v_s.empty() ? std::vector<double>(mac.k, 1.0) : parse_list(v_s, "--v");
      if (static_cast<int>(v.size()) != mac.k) throw ConfigError("--v needs one entry per encoder");
      double norm = 0.0;
      for (double x : v) norm += x * x;
      if (!(norm > 0.0)) throw ConfigError("--v must be nonzero");
      for (double& x : v) x /= std::sqrt(norm);
      const double eps = parse_list(eps_s, "--epsilon").front();
      const auto w = cstar_test(mac);
      if (!w) throw PreconditionError("no dependent-input witness found for this channel");
      const MixtureFamily fam = make_mixture_family(mac, *w, c_in, eps, v);
      std::vector<GainCurvePoint> pts;
      for (double h : hs) {
        std::vector<double> c_out(mac.k);
        for (int j = 0; j < mac.k; ++j) c_out[j] = h * v[j];
        pts.push_back(achievable_sum_rate(fam, mac, CfConfig{c_in, c_out}, h));
      }
      o.extra = {{"witness_margin", w->margin}, {"mix_weight", fam.mix_weight}, {"epsilon", eps}, {"v", v}};
      emit(o, gain_csv(pts), elapsed(), out);
      return 0;
    }

    if (*g2) {
      o.subcommand = "gaussian2";
      const auto rows = gaussian_gain_rows(parse_grid(grid_s), gamma1, gamma2, opt_grid);
      o.extra = {{"gamma1", gamma1}, {"gamma2", gamma2}, {"grid", grid_s}, {"opt_grid", opt_grid}};
      emit(o, gaussian_gain_csv(rows), elapsed(), out);
      return 0;
    }

    if (*cov) {
      o.subcommand = "covering";
      o.config = config_path;
      CoveringExperiment e = covering_experiment_from_json(read_text_file(config_path));
      if (trials > 0) e.trials = trials;
      if (seed_set) e.seed = o.seed;
      o.seed = e.seed;
      const auto rows = covering_phase_curve(e.distribution, {e.distribution, e.delta, e.n}, e.rates, e.trials, e.seed);
      o.extra = {{"n", e.n}, {"delta", e.delta}, {"trials", e.trials}};
      emit(o, phase_curve_csv(rows), elapsed(), out);
      return 0;
    }

    if (*codec) {
      o.subcommand = "codec";
      o.config = config_path;
      CodecExperiment e = codec_experiment_from_json(read_text_file(config_path));
      if (trials > 0) e.trials = trials;
      if (seed_set) e.spec.seed = o.seed;
      o.seed = e.spec.seed;
      std::vector<std::pair<CodeSpec, ErrorEstimate>> rows;
      for (int n : e.block_lengths)
        for (const auto& r : e.rate_points) {
          CodeSpec s = e.spec;
          s.n = n;
          s.rates = r;
          rows.emplace_back(s, estimate_error(s, e.trials));
        }
      o.extra = {{"trials", e.trials}, {"delta", e.spec.delta}};
      emit(o, codec_results_csv(rows), elapsed(), out);
      return 0;
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  } catch (const PreconditionError& e) {
    err << "precondition failed: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace cfmac
