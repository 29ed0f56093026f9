#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cfmac/channel.hpp"
#include "cfmac/cli.hpp"
#include "cfmac/codec.hpp"
#include "cfmac/covering.hpp"
#include "cfmac/errors.hpp"
#include "cfmac/gain.hpp"
#include "cfmac/gaussian2.hpp"
#include "cfmac/search.hpp"

namespace py = pybind11;
using namespace cfmac;

namespace {

py::dict estimate_dict(const ErrorEstimate& e) {
  py::dict d;
  d["trials"] = e.trials;
  d["errors"] = e.errors;
  d["p_error"] = e.p_error;
  d["ci"] = py::make_tuple(e.ci_low, e.ci_high);
  d["classes"] = e.classes;
  return d;
}

}  // namespace

PYBIND11_MODULE(_cfmac, m) {
  m.doc() = "Cooperation-facilitator MAC toolkit";

  static py::exception<ConfigError> config_error(m, "ConfigError", PyExc_ValueError);
  static py::exception<PreconditionError> precondition_error(m, "PreconditionError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      config_error(e.what());
    } catch (const PreconditionError& e) {
      precondition_error(e.what());
    }
  });

  py::class_<DiscreteMac>(m, "DiscreteMac")
      .def_readonly("k", &DiscreteMac::k)
      .def_readonly("input_sizes", &DiscreteMac::input_sizes)
      .def_readonly("output_size", &DiscreteMac::output_size)
      .def_readonly("transition", &DiscreteMac::transition)
      .def("to_json", &channel_to_json_text);

  m.def("binary_erasure_mac", &make_binary_erasure_mac);
  m.def("channel_from_json", &channel_from_json_text, py::arg("text"));

  m.def(
      "sum_capacity_no_cooperation", [](const DiscreteMac& mac) { return max_product_mi(mac).value; },
      py::arg("mac"), "best I(X;Y) over product inputs");

  m.def(
      "cstar_margin",
      [](const DiscreteMac& mac) -> py::object {
        auto w = cstar_test(mac);
        if (!w) return py::none();
        return py::float_(w->margin);
      },
      py::arg("mac"));

  m.def(
      "gain_curve",
      [](const DiscreteMac& mac, const std::vector<double>& hs, const std::vector<double>& c_in,
         const std::vector<double>& v, double epsilon) {
        auto w = cstar_test(mac);
        if (!w) throw PreconditionError("no dependent-input witness");
        const MixtureFamily fam = make_mixture_family(mac, *w, c_in, epsilon, v);
        std::vector<py::dict> rows;
        for (double h : hs) {
          std::vector<double> c_out(mac.k);
          for (int j = 0; j < mac.k; ++j) c_out[j] = h * v[j];
          const auto p = achievable_sum_rate(fam, mac, {c_in, c_out}, h);
          py::dict d;
          d["h"] = p.h;
          d["lambda_star"] = p.lambda_star;
          d["r_sum"] = p.r_sum;
          d["gain"] = p.g;
          d["slope_ratio"] = p.slope_ratio;
          rows.push_back(d);
        }
        return rows;
      },
      py::arg("mac"), py::arg("h"), py::arg("c_in"), py::arg("v"), py::arg("epsilon") = 0.1);

  m.def(
      "gaussian_gains",
      [](const std::vector<double>& c_out, double gamma1, double gamma2, int grid) {
        std::vector<std::tuple<double, double, double, double>> out;
        for (const auto& r : gaussian_gain_rows(c_out, gamma1, gamma2, grid))
          out.emplace_back(r.c_out, r.full_gain, r.forwarding_gain, r.sqrt_term);
        return out;
      },
      py::arg("c_out"), py::arg("gamma1") = 100.0, py::arg("gamma2") = 100.0, py::arg("grid") = 64,
      "rows of (c_out, full gain, forwarding gain, sqrt term)");

  m.def(
      "ldp_exponent",
      [](const std::vector<int>& sizes, const std::vector<double>& mass, double epsilon) {
        return ldp_exponent(JointPmf(sizes, mass), epsilon).combined;
      },
      py::arg("sizes"), py::arg("mass"), py::arg("epsilon"));

  m.def(
      "covering_experiment",
      [](const std::string& json_text) {
        const auto e = covering_experiment_from_json(json_text);
        py::gil_scoped_release release;
        return phase_curve_csv(covering_phase_curve(e.distribution, {e.distribution, e.delta, e.n}, e.rates,
                                                    e.trials, e.seed));
      },
      py::arg("json_text"), "phase curve CSV for a covering experiment");

  m.def(
      "codec_error",
      [](const std::string& json_text) {
        const auto e = codec_experiment_from_json(json_text);
        ErrorEstimate est;
        {
          py::gil_scoped_release release;
          est = estimate_error(e.spec, e.trials);
        }
        return estimate_dict(est);
      },
      py::arg("json_text"), "error estimate at the first block length and rate point");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<const char*> argv{"cfmac"};
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "returns (exit code, stdout, stderr)");
}
