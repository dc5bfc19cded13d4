// Python module microlocal._core. Signals are 1-D numpy arrays (real or complex) of length 2^D;
// coefficient fields are lists of per-level arrays.

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <bit>

#include "microlocal/corpus.hpp"
#include "microlocal/errors.hpp"
#include "microlocal/funcnorm.hpp"
#include "microlocal/lpdecomp.hpp"
#include "microlocal/operators.hpp"
#include "microlocal/suites.hpp"
#include "microlocal/synthesis.hpp"

namespace py = pybind11;
namespace ml = microlocal;

namespace {

using CArray = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;

ml::SampledSignal to_signal(const CArray& a) {
  if (a.ndim() != 1) throw ml::InvalidInput("signal must be a 1-D array");
  const auto n = static_cast<std::size_t>(a.shape(0));
  if (n < 2 || !std::has_single_bit(n)) throw ml::InvalidInput("signal length must be a power of two >= 2");
  const int depth = std::countr_zero(n);
  std::vector<ml::Complex> v(a.data(), a.data() + n);
  return ml::SampledSignal(1, depth, std::move(v));
}

py::array to_array(const ml::SampledSignal& f) {
  if (f.is_real()) {
    const auto r = f.real_part();
    return py::array_t<double>(static_cast<py::ssize_t>(r.size()), r.data());
  }
  return CArray(static_cast<py::ssize_t>(f.size()), f.values().data());
}

std::vector<CArray> field_to_list(const ml::CoefField& c) {
  std::vector<CArray> out;
  for (const auto& lv : c.levels()) out.emplace_back(static_cast<py::ssize_t>(lv.size()), lv.data());
  return out;
}

ml::CoefField list_to_field(const std::vector<CArray>& levels) {
  std::vector<std::vector<ml::Complex>> v;
  for (const auto& a : levels) v.emplace_back(a.data(), a.data() + a.size());
  return ml::CoefField::from_levels(1, std::move(v));
}

py::dict report_dict(const ml::NormReport& r) {
  py::dict d;
  d["value"] = r.value;
  d["witness_Q"] = py::make_tuple(r.witness_Q.level, r.witness_Q.k[0]);
  d["witness_P"] = py::make_tuple(r.witness_P.level, r.witness_P.k[0]);
  d["depth"] = r.depth;
  if (r.truncation_delta) d["truncation_delta"] = *r.truncation_delta;
  return d;
}

ml::FilterBank bank_for(int depth) { return ml::build_filter_bank(1, depth); }

py::object suite_json(const ml::SuiteReport& r) {
  return py::module_::import("json").attr("loads")(r.to_json().dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "2-microlocal Besov and Triebel-Lizorkin norms on the periodic grid";

  py::enum_<ml::Family>(m, "Family").value("B", ml::Family::B).value("F", ml::Family::F);

  py::class_<ml::SpaceParams>(m, "SpaceParams")
      .def(py::init([](ml::Family family, bool tilde, double s, double sprime, double sigma, double p, double q,
                       double x0) {
             ml::SpaceParams sp;
             sp.family = family;
             sp.tilde = tilde;
             sp.s = s;
             sp.sprime = sprime;
             sp.sigma = sigma;
             sp.p = p;
             sp.q = q;
             sp.x0 = {x0, 0.0};
             sp.validate(1);
             return sp;
           }),
           py::arg("family") = ml::Family::B, py::arg("tilde") = false, py::arg("s") = 0.0, py::arg("sprime") = 0.0,
           py::arg("sigma") = 0.0, py::arg("p") = 2.0, py::arg("q") = 2.0, py::arg("x0") = 0.0)
      .def_readwrite("family", &ml::SpaceParams::family)
      .def_readwrite("tilde", &ml::SpaceParams::tilde)
      .def_readwrite("s", &ml::SpaceParams::s)
      .def_readwrite("sprime", &ml::SpaceParams::sprime)
      .def_readwrite("sigma", &ml::SpaceParams::sigma)
      .def_readwrite("p", &ml::SpaceParams::p)
      .def_readwrite("q", &ml::SpaceParams::q)
      .def_property(
          "x0", [](const ml::SpaceParams& sp) { return sp.x0[0]; },
          [](ml::SpaceParams& sp, double x) { sp.x0 = {x, 0.0}; });

  m.def(
      "norm",
      [](const CArray& f, const ml::SpaceParams& params, int virtual_levels, bool truncation_delta) {
        const auto sig = to_signal(f);
        ml::FullNormOptions opt;
        opt.virtual_levels = virtual_levels;
        opt.truncation_delta = truncation_delta;
        return report_dict(ml::full_norm(sig, params, bank_for(sig.depth()), opt));
      },
      py::arg("f"), py::arg("params"), py::arg("virtual_levels") = 4, py::arg("truncation_delta") = false,
      "Function-space norm via the Littlewood-Paley pieces.");

  m.def(
      "sequence_norm",
      [](const std::vector<CArray>& levels, const ml::SpaceParams& params, int virtual_levels) {
        return report_dict(ml::outer_norm(list_to_field(levels), params, virtual_levels));
      },
      py::arg("levels"), py::arg("params"), py::arg("virtual_levels") = 4);

  m.def(
      "phi_analysis",
      [](const CArray& f) {
        const auto sig = to_signal(f);
        return field_to_list(ml::phi_analysis(sig, bank_for(sig.depth())));
      },
      py::arg("f"));
  m.def(
      "phi_synthesis",
      [](const std::vector<CArray>& levels) {
        const auto c = list_to_field(levels);
        return to_array(ml::phi_synthesis(c, ml::build_dual_bank(bank_for(c.depth()))));
      },
      py::arg("levels"));

  m.def(
      "wavelet_analysis",
      [](const CArray& f, int r) {
        const auto coefs = ml::wavelet_analysis(to_signal(f), ml::build_wavelet_system(r));
        return py::make_tuple(coefs.c0, field_to_list(coefs.c));
      },
      py::arg("f"), py::arg("r") = 4, "Returns (c0, levels) for the Daubechies system with r vanishing moments.");
  m.def(
      "wavelet_synthesis",
      [](ml::Complex c0, const std::vector<CArray>& levels, int r) {
        return to_array(ml::wavelet_synthesis({c0, list_to_field(levels)}, ml::build_wavelet_system(r)));
      },
      py::arg("c0"), py::arg("levels"), py::arg("r") = 4);

  m.def(
      "equivalence",
      [](const CArray& f, const ml::SpaceParams& params, int r, int virtual_levels) {
        const auto sig = to_signal(f);
        const auto e = ml::equivalence_report(sig, params, bank_for(sig.depth()), ml::build_wavelet_system(r),
                                              virtual_levels);
        py::dict d;
        d["function"] = e.function_norm;
        d["phi"] = e.phi_norm;
        d["wavelet"] = e.wavelet_norm;
        d["log_phi_over_function"] = e.log_phi_over_function;
        d["log_wavelet_over_function"] = e.log_wavelet_over_function;
        d["log_wavelet_over_phi"] = e.log_wavelet_over_phi;
        return d;
      },
      py::arg("f"), py::arg("params"), py::arg("r") = 8, py::arg("virtual_levels") = 4);

  m.def(
      "difference_norms",
      [](const CArray& f, const ml::SpaceParams& params, int k, int virtual_levels) {
        const auto sig = to_signal(f);
        ml::DifferenceSpec spec;
        spec.k = k;
        spec.p = params.p;
        spec.sprime = params.sprime;
        const auto r = ml::difference_norms(sig, params, spec, bank_for(sig.depth()), virtual_levels);
        py::dict d;
        d["lhs"] = r.lhs;
        d["sup_difference"] = r.sup_difference;
        d["oscillation"] = r.oscillation;
        d["mean_difference"] = r.mean_difference;
        d["level_cap"] = r.level_cap;
        return d;
      },
      py::arg("f"), py::arg("params"), py::arg("k") = 2, py::arg("virtual_levels") = 4);

  m.def(
      "bessel_potential", [](const CArray& f, double mu) { return to_array(ml::bessel_potential(to_signal(f), mu)); },
      py::arg("f"), py::arg("mu"));
  m.def(
      "hilbert",
      [](const CArray& f) {
        const auto sig = to_signal(f);
        return to_array(ml::apply_multiplier(sig, ml::hilbert_multiplier(sig.depth())));
      },
      py::arg("f"));

  m.def(
      "frontier_scan",
      [](const CArray& f, double x0, const std::vector<double>& s_grid, const std::vector<double>& sprime_grid,
         double threshold) {
        py::list out;
        for (const auto& c : ml::frontier_scan(to_signal(f), x0, s_grid, sprime_grid, threshold)) {
          py::dict d;
          d["s"] = c.s;
          d["sprime"] = c.sprime;
          d["finite"] = c.finite;
          d["value"] = c.value;
          d["log2_growth"] = c.log2_growth;
          out.append(d);
        }
        return out;
      },
      py::arg("f"), py::arg("x0"), py::arg("s_grid"), py::arg("sprime_grid"), py::arg("threshold") = 0.05);

  m.def("cusp", [](int depth, double alpha, double x0) { return to_array(ml::cusp(depth, alpha, x0)); },
        py::arg("depth"), py::arg("alpha") = 0.5, py::arg("x0") = 0.5);
  m.def("chirp",
        [](int depth, double alpha, double beta, double x0) { return to_array(ml::chirp(depth, alpha, beta, x0)); },
        py::arg("depth"), py::arg("alpha") = 1.0, py::arg("beta") = 0.5, py::arg("x0") = 0.5);
  m.def("weierstrass", [](int depth, double h, int terms) { return to_array(ml::weierstrass(depth, h, terms)); },
        py::arg("depth"), py::arg("hurst") = 0.5, py::arg("terms") = 7);
  m.def("band_limited_noise",
        [](int depth, std::uint64_t seed, int max_freq, double decay) {
          return to_array(ml::band_limited_noise(depth, seed, max_freq, decay));
        },
        py::arg("depth"), py::arg("seed"), py::arg("max_freq") = 60, py::arg("decay") = 1.0);

  m.def(
      "run_suite",
      [](const std::string& name, const std::string& calibration_path) {
        ml::SuiteConfig cfg;
        cfg.calibration_path = calibration_path;
        if (name == "filter-bank") return suite_json(ml::filter_bank_suite(cfg));
        if (name == "round-trips") return suite_json(ml::round_trip_suite(cfg));
        if (name == "embeddings") return suite_json(ml::embeddings_suite(cfg));
        if (name == "degeneracy") return suite_json(ml::degeneracy_suite(cfg));
        if (name == "almost-diagonal") return suite_json(ml::almost_diagonal_suite(cfg, true));
        if (name == "equivalence") {
          ml::require(!calibration_path.empty(), "the equivalence suite needs a calibration file path");
          return suite_json(ml::equivalence_suite(cfg));
        }
        if (name == "operators") return suite_json(ml::operators_suite(cfg));
        if (name == "differences") return suite_json(ml::differences_suite(cfg));
        if (name == "frontier") return suite_json(ml::frontier_suite(cfg));
        throw ml::InvalidInput("unknown suite: " + name);
      },
      py::arg("name"), py::arg("calibration_path") = "");
}
