#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "blochlab/bloch/functions.hpp"
#include "blochlab/certify/certify.hpp"
#include "blochlab/core/errors.hpp"
#include "blochlab/core/expression.hpp"
#include "blochlab/core/hyperbolic.hpp"
#include "blochlab/martingale/martingale.hpp"
#include "blochlab/spectra/spectra.hpp"
#include "blochlab/transforms/transforms.hpp"

namespace py = pybind11;
using namespace blochlab;
using core::BlochFunction;
using core::Complex;

namespace {

py::object to_python(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

py::tuple pair(const core::Interval& x) { return py::make_tuple(x.lo(), x.hi()); }

core::HyperbolicPoint point_for(const BlochFunction& b, Complex z) { return core::HyperbolicPoint::make(z, b.domain()); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bloch space numerics and certified bounds";

  auto base = py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<EvaluationError>(m, "EvaluationError", PyExc_ArithmeticError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
  py::register_exception<InconclusiveError>(m, "InconclusiveError", PyExc_RuntimeError);

  py::class_<BlochFunction>(m, "BlochFunction")
      .def("__call__", &BlochFunction::operator(), py::arg("z"))
      .def("derivative", &BlochFunction::derivative, py::arg("z"))
      .def_property_readonly("label", &BlochFunction::label)
      .def_property_readonly("domain", [](const BlochFunction& b) { return std::string(core::to_string(b.domain())); })
      .def_property_readonly("declared_norm", &BlochFunction::declared_norm)
      .def("__repr__", [](const BlochFunction& b) { return "<BlochFunction " + b.label() + ">"; });

  m.def("parse_function", [](const std::string& spec) { return bloch::parse_function_spec(spec); }, py::arg("spec"),
        "Build a function from the spec language (special:a, lacunary:n, poly:..., logmap, logz, exp(...)).");
  m.def("bloch_quotient", [](const BlochFunction& b, Complex z) { return core::bloch_quotient(b, z); });
  m.def("bloch_norm_estimate", &bloch::bloch_norm_estimate, py::arg("f"), py::arg("samples") = 4096);
  m.def("special_q0", &bloch::special_q0);
  m.def("special_q1", &bloch::special_q1);
  m.def("hyperbolic_radius", &core::hyperbolic_radius);
  m.def("interval_eval", [](const std::string& e, long p) { return pair(core::interval_eval(e, p)); },
        py::arg("expression"), py::arg("precision") = 53);

  m.def(
      "variance_circle",
      [](const BlochFunction& b, const std::vector<double>& rs) { return to_python(spectra::to_json(spectra::variance_circle(b, rs))); },
      py::arg("f"), py::arg("rs"));
  m.def(
      "variance_strip",
      [](const BlochFunction& b, const std::vector<double>& hs) { return to_python(spectra::to_json(spectra::variance_strip(b, hs))); },
      py::arg("f"), py::arg("hs"));
  m.def(
      "integral_means",
      [](const BlochFunction& b, Complex tau, const std::vector<double>& rs, bool normalized) {
        return to_python(spectra::to_json(spectra::integral_means_run(b, tau, rs, normalized)));
      },
      py::arg("f"), py::arg("tau"), py::arg("rs"), py::arg("normalized") = false);
  m.def(
      "alpha_average",
      [](const BlochFunction& b, Complex center, double R) { return spectra::alpha_average(b, point_for(b, center), R); },
      py::arg("f"), py::arg("center"), py::arg("R"));
  m.def("alpha_sup_estimate", &spectra::alpha_sup_estimate, py::arg("R"), py::arg("budget"), py::arg("seed") = 0);

  m.def(
      "bergman_project",
      [](const BlochFunction& b, Complex z, double tol) {
        return transforms::bergman_project(transforms::mu_from_bloch(b), z, tol);
      },
      py::arg("f"), py::arg("z"), py::arg("tol") = 1e-4, "Bergman projection of the coefficient built from f.");
  m.def(
      "beurling_quotient",
      [](const BlochFunction& b, Complex z, double tol) {
        return transforms::beurling_quotient(transforms::mu_from_bloch(b), z, tol);
      },
      py::arg("f"), py::arg("z"), py::arg("tol") = 1e-4);
  m.def(
      "box_average",
      [](const BlochFunction& b, int n, std::int64_t j, int k, double tol) {
        return transforms::box_average(b, {n, j, k}, tol);
      },
      py::arg("f"), py::arg("n"), py::arg("j"), py::arg("k"), py::arg("tol") = 1e-9);
  m.def(
      "collar_ratio", [](int n, double S) { return transforms::collar_ratio({n, 0, 0}, S); }, py::arg("n"),
      py::arg("S"));
  m.def(
      "weighted_box_area", [](int n, std::int64_t j, int k) { return transforms::NAdicBox{n, j, k}.weighted_area(); },
      py::arg("n"), py::arg("j"), py::arg("k"));

  m.def(
      "build_martingale",
      [](const BlochFunction& b, int n, int depth, double h0) {
        return to_python(martingale::build_martingale(b, n, depth, h0).to_json());
      },
      py::arg("f"), py::arg("n"), py::arg("depth"), py::arg("h0"));
  m.def(
      "compare_box_variance",
      [](const BlochFunction& b, int n, int level, std::int64_t j, double h0) {
        return martingale::compare_box_variance(b, n, {level, j}, h0);
      },
      py::arg("f"), py::arg("n"), py::arg("level"), py::arg("j"), py::arg("h0"));

  m.def(
      "certify_sigma",
      [](const std::string& r, long precision, int grid, int threads) {
        certify::CertifyOptions opt;
        opt.precision = precision;
        opt.grid = grid;
        opt.threads = threads;
        py::gil_scoped_release release;
        const auto cert = certify::certify_sigma(core::Rational::parse(r), opt);
        py::gil_scoped_acquire acquire;
        return to_python(cert.to_json());
      },
      py::arg("r") = "2/5", py::arg("precision") = 53, py::arg("grid") = 1000, py::arg("threads") = 1,
      "Run the certificate and return its JSON document as a dict.");
  m.def(
      "tail_bound",
      [](const std::string& r, int K, int cutoff) {
        return pair(certify::tail_bound(core::Rational::parse(r), K, cutoff).box);
      },
      py::arg("r"), py::arg("K"), py::arg("cutoff") = 60);
  m.def(
      "parseval_q3_bound", [](const std::string& s2) { return pair(certify::parseval_q3_bound(core::Rational::parse(s2)).box); },
      py::arg("s2"));
}
