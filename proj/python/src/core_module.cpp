#include "beq/errors.hpp"
#include "beq/geometry.hpp"
#include "beq/runner.hpp"
#include "beq/sets.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace beq;

namespace {

py::dict record_dict(const IterateRecord& r) {
  py::dict d;
  d["n"] = r.n;
  d["x"] = r.x.coords();
  d["y"] = r.y.coords();
  d["z"] = r.z.coords();
  d["t"] = r.t.coords();
  d["alpha"] = r.alpha;
  d["beta"] = r.beta;
  d["lambda"] = r.lambda;
  d["phi_x0_xn"] = r.monitors.phi_x0_xn;
  if (r.ls) {
    d["w"] = r.ls->w.coords();
    d["sigma"] = r.ls->sigma;
    d["m"] = r.ls->m;
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Hybrid extragradient and linesearch solvers for equilibrium problems";

  py::register_exception<Error>(m, "SolverError");

  py::class_<Geometry>(m, "Geometry")
      .def_static("euclidean", &Geometry::euclidean, py::arg("dim"))
      .def_static("lp", &Geometry::lp, py::arg("dim"), py::arg("p"), py::arg("c") = std::nullopt)
      .def_property_readonly("dim", &Geometry::dim)
      .def_property_readonly("p", &Geometry::p)
      .def_property_readonly("c", &Geometry::uniform_convexity_constant)
      .def("norm", [](const Geometry& g, Eigen::VectorXd x) { return g.norm(PrimalVector(std::move(x))); })
      .def("duality_map",
           [](const Geometry& g, Eigen::VectorXd x) { return g.duality_map(PrimalVector(std::move(x))).coords(); })
      .def("inverse_duality_map",
           [](const Geometry& g, Eigen::VectorXd u) { return g.inverse_duality_map(DualVector(std::move(u))).coords(); })
      .def("phi", [](const Geometry& g, Eigen::VectorXd x, Eigen::VectorXd y) {
        return g.phi(PrimalVector(std::move(x)), PrimalVector(std::move(y)));
      });

  m.def(
      "retract_box",
      [](const Geometry& g, Eigen::VectorXd lo, Eigen::VectorXd hi, Eigen::VectorXd x) {
        const RetractionReport r = sunny_retract(g, ConvexSet::box(std::move(lo), std::move(hi)), PrimalVector(std::move(x)));
        return py::make_tuple(r.point.coords(), r.optimality_residual);
      },
      py::arg("geometry"), py::arg("lo"), py::arg("hi"), py::arg("x"),
      "Minimizer of phi(., x) over a box, with its optimality residual.");

  m.def(
      "run_config",
      [](const std::string& text, const std::string& base_dir, std::optional<double> quantization,
         std::uint64_t seed) {
        RunOverrides o;
        o.quantization = quantization;
        o.seed = seed;
        RunOutcome out;
        try {
          out = run(parse_run_config(text, base_dir), o);
        } catch (const Error& e) {
          out.exit_code = exit_code_for(e.code());
          out.diagnostic = e.what();
          out.summary = "{}";
        }
        py::list records;
        if (out.result) {
          for (const IterateRecord& r : out.result->trace.records) records.append(record_dict(r));
        }
        return py::make_tuple(out.exit_code, out.summary, out.diagnostic, records);
      },
      py::arg("text"), py::arg("base_dir") = "", py::arg("quantization") = std::nullopt, py::arg("seed") = 42);
}
