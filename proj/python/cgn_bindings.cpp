// Python bindings for the main operations: load/emit problem descriptions,
// certify a start point, run the solver, verify a run against its
// certificate, and work with the scalar majorant directly.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cgn/demos.hpp"
#include "cgn/json_io.hpp"
#include "cgn/solver.hpp"

namespace py = pybind11;
using namespace cgn;

namespace {

std::string regularity_name(RegularityKind k) {
  switch (k) {
    case RegularityKind::QuasiRegular: return "quasi_regular";
    case RegularityKind::RegularPoint: return "regular_point";
    case RegularityKind::Robinson: return "robinson";
  }
  return "?";
}

std::string problem_repr(const ProblemInputs& in) {
  std::ostringstream os;
  os << "<cgn.Problem n=" << in.problem.map.n() << " m=" << in.problem.map.m()
     << " regularity=" << regularity_name(in.regularity.kind()) << ">";
  return os.str();
}

Certificate certify_problem(const ProblemInputs& in) {
  const Vector F0 = in.problem.map.eval(in.problem.x0);
  const Matrix J0 = in.problem.map.jacobian(in.problem.x0);
  return certify(in.problem.outer, F0, J0, in.problem.delta, in.problem.eta,
                 in.regularity, in.majorant, in.xi_override, in.alpha_override);
}

RunReport run_problem(const ProblemInputs& in, int max_iter) {
  return run(in.problem, max_iter);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Gauss-Newton for convex composite minimization: trust-region "
      "linearized steps with semi-local convergence certificates.";

  py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);

  py::class_<MajorantModel>(m, "MajorantModel",
                            "Scalar majorant f on [0, R) with f(0) = 0, "
                            "f'(0) = -1, f' convex and strictly increasing.")
      .def_static("lipschitz", &MajorantModel::lipschitz, py::arg("K"),
                  py::arg("R"), "f(t) = K t^2 / 2 - t on [0, R)")
      .def_static("smale", &MajorantModel::smale, py::arg("gamma"),
                  "f(t) = t / (1 - gamma t) - 2 t on [0, 1/gamma)")
      .def_static("catalog", &MajorantModel::custom_catalog, py::arg("name"),
                  py::arg("R"), "Named custom model: 'cubic' or 'exponential'")
      .def_static("catalog_names", &MajorantModel::catalog_names)
      .def_property_readonly("radius", &MajorantModel::radius)
      .def("f", &MajorantModel::f, py::arg("t"))
      .def("fp", &MajorantModel::fp, py::arg("t"))
      .def("fpp", &MajorantModel::fpp, py::arg("t"));

  py::class_<ZeroInfo>(m, "ZeroInfo")
      .def_readonly("h3", &ZeroInfo::h3)
      .def_readonly("h4", &ZeroInfo::h4)
      .def_readonly("t_star", &ZeroInfo::t_star)
      .def_readonly("extra_zero", &ZeroInfo::extra_zero)
      .def("__repr__", [](const ZeroInfo& z) {
        std::ostringstream os;
        os << "<cgn.ZeroInfo h3=" << (z.h3 ? "True" : "False");
        if (z.h3) os << " t_star=" << z.t_star;
        os << ">";
        return os.str();
      });

  py::class_<ScalarTrace>(m, "ScalarTrace")
      .def_readonly("t", &ScalarTrace::t)
      .def_readonly("t_star", &ScalarTrace::t_star)
      .def_readonly("h3", &ScalarTrace::h3)
      .def_readonly("h4", &ScalarTrace::h4)
      .def_readonly("q_quadratic", &ScalarTrace::q_quadratic);

  m.def(
      "smallest_zero",
      [](const MajorantModel& f, double xi, double alpha) {
        return smallest_zero(AuxiliaryFunction(f, xi, alpha));
      },
      py::arg("model"), py::arg("xi"), py::arg("alpha"),
      "Smallest zero of f_{xi,alpha}(t) = xi + (alpha - 1) t + alpha f(t).");
  m.def(
      "scalar_sequence",
      [](const MajorantModel& f, double xi, double alpha, double tol,
         int max_iter) {
        return scalar_sequence(AuxiliaryFunction(f, xi, alpha), tol, max_iter);
      },
      py::arg("model"), py::arg("xi"), py::arg("alpha"),
      py::arg("tol") = 1e-12, py::arg("max_iter") = 64,
      "Newton iterates of f_{xi,alpha} from t_0 = 0 up to its smallest zero.");

  py::class_<ProblemInputs>(m, "Problem",
                            "A composite instance min h(F(x)) together with "
                            "its regularity and majorant data.")
      .def_property_readonly(
          "n", [](const ProblemInputs& in) { return in.problem.map.n(); })
      .def_property_readonly(
          "m", [](const ProblemInputs& in) { return in.problem.map.m(); })
      .def_property_readonly(
          "x0", [](const ProblemInputs& in) { return in.problem.x0; })
      .def_property_readonly(
          "delta", [](const ProblemInputs& in) { return in.problem.delta; })
      .def_property_readonly(
          "eta", [](const ProblemInputs& in) { return in.problem.eta; })
      .def_property(
          "tol_step",
          [](const ProblemInputs& in) { return in.problem.tol_step; },
          [](ProblemInputs& in, double v) { in.problem.tol_step = v; })
      .def_property(
          "tol_feas",
          [](const ProblemInputs& in) { return in.problem.tol_feas; },
          [](ProblemInputs& in, double v) { in.problem.tol_feas = v; })
      .def_property_readonly("regularity",
                             [](const ProblemInputs& in) {
                               return regularity_name(in.regularity.kind());
                             })
      .def("F", [](const ProblemInputs& in,
                   const Vector& x) { return in.problem.map.eval(x); },
           py::arg("x"), "Evaluate the inner map F at x.")
      .def("h", [](const ProblemInputs& in,
                   const Vector& z) { return in.problem.outer.eval(z); },
           py::arg("z"), "Evaluate the outer convex function h at z.")
      .def("to_json",
           [](const ProblemInputs& in) { return problem_to_json(in).dump(2); })
      .def("__repr__", &problem_repr);

  m.def("load_problem", &parse_problem_text, py::arg("text"),
        "Parse a problem description from JSON text (raises SchemaError).");
  m.def("load_problem_file", &parse_problem_file, py::arg("path"),
        "Parse a problem description from a JSON file (raises SchemaError).");
  m.def("demo_names", &demo_names);
  m.def("demo", &demo, py::arg("name"), "Built-in instance by name.");

  py::class_<CertificateCheck>(m, "CertificateCheck")
      .def_readonly("name", &CertificateCheck::name)
      .def_readonly("lhs", &CertificateCheck::lhs)
      .def_readonly("rhs", &CertificateCheck::rhs)
      .def_readonly("holds", &CertificateCheck::holds)
      .def("__repr__", [](const CertificateCheck& c) {
        std::ostringstream os;
        os << "<cgn.CertificateCheck " << c.name << ": "
           << (c.holds ? "holds" : "fails") << ">";
        return os.str();
      });

  py::class_<Certificate>(m, "Certificate")
      .def_readonly("valid", &Certificate::valid)
      .def_readonly("rate", &Certificate::rate)
      .def_readonly("eta", &Certificate::eta)
      .def_readonly("delta", &Certificate::delta)
      .def_readonly("d0", &Certificate::d0)
      .def_readonly("xi", &Certificate::xi)
      .def_readonly("alpha", &Certificate::alpha)
      .def_readonly("alpha_bound", &Certificate::alpha_bound)
      .def_readonly("alpha_strictly_above_bound",
                    &Certificate::alpha_strictly_above_bound)
      .def_property_readonly("regularity",
                             [](const Certificate& c) {
                               return regularity_name(c.regularity);
                             })
      .def_readonly("radius", &Certificate::radius)
      .def_readonly("beta0", &Certificate::beta0)
      .def_readonly("vertex_count", &Certificate::vertex_count)
      .def_readonly("beta0_estimated", &Certificate::beta0_estimated)
      .def_readonly("majorant", &Certificate::majorant)
      .def_readonly("h3", &Certificate::h3)
      .def_readonly("h4", &Certificate::h4)
      .def_readonly("t_star", &Certificate::t_star)
      .def_readonly("q_quadratic", &Certificate::q_quadratic)
      .def_readonly("checks", &Certificate::checks)
      .def("to_json",
           [](const Certificate& c) { return certificate_to_json(c).dump(2); })
      .def("__repr__", [](const Certificate& c) {
        std::ostringstream os;
        os << "<cgn.Certificate " << (c.valid ? "valid" : "invalid")
           << " rate=" << c.rate;
        if (c.h3) os << " t_star=" << c.t_star;
        os << ">";
        return os.str();
      });

  m.def("certify", &certify_problem, py::arg("problem"),
        "Build the convergence certificate for the problem's start point.");
  m.def(
      "certificate_from_json",
      [](const std::string& text) {
        try {
          return certificate_from_json(njson::parse(text));
        } catch (const njson::parse_error& e) {
          throw SchemaError(std::string("certificate: malformed JSON: ") +
                            e.what());
        }
      },
      py::arg("text"),
      "Rebuild a certificate from its JSON form (custom majorants without a "
      "catalog name do not survive the round trip).");

  py::class_<IterationRecord>(m, "IterationRecord")
      .def_readonly("k", &IterationRecord::k)
      .def_readonly("x", &IterationRecord::x)
      .def_readonly("h_value", &IterationRecord::h_value)
      .def_readonly("in_C", &IterationRecord::in_C)
      .def_readonly("dist", &IterationRecord::dist)
      .def_readonly("subproblem_value", &IterationRecord::subproblem_value)
      .def_readonly("d", &IterationRecord::d)
      .def_readonly("step_norm", &IterationRecord::step_norm);

  py::class_<MajorizationRow>(m, "MajorizationRow")
      .def_readonly("k", &MajorizationRow::k)
      .def_readonly("t", &MajorizationRow::t)
      .def_readonly("dt", &MajorizationRow::dt)
      .def_readonly("bd1", &MajorizationRow::bd1)
      .def_readonly("bd2", &MajorizationRow::bd2)
      .def_readonly("eq002", &MajorizationRow::eq002)
      .def_readonly("ball", &MajorizationRow::ball);

  py::class_<MajorizationCheck>(m, "MajorizationCheck")
      .def_readonly("rows", &MajorizationCheck::rows)
      .def_readonly("all_ok", &MajorizationCheck::all_ok)
      .def_readonly("guaranteed", &MajorizationCheck::guaranteed)
      .def_readonly("t", &MajorizationCheck::t)
      .def_readonly("t_star", &MajorizationCheck::t_star)
      .def("__repr__", [](const MajorizationCheck& c) {
        std::ostringstream os;
        os << "<cgn.MajorizationCheck " << c.rows.size() << " rows, "
           << (c.all_ok ? "all pass" : "failures") << ">";
        return os.str();
      });

  py::class_<RunReport>(m, "RunReport")
      .def_property_readonly(
          "stop", [](const RunReport& r) { return to_string(r.stop); })
      .def_readonly("steps_taken", &RunReport::steps_taken)
      .def_readonly("x_final", &RunReport::x_final)
      .def_readonly("h_final", &RunReport::h_final)
      .def_readonly("error", &RunReport::error)
      .def_readonly("iterations", &RunReport::iterations)
      .def_readwrite("majorization", &RunReport::majorization,
                     "Attach a MajorizationCheck to add the scalar columns "
                     "to trace_csv().")
      .def("trace_csv", [](const RunReport& r) { return trace_to_csv(r); })
      .def("__repr__", [](const RunReport& r) {
        std::ostringstream os;
        os << "<cgn.RunReport stop=" << to_string(r.stop)
           << " steps=" << r.steps_taken << " h_final=" << r.h_final << ">";
        return os.str();
      });

  m.def("run", &run_problem, py::arg("problem"), py::arg("max_iter") = 100,
        "Run the Gauss-Newton iteration from the problem's start point.");
  m.def("verify_majorization", &verify_majorization, py::arg("report"),
        py::arg("certificate"),
        "Compare a finished run row-by-row against the certificate's scalar "
        "majorizing sequence.");
}
