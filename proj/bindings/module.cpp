#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "plapwave/experiments.hpp"

namespace py = pybind11;
using namespace plapwave;

namespace {

py::object json_to_py(const nlohmann::ordered_json& j) {
  py::module_ json = py::module_::import("json");
  return json.attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Galerkin semidiscretization of the damped p-Laplacian wave equation";

  py::class_<Mesh, std::shared_ptr<Mesh>>(m, "Mesh")
      .def(py::init<int, int>(), py::arg("n_elements"), py::arg("quad_order") = 4)
      .def_property_readonly("n_elements", &Mesh::n_elements)
      .def_property_readonly("n_nodes", &Mesh::n_nodes)
      .def_property_readonly("nodes", &Mesh::nodes);

  py::class_<BasisSet, std::shared_ptr<BasisSet>>(m, "BasisSet")
      .def_static("fem_hat",
                  [](int n_elements, int quad_order) {
                    return std::const_pointer_cast<BasisSet>(BasisSet::fem_hat(
                        std::make_shared<const Mesh>(n_elements, quad_order)));
                  },
                  py::arg("n_elements"), py::arg("quad_order") = 4)
      .def_static("robin_eigen",
                  [](int n_elements, int count, int quad_order) {
                    return std::const_pointer_cast<BasisSet>(BasisSet::robin_eigen(
                        std::make_shared<const Mesh>(n_elements, quad_order), count));
                  },
                  py::arg("n_elements"), py::arg("count"), py::arg("quad_order") = 4)
      .def_property_readonly("size", &BasisSet::size)
      .def_property_readonly("mass", &BasisSet::mass)
      .def_property_readonly("stiffness", &BasisSet::stiffness)
      .def_property_readonly("boundary_mass", &BasisSet::boundary_mass)
      .def_property_readonly("eigenvalues", &BasisSet::eigenvalues);

  py::class_<Field>(m, "Field")
      .def_property_readonly("coeffs", [](const Field& f) { return f.coeffs; })
      .def_property_readonly("basis",
                             [](const Field& f) { return std::const_pointer_cast<BasisSet>(f.basis); });

  m.def("make_field",
        [](std::shared_ptr<const BasisSet> b, Eigen::VectorXd c) {
          return make_field(std::move(b), std::move(c));
        },
        "field from coefficients");
  m.def("project_l2", &project_L2, "L2 projection of a callable");
  m.def("interpolate", &interpolate, "nodal interpolation (hat basis)");
  m.def("eval_field", &eval, "point value");
  m.def("norm_w1p", &norm_w1p);
  m.def("norm_l2", &norm_l2);
  m.def("w1p_distance", &w1p_distance);

  py::class_<SourceSpec>(m, "SourceSpec")
      .def_static("zero", &SourceSpec::zero)
      .def_static("power", &SourceSpec::power, py::arg("a"), py::arg("r"))
      .def_static("power_plus_linear", &SourceSpec::power_plus_linear, py::arg("a"), py::arg("b"),
                  py::arg("r"))
      .def("f", &SourceSpec::f)
      .def("f_prime", &SourceSpec::f_prime)
      .def("primitive", &SourceSpec::primitive)
      .def_property_readonly("r", &SourceSpec::r);

  py::class_<TruncationSpec>(m, "TruncationSpec")
      .def_static("none", &TruncationSpec::none)
      .def_static("radial", &TruncationSpec::radial, py::arg("K"))
      .def_static("cutoff", &TruncationSpec::cutoff, py::arg("n"));

  m.def("cutoff_eta", &cutoff_eta);
  m.def("cutoff_eta_prime", &cutoff_eta_prime);

  py::class_<PLaplacianForm>(m, "PLaplacianForm")
      .def(py::init<std::shared_ptr<const BasisSet>, double>(), py::arg("basis"), py::arg("p"))
      .def("apply", &PLaplacianForm::apply)
      .def("tangent", &PLaplacianForm::tangent)
      .def("pairing", &PLaplacianForm::pairing);

  m.def("horizon_radius", &horizon_radius, py::arg("p"), py::arg("script_E0"));
  m.def("local_horizon_estimate",
        [](double p, double e0, double c_k) {
          const HorizonEstimate est = local_horizon_estimate(p, e0, c_k);
          return py::make_tuple(est.K, est.T0);
        },
        "(K, T0) for the truncated problem");
  m.def("gronwall_envelope", &gronwall_envelope);
  m.def("classify_regime",
        [](double p, double r) { return json_to_py(to_json(classify_regime(p, r))); });

  m.def("run_experiment_json",
        [](const std::string& config_json, const std::string& policy) {
          const RunConfig cfg = parse_config_json(nlohmann::json::parse(config_json));
          const ValidationPolicy pol =
              policy == "permissive" ? ValidationPolicy::Permissive : ValidationPolicy::Strict;
          return json_to_py(run_experiment(cfg, pol).to_json());
        },
        py::arg("config_json"), py::arg("policy") = "strict",
        "run one experiment, returning the report as a dict");

  m.def("integrate_json",
        [](const std::string& config_json) {
          const RunConfig cfg = parse_config_json(nlohmann::json::parse(config_json));
          const Trajectory traj = integrate(build_problem(cfg));
          std::vector<double> t, script_e, balance;
          for (const EnergyRecord& r : traj.records) {
            t.push_back(r.t);
            script_e.push_back(r.script_E);
            balance.push_back(r.balance_residual);
          }
          py::dict out;
          out["t"] = t;
          out["script_E"] = script_e;
          out["balance_residual"] = balance;
          out["termination"] = to_string(traj.termination);
          return out;
        },
        "integrate one configured problem, returning the energy history");
}
