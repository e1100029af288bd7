#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gems/algorithms.hpp"
#include "gems/checks.hpp"
#include "gems/config.hpp"
#include "gems/design.hpp"
#include "gems/instance.hpp"
#include "gems/misspec.hpp"
#include "gems/report.hpp"
#include "gems/rounding.hpp"
#include "gems/simulation.hpp"

namespace py = pybind11;

namespace {

gems::RdFormula formula_from(const std::string& s) {
  if (s == "quadratic") return gems::RdFormula::quadratic;
  if (s == "linear_alt") return gems::RdFormula::linear_alt;
  throw std::invalid_argument("unknown r_d formula \"" + s + "\"");
}

py::dict solution_dict(const gems::DesignSolution& sol) {
  py::dict d;
  d["value"] = sol.value;
  d["weights"] = sol.weights;
  d["iterations"] = sol.iterations;
  d["relative_gap"] = sol.relative_gap;
  return d;
}

}  // namespace

PYBIND11_MODULE(pygems, m) {
  m.doc() = "model selection for pure-exploration linear bandits";

  py::class_<gems::Instance>(m, "Instance",
                             "arms/targets as matrix columns, gaps <= 2")
      .def(py::init<gems::Mat, gems::Vec, gems::Mat, gems::Vec,
                    std::optional<gems::Vec>, std::optional<int>>(),
           py::arg("arms"), py::arg("arm_rewards"), py::arg("targets"),
           py::arg("target_rewards"), py::arg("theta") = std::nullopt,
           py::arg("intrinsic_dim") = std::nullopt)
      .def_static("linear", &gems::Instance::linear, py::arg("arms"),
                  py::arg("targets"), py::arg("theta"),
                  py::arg("intrinsic_dim") = std::nullopt)
      .def_property_readonly("dim", &gems::Instance::dim)
      .def_property_readonly("num_arms", &gems::Instance::num_arms)
      .def_property_readonly("num_targets", &gems::Instance::num_targets)
      .def_property_readonly("best_target", &gems::Instance::best_target)
      .def_property_readonly("intrinsic_dim", &gems::Instance::intrinsic_dim)
      .def_property_readonly("min_gap", &gems::Instance::min_gap)
      .def_property_readonly("max_gap", &gems::Instance::max_gap)
      .def("arms", &gems::Instance::arms)
      .def("targets", &gems::Instance::targets)
      .def("gap", &gems::Instance::gap, py::arg("z"))
      .def("arm_reward", &gems::Instance::arm_reward, py::arg("i"))
      .def("target_reward", &gems::Instance::target_reward, py::arg("z"))
      .def("stratum", &gems::Instance::stratum, py::arg("k"));

  m.def("make_hard_instance", &gems::make_hard_instance, py::arg("d_star"),
        py::arg("eps"), py::arg("with_x0") = false);
  m.def("make_unverifiable_instance", &gems::make_unverifiable_instance,
        py::arg("dim"));

  m.def(
      "compute_iota",
      [](const gems::Instance& inst, int d) {
        return gems::compute_iota(inst, d);
      },
      py::arg("instance"), py::arg("d"));
  m.def("iota_star",
        [](const gems::Instance& inst, int d) {
          return gems::iota_star(inst, d);
        },
        py::arg("instance"), py::arg("d"));
  m.def(
      "compute_rho",
      [](const gems::Instance& inst, int d, double eps) {
        return gems::compute_rho(inst, d, eps);
      },
      py::arg("instance"), py::arg("d"), py::arg("eps") = 0.0);
  m.def(
      "compute_rho_tilde",
      [](const gems::Instance& inst, int d, double eps, const gems::Vec& th) {
        return gems::compute_rho_tilde(inst, d, eps, th);
      },
      py::arg("instance"), py::arg("d"), py::arg("eps"), py::arg("theta_d"));
  m.def(
      "solve_design",
      [](const std::vector<gems::Vec>& dirs, const gems::Mat& psi) {
        return solution_dict(gems::solve_design(dirs, psi));
      },
      py::arg("directions"), py::arg("psi"));
  m.def(
      "solve_rho_design",
      [](const gems::Instance& inst, int d, double eps) {
        return solution_dict(gems::solve_rho_design(inst, d, eps));
      },
      py::arg("instance"), py::arg("d"), py::arg("eps") = 0.0);

  m.def(
      "chebyshev_fit",
      [](const gems::Instance& inst, int d) {
        gems::ChebyshevFit fit = gems::chebyshev_fit(inst, d);
        return py::make_tuple(fit.theta, fit.gamma_tilde);
      },
      py::arg("instance"), py::arg("d"),
      "returns (theta_d, gamma_tilde)");
  m.def(
      "compute_gamma",
      [](const gems::Instance& inst, int d, double zeta) {
        return gems::compute_gamma(inst, d, zeta);
      },
      py::arg("instance"), py::arg("d"), py::arg("zeta") = 0.25);
  m.def(
      "compute_d_star",
      [](const gems::Instance& inst, double eps, double zeta) {
        return gems::compute_d_star(inst, eps, zeta);
      },
      py::arg("instance"), py::arg("eps"), py::arg("zeta") = 0.25);

  m.def(
      "r_d",
      [](int d, double zeta, const std::string& formula) {
        return gems::r_d(d, zeta, formula_from(formula));
      },
      py::arg("d"), py::arg("zeta"), py::arg("formula") = "quadratic");
  m.def("w_of", &gems::w_of, py::arg("t"));
  m.def(
      "round_design",
      [](const gems::Vec& weights, long long n, const gems::Mat& psi,
         const std::vector<gems::Vec>& dirs, double zeta,
         const std::string& formula) {
        return gems::round_design(weights, n, psi, dirs, zeta,
                                  formula_from(formula))
            .counts;
      },
      py::arg("weights"), py::arg("n"), py::arg("psi"), py::arg("directions"),
      py::arg("zeta"), py::arg("formula") = "quadratic");

  m.def(
      "run_batch",
      [](const py::object& config) {
        std::string text;
        if (py::isinstance<py::str>(config))
          text = config.cast<std::string>();
        else
          text = py::module_::import("json")
                     .attr("dumps")(config)
                     .cast<std::string>();
        gems::ExperimentConfig cfg = gems::parse_config(gems::Json::parse(text));
        if (!cfg.has_algorithm)
          throw std::invalid_argument("config: run_batch needs an algorithm");
        gems::BatchReport rep = gems::run_batch(
            cfg.instance, cfg.algo, cfg.trials, cfg.seed, cfg.noise, cfg.opts);
        return py::module_::import("json").attr("loads")(
            gems::batch_report_json(rep, cfg));
      },
      py::arg("config"), "config is a dict or a JSON string");

  m.def("run_suite",
        [](const std::string& name) {
          gems::SuiteResult res = gems::run_suite(name);
          return py::make_tuple(res.pass, res.report);
        },
        py::arg("name"), "returns (pass, report)");
}
