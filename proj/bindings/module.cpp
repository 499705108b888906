#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "json.hpp"
#include "segmarket/cli.hpp"
#include "segmarket/designer.hpp"
#include "segmarket/efficiency.hpp"
#include "segmarket/equilibrium.hpp"
#include "segmarket/errors.hpp"
#include "segmarket/oracle.hpp"
#include "segmarket/output.hpp"
#include "segmarket/planner.hpp"
#include "segmarket/scenario.hpp"

namespace py = pybind11;
using namespace segmarket;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Solvers for frictional directed-search markets";

  py::register_exception<validation_error>(m, "ValidationError");
  py::register_exception<assumption_error>(m, "AssumptionError");
  py::register_exception<solver_error>(m, "SolverError");

  py::enum_<OddsCurvatureClass>(m, "OddsCurvature")
      .value("CONCAVE", OddsCurvatureClass::Concave)
      .value("CONVEX", OddsCurvatureClass::Convex)
      .value("AFFINE", OddsCurvatureClass::Affine)
      .value("NEITHER", OddsCurvatureClass::Neither);

  py::class_<MeetingFunction>(m, "MeetingFunction")
      .def_static("ces", &MeetingFunction::ces, py::arg("alpha"), py::arg("beta"),
                  py::arg("rho"))
      .def_static("urn_ball", &MeetingFunction::urn_ball, py::arg("alpha"),
                  py::arg("beta"))
      .def_property_readonly("alpha", &MeetingFunction::alpha)
      .def_property_readonly("beta", &MeetingFunction::beta)
      .def("m", &MeetingFunction::m, py::arg("t"))
      .def("m_prime", &MeetingFunction::m_prime, py::arg("t"))
      .def("elasticity", &MeetingFunction::elasticity, py::arg("t"))
      .def("f", &MeetingFunction::f, py::arg("y"))
      .def("g", &MeetingFunction::g, py::arg("y"))
      .def("g_prime", &MeetingFunction::g_prime, py::arg("y"));

  m.def(
      "classify_odds",
      [](const MeetingFunction& mf, std::optional<std::vector<double>> grid) {
        const auto probe = grid ? *grid : default_odds_probe_grid();
        const auto result = classify_odds(mf, probe);
        return py::make_tuple(result.cls, result.worst_second_difference);
      },
      py::arg("mf"), py::arg("probe_grid") = py::none());

  py::class_<Prior>(m, "Prior")
      .def_static("uniform", &Prior::uniform, py::arg("n"))
      .def_static("from_points", &Prior::from_points, py::arg("grid"),
                  py::arg("weights"))
      .def_readonly("grid", &Prior::grid)
      .def_readonly("weights", &Prior::weights)
      .def("mean", &Prior::mean)
      .def("cdf", &Prior::cdf, py::arg("x"));

  py::class_<SurplusSplit>(m, "SurplusSplit")
      .def_static("constant", &SurplusSplit::constant, py::arg("ell"))
      .def_static("table", &SurplusSplit::table, py::arg("values"))
      .def_property_readonly("is_constant", &SurplusSplit::is_constant)
      .def("at", &SurplusSplit::at, py::arg("prior"), py::arg("index"));

  py::class_<Submarket>(m, "Submarket")
      .def_readonly("weight", &Submarket::weight)
      .def_readonly("posterior", &Submarket::posterior);

  py::class_<Segmentation>(m, "Segmentation")
      .def_readonly("submarkets", &Segmentation::submarkets)
      .def("posterior_means", &Segmentation::posterior_means, py::arg("prior"));

  m.def("perfect_segmentation", &perfect_segmentation, py::arg("prior"));
  m.def("pooled_segmentation", &pooled_segmentation, py::arg("prior"));
  m.def(
      "binary_segmentation",
      [](const Prior& prior, int cutoff_index, double split) {
        const auto result = binary_segmentation(prior, cutoff_index, split);
        return py::make_tuple(result.segmentation, result.low_mean,
                              result.high_mean);
      },
      py::arg("prior"), py::arg("cutoff_index"), py::arg("split") = 1.0);
  m.def(
      "verify_consistency",
      [](const Prior& prior, const Segmentation& seg) {
        const auto report = verify_consistency(prior, seg);
        return py::make_tuple(report.consistent, report.max_residual);
      },
      py::arg("prior"), py::arg("segmentation"));
  m.def(
      "posterior_mean_distribution",
      [](const Segmentation& seg, const Prior& prior) {
        const auto dist = posterior_mean_distribution(seg, prior);
        return py::make_tuple(dist.points, dist.masses);
      },
      py::arg("segmentation"), py::arg("prior"));
  m.def(
      "verify_mpc",
      [](const std::vector<double>& points, const std::vector<double>& masses,
         const Prior& prior) {
        return verify_mpc(MeanDistribution{points, masses}, prior);
      },
      py::arg("points"), py::arg("masses"), py::arg("prior"));

  py::class_<PlannerOutcome>(m, "PlannerOutcome")
      .def_readonly("eta", &PlannerOutcome::eta)
      .def_readonly("total_surplus", &PlannerOutcome::total_surplus)
      .def_readonly("active", &PlannerOutcome::active)
      .def_property_readonly(
          "tightness",
          [](const PlannerOutcome& o) { return o.tightness.tightness; });

  m.def(
      "surplus",
      [](const Prior& prior, const Segmentation& seg,
         const std::vector<double>& tau, const MeetingFunction& mf, double k) {
        return surplus(prior, seg, TightnessAllocation{tau}, mf, k);
      },
      py::arg("prior"), py::arg("segmentation"), py::arg("tightness"),
      py::arg("mf"), py::arg("k"));
  m.def("solve_first_best", &solve_first_best, py::arg("prior"),
        py::arg("segmentation"), py::arg("mf"), py::arg("k"));
  m.def("first_best_benchmark", &first_best_benchmark, py::arg("prior"),
        py::arg("mf"), py::arg("k"));

  py::class_<EquilibriumOutcome>(m, "EquilibriumOutcome")
      .def_readonly("u_star", &EquilibriumOutcome::u_star)
      .def_readonly("buyer_payoff", &EquilibriumOutcome::buyer_payoff)
      .def_readonly("total_surplus", &EquilibriumOutcome::total_surplus)
      .def_readonly("active", &EquilibriumOutcome::active)
      .def_property_readonly(
          "tightness",
          [](const EquilibriumOutcome& o) { return o.tightness.tightness; });

  m.def("best_response_tightness", &best_response_tightness, py::arg("mf"),
        py::arg("means_lambda_theta"), py::arg("u"));
  m.def("solve_equilibrium", &solve_equilibrium, py::arg("prior"),
        py::arg("segmentation"), py::arg("mf"), py::arg("k"), py::arg("split"));
  m.def(
      "buyer_payoff_of",
      [](const Prior& prior, const Segmentation& seg,
         const std::vector<double>& tau, const SurplusSplit& split,
         const MeetingFunction& mf, double k) {
        return buyer_payoff_of(prior, seg, TightnessAllocation{tau}, split, mf, k);
      },
      py::arg("prior"), py::arg("segmentation"), py::arg("tightness"),
      py::arg("split"), py::arg("mf"), py::arg("k"));

  py::class_<HosiosReport>(m, "HosiosReport")
      .def_readonly("holds", &HosiosReport::holds)
      .def_readonly("eta_ps", &HosiosReport::eta_ps)
      .def_readonly("cutoff", &HosiosReport::cutoff)
      .def_readonly("lambda_at_cutoff", &HosiosReport::lambda_at_cutoff)
      .def_readonly("max_violation_below", &HosiosReport::max_violation_below)
      .def_readonly("max_violation_above", &HosiosReport::max_violation_above);

  m.def("check_hosios", &check_hosios, py::arg("prior"), py::arg("mf"),
        py::arg("k"), py::arg("split"));
  m.def(
      "hosios_compatible_split",
      [](const Prior& prior, const MeetingFunction& mf, double k, double lam) {
        const auto result = hosios_compatible_split(prior, mf, k, lam);
        return py::make_tuple(result.split, result.clamped);
      },
      py::arg("prior"), py::arg("mf"), py::arg("k"), py::arg("lambda_at_cutoff"));

  py::class_<PriceCertificate>(m, "PriceCertificate")
      .def_readonly("theta_c", &PriceCertificate::theta_c)
      .def_readonly("boundary_split", &PriceCertificate::boundary_split)
      .def_readonly("tangency_point", &PriceCertificate::tangency_point)
      .def_readonly("slope", &PriceCertificate::slope)
      .def_readonly("intercept", &PriceCertificate::intercept)
      .def_readonly("envelope_ok", &PriceCertificate::envelope_ok)
      .def_readonly("support_ok", &PriceCertificate::support_ok)
      .def_readonly("mean_ok", &PriceCertificate::mean_ok)
      .def_readonly("mean_residual", &PriceCertificate::mean_residual);

  py::class_<DesignOutcome>(m, "DesignOutcome")
      .def_readonly("curvature", &DesignOutcome::curvature)
      .def_readonly("segmentation", &DesignOutcome::segmentation)
      .def_readonly("u_bar", &DesignOutcome::u_bar)
      .def_readonly("cutoff_type", &DesignOutcome::cutoff_type)
      .def_readonly("boundary_split", &DesignOutcome::boundary_split)
      .def_readonly("equilibrium", &DesignOutcome::equilibrium)
      .def_readonly("certificate", &DesignOutcome::certificate)
      .def_readonly("total_surplus", &DesignOutcome::total_surplus)
      .def_readonly("binary_alt_surplus", &DesignOutcome::binary_alt_surplus);

  m.def("conditional_means", &conditional_means, py::arg("prior"),
        py::arg("theta"));
  m.def("g_u", &g_u, py::arg("mf"), py::arg("prior"), py::arg("ell"),
        py::arg("u"), py::arg("theta"));
  m.def("find_cutoff", &find_cutoff, py::arg("mf"), py::arg("prior"),
        py::arg("ell"), py::arg("u"));
  m.def("certify", &certify, py::arg("mf"), py::arg("prior"), py::arg("ell"),
        py::arg("u"), py::arg("theta_c"), py::arg("boundary_split_low") = 0.0);
  m.def("design", &design, py::arg("prior"), py::arg("mf"), py::arg("k"),
        py::arg("ell"));

  py::class_<LpSolution>(m, "LpSolution")
      .def_readonly("u", &LpSolution::u)
      .def_readonly("value", &LpSolution::value)
      .def_readonly("points", &LpSolution::points)
      .def_readonly("masses", &LpSolution::masses)
      .def_readonly("support", &LpSolution::support)
      .def_readonly("duality_gap", &LpSolution::duality_gap);

  m.def("lp_value", &lp_value, py::arg("mf"), py::arg("prior"), py::arg("ell"),
        py::arg("u"), py::arg("mesh"), py::arg("k") = 1.0);
  m.def("find_u_bar", &find_u_bar, py::arg("mf"), py::arg("prior"),
        py::arg("ell"), py::arg("mesh"), py::arg("k") = 1.0);

  py::class_<BpResult>(m, "BpResult")
      .def_readonly("segmentation", &BpResult::segmentation)
      .def_readonly("blocks", &BpResult::blocks)
      .def_readonly("u_star", &BpResult::u_star)
      .def_readonly("total_surplus", &BpResult::total_surplus)
      .def_readonly("candidates_evaluated", &BpResult::candidates_evaluated);

  m.def("enumerate_bp", &enumerate_bp, py::arg("prior"), py::arg("mf"),
        py::arg("k"), py::arg("split"), py::arg("exhaustive") = false,
        py::arg("max_n") = 12);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"),
      "Run the command line front end; returns (exit_code, stdout, stderr).");
}
