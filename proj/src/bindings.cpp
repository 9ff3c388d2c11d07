#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nnma/appropriation.hpp"
#include "nnma/backbone.hpp"
#include "nnma/config.hpp"
#include "nnma/continuation.hpp"
#include "nnma/hb.hpp"
#include "nnma/model.hpp"
#include "nnma/quadrature.hpp"
#include "nnma/time_domain.hpp"

namespace py = pybind11;
using namespace nnma;

PYBIND11_MODULE(_nnma, m) {
    m.doc() = "Nonlinear normal modes, quadrature curves and force appropriation "
              "for two-mode nonlinear modal models";
    m.attr("__version__") = "0.1.0";

    // ---- model -------------------------------------------------------------
    py::class_<ModalModel>(m, "ModalModel",
                           "Two-mode modal model with quadratic+cubic internal forces")
        .def(py::init<>())
        .def_readwrite("omega_n", &ModalModel::omega_n, "Linear natural frequencies [rad/s]")
        .def_readwrite("zeta", &ModalModel::zeta, "Modal damping ratios")
        .def_readwrite("alpha", &ModalModel::alpha, "Quadratic coefficients a1..a4")
        .def_readwrite("gamma", &ModalModel::gamma, "Cubic coefficients g1..g5")
        .def("validate", &ModalModel::validate)
        .def("with_damping_scaled", &ModalModel::with_damping_scaled, py::arg("s"),
             "Copy with all damping ratios multiplied by s")
        .def("__repr__", [](const ModalModel& mm) {
            return "<ModalModel f=(" + std::to_string(mm.omega_n[0] / (2 * M_PI)) + ", " +
                   std::to_string(mm.omega_n[1] / (2 * M_PI)) + ") Hz>";
        });

    py::class_<ModeShapeMatrix>(m, "ModeShapeMatrix",
                                "Mass-normalised mode-shape samples at named locations")
        .def(py::init<>())
        .def_readwrite("locations", &ModeShapeMatrix::locations)
        .def_readwrite("phi", &ModeShapeMatrix::phi)
        .def("validate", &ModeShapeMatrix::validate)
        .def("index_of", &ModeShapeMatrix::index_of, py::arg("name"),
             "Row index of a named location, -1 if absent")
        .def("__len__", [](const ModeShapeMatrix& s) { return s.locations.size(); });

    py::class_<ExcitationLayout>(m, "ExcitationLayout",
                                 "Sinusoidal forces F_j cos(omega t) at a subset of locations")
        .def(py::init<>())
        .def_readwrite("location_indices", &ExcitationLayout::location_indices)
        .def_readwrite("amplitudes", &ExcitationLayout::amplitudes)
        .def_readwrite("omega", &ExcitationLayout::omega);

    m.def("crossbeam_table1", &crossbeam_table1, "Built-in cross-beam model");
    m.def("synthetic_shapes", &synthetic_shapes, "Built-in SYNTHETIC 6-location shape table");
    m.def("builtin_model", &builtin_model, py::arg("name"));
    m.def("nonlinear_force", &nonlinear_force, py::arg("model"), py::arg("q"),
          "Quadratic+cubic internal force N(q)");
    m.def("nonlinear_force_jacobian", &nonlinear_force_jacobian, py::arg("model"), py::arg("q"));
    m.def("nonlinear_potential", &nonlinear_potential, py::arg("model"), py::arg("q"),
          "Potential V with grad V = N");
    m.def("modal_force_vector", &modal_force_vector, py::arg("shapes"), py::arg("layout"),
          "Modal forcing amplitudes P_i = sum_j F_j phi(j,i)");
    m.def("eom_residual", &eom_residual, py::arg("model"), py::arg("q"), py::arg("qdot"),
          py::arg("qddot"), py::arg("p_modal"));
    m.def("physical_displacement", &physical_displacement, py::arg("shapes"), py::arg("q"),
          "x = Phi q at every location");

    // ---- harmonic balance ----------------------------------------------------
    py::class_<HarmonicSolution>(m, "HarmonicSolution",
                                 "Truncated-Fourier periodic response of both modes")
        .def(py::init<>())
        .def_readwrite("n_harmonics", &HarmonicSolution::n_harmonics)
        .def_readwrite("coeffs", &HarmonicSolution::coeffs,
                       "[mode1: dc, a1..aH, b1..bH | mode2: ...]")
        .def_readwrite("omega", &HarmonicSolution::omega)
        .def("resize_zero", &HarmonicSolution::resize_zero);

    m.def("amplitude_phase", [](const HarmonicSolution& sol) {
        const AmplitudePhase ap = amplitude_phase(sol);
        return py::make_tuple(ap.U1, ap.U2, ap.phi1, ap.phi2);
    }, py::arg("sol"), "Fundamental (U1, U2, phi1, phi2) of q_i = U_i cos(omega t - phi_i)");
    m.def("hb_residual", &hb_residual, py::arg("model"), py::arg("sol"),
          py::arg("p_modal_fundamental"),
          "Galerkin residual of the equations of motion on the truncated basis");
    m.def("hb_jacobian", &hb_jacobian, py::arg("model"), py::arg("sol"),
          "Analytic derivatives of hb_residual w.r.t. [coeffs, omega]");

    // ---- branches -----------------------------------------------------------
    py::enum_<BranchKind>(m, "BranchKind")
        .value("backbone", BranchKind::backbone)
        .value("forced_response", BranchKind::forced_response)
        .value("quadrature_locus", BranchKind::quadrature_locus);
    py::enum_<Termination>(m, "Termination")
        .value("parameter_bound", Termination::parameter_bound)
        .value("amplitude_bound", Termination::amplitude_bound)
        .value("step_failure", Termination::step_failure)
        .value("closed_loop", Termination::closed_loop)
        .value("max_points", Termination::max_points)
        .value("seed_failure", Termination::seed_failure);

    py::class_<BranchPoint>(m, "BranchPoint")
        .def_readonly("unknowns", &BranchPoint::unknowns)
        .def_readonly("tangent", &BranchPoint::tangent)
        .def_readonly("step_used", &BranchPoint::step_used)
        .def_readonly("residual_norm", &BranchPoint::residual_norm);

    py::class_<Branch>(m, "Branch", "Ordered continuation points with termination cause")
        .def_readonly("points", &Branch::points)
        .def_readonly("kind", &Branch::kind)
        .def_readonly("termination", &Branch::termination)
        .def("__len__", &Branch::size)
        .def("__repr__", [](const Branch& b) {
            return "<Branch " + to_string(b.kind) + " n=" + std::to_string(b.size()) + " " +
                   to_string(b.termination) + ">";
        });

    py::class_<BackbonePoint>(m, "BackbonePoint")
        .def(py::init([](double omega, double U1, double U2, int p) {
                 return BackbonePoint{omega, U1, U2, p};
             }),
             py::arg("omega"), py::arg("U1"), py::arg("U2"), py::arg("p"))
        .def_readwrite("omega", &BackbonePoint::omega)
        .def_readwrite("U1", &BackbonePoint::U1)
        .def_readwrite("U2", &BackbonePoint::U2)
        .def_readwrite("p", &BackbonePoint::p);

    // ---- backbone -----------------------------------------------------------
    py::class_<BackboneConfig>(m, "BackboneConfig")
        .def(py::init<>())
        .def_readwrite("omega_min", &BackboneConfig::omega_min)
        .def_readwrite("omega_max", &BackboneConfig::omega_max)
        .def_readwrite("seed_amplitude", &BackboneConfig::seed_amplitude)
        .def_readwrite("amp_ref", &BackboneConfig::amp_ref)
        .def_readwrite("harmonics", &BackboneConfig::harmonics)
        .def_readwrite("max_points", &BackboneConfig::max_points);

    m.def("phase_flag", &phase_flag, py::arg("nnm_index"),
          "-1 for the anti-phase first NNM, +1 for the in-phase second");
    m.def("analytic_backbone_residual", &analytic_backbone_residual, py::arg("model"),
          py::arg("U1"), py::arg("U2"), py::arg("omega"), py::arg("p"),
          "Left sides of the resonant frequency-amplitude equations");
    m.def("solve_analytic_backbone", &solve_analytic_backbone, py::arg("model"),
          py::arg("nnm_index"), py::arg("config") = BackboneConfig());
    m.def("solve_numeric_backbone", &solve_numeric_backbone, py::arg("model"),
          py::arg("nnm_index"), py::arg("config") = BackboneConfig(),
          py::call_guard<py::gil_scoped_release>());
    m.def("backbone_point", &backbone_point, py::arg("branch"), py::arg("i"),
          py::arg("nnm_index"), "Interpret a branch point as (omega, U1, U2)");
    m.def("unpack_hb_unknowns", &unpack_hb_unknowns, py::arg("unknowns"), py::arg("harmonics"),
          "HarmonicSolution from a [coeffs, omega, forces...] unknown vector");
    m.def("amplitudes_at_omega", &amplitudes_at_omega, py::arg("branch"), py::arg("nnm_index"),
          py::arg("omega"), "(U1, U2) samples of a branch at a frequency");

    // ---- appropriation --------------------------------------------------------
    py::enum_<PhaseErrorStatus>(m, "PhaseErrorStatus")
        .value("ok", PhaseErrorStatus::ok)
        .value("no_real_solution", PhaseErrorStatus::no_real_solution)
        .value("no_coupling", PhaseErrorStatus::no_coupling)
        .value("singular_appropriation", PhaseErrorStatus::singular_appropriation);

    py::class_<PhaseEstimate>(m, "PhaseEstimate")
        .def_readonly("status", &PhaseEstimate::status)
        .def_readonly("value", &PhaseEstimate::value)
        .def("__repr__", [](const PhaseEstimate& p) {
            return "<PhaseEstimate " + to_string(p.status) + " " + std::to_string(p.value) + ">";
        });

    py::class_<AppropriationResult>(m, "AppropriationResult")
        .def_readonly("location_indices", &AppropriationResult::location_indices)
        .def_readonly("forces", &AppropriationResult::forces)
        .def_readonly("modal_forces", &AppropriationResult::modal_forces)
        .def_readonly("phase_error", &AppropriationResult::phase_error)
        .def_readonly("target", &AppropriationResult::target);

    py::class_<PhaseMapEntry>(m, "PhaseMapEntry")
        .def_readonly("location", &PhaseMapEntry::location)
        .def_readonly("F1", &PhaseMapEntry::F1)
        .def_readonly("phase", &PhaseMapEntry::phase)
        .def_readonly("saturated", &PhaseMapEntry::saturated);

    m.def("damping_energy", &damping_energy, py::arg("model"), py::arg("U_i"), py::arg("omega"),
          py::arg("i"), "Energy lost to damping by mode i over one period at quadrature");
    m.def("forcing_energy", &forcing_energy, py::arg("shapes"), py::arg("layout"), py::arg("U_i"),
          py::arg("phi_i"), py::arg("i"), "Energy injected into mode i over one period");
    m.def("two_force_appropriation", &two_force_appropriation, py::arg("shapes"), py::arg("loc_a"),
          py::arg("loc_b"), py::arg("model"), py::arg("target"), py::arg("cond_limit") = 1e8,
          "Exact appropriation forces for a backbone point");
    m.def("single_force_amplitude", &single_force_amplitude, py::arg("shapes"), py::arg("loc"),
          py::arg("model"), py::arg("target"), py::arg("eps_den") = 1e-12,
          "Energy-balance single-force amplitude for a backbone point");
    m.def("phase_error", &phase_error, py::arg("model"), py::arg("shapes"), py::arg("loc"),
          py::arg("target"), py::arg("F1"), py::arg("mode") = 0,
          "Inter-modal phase difference implied by zero net energy transfer");
    m.def("phase_error_map", &phase_error_map, py::arg("model"), py::arg("shapes"),
          py::arg("target"), py::arg("threads") = 0,
          "single_force_amplitude + phase_error for every location",
          py::call_guard<py::gil_scoped_release>());

    // ---- quadrature ------------------------------------------------------------
    py::class_<QuadratureConstraint>(m, "QuadratureConstraint")
        .def(py::init([](int loc, int sign) {
                 return QuadratureConstraint{loc, sign};
             }),
             py::arg("colocated_location"), py::arg("target_phase") = +1)
        .def_readwrite("colocated_location", &QuadratureConstraint::colocated_location)
        .def_readwrite("target_phase", &QuadratureConstraint::target_phase);

    py::class_<QuadratureConfig>(m, "QuadratureConfig")
        .def(py::init<>())
        .def_readwrite("harmonics", &QuadratureConfig::harmonics)
        .def_readwrite("amp_ref", &QuadratureConfig::amp_ref)
        .def_readwrite("omega_min", &QuadratureConfig::omega_min)
        .def_readwrite("omega_max", &QuadratureConfig::omega_max)
        .def_readwrite("amplitude_max", &QuadratureConfig::amplitude_max)
        .def_readwrite("force_max", &QuadratureConfig::force_max)
        .def_readwrite("seed_force", &QuadratureConfig::seed_force)
        .def_readwrite("max_points", &QuadratureConfig::max_points);

    m.def("forced_response", &forced_response, py::arg("model"), py::arg("shapes"),
          py::arg("layout"), py::arg("config") = QuadratureConfig(),
          "Fixed-force frequency response across the window",
          py::call_guard<py::gil_scoped_release>());
    m.def("quadrature_locus", &quadrature_locus, py::arg("model"), py::arg("shapes"),
          py::arg("constraints"), py::arg("nnm_index"), py::arg("config") = QuadratureConfig(),
          "Phase-quadrature locus with free force amplitude(s)",
          py::call_guard<py::gil_scoped_release>());
    m.def("seed_isolated_quadrature", &seed_isolated_quadrature, py::arg("model"),
          py::arg("shapes"), py::arg("loc"), py::arg("backbone_solution"),
          "[coeffs, omega, F1] guess for an isolated quadrature branch");
    m.def("refine_quadrature_seed",
          [](const ModalModel& model, const ModeShapeMatrix& shapes,
             const std::vector<QuadratureConstraint>& constraints, const Eigen::VectorXd& guess,
             const QuadratureConfig& cfg) -> py::object {
              const auto refined = refine_quadrature_seed(model, shapes, constraints, guess, cfg);
              if (!refined) return py::none();
              return py::cast(*refined);
          },
          py::arg("model"), py::arg("shapes"), py::arg("constraints"), py::arg("guess"),
          py::arg("config") = QuadratureConfig(),
          "Corrector refinement at fixed frequency; None if it does not converge");
    m.def("continue_quadrature_from", &continue_quadrature_from, py::arg("model"),
          py::arg("shapes"), py::arg("constraints"), py::arg("seed"),
          py::arg("config") = QuadratureConfig(),
          py::arg("direction_hint") = Eigen::VectorXd(),
          py::call_guard<py::gil_scoped_release>());
    m.def("phase_profile", &phase_profile, py::arg("sol"), py::arg("shapes"), py::arg("locations"),
          "Fundamental physical-response phase at each location");
    m.def("colocated_fundamental", &colocated_fundamental, py::arg("sol"), py::arg("shapes"),
          py::arg("location"));

    // ---- time-domain oracle -------------------------------------------------
    py::class_<TimeSeries>(m, "TimeSeries")
        .def_readonly("t", &TimeSeries::t)
        .def_readonly("q", &TimeSeries::q)
        .def_readonly("qdot", &TimeSeries::qdot);

    py::class_<EnergyBudget>(m, "EnergyBudget")
        .def_readonly("E_D1", &EnergyBudget::E_D1)
        .def_readonly("E_D2", &EnergyBudget::E_D2)
        .def_readonly("E_P1", &EnergyBudget::E_P1)
        .def_readonly("E_P2", &EnergyBudget::E_P2);

    m.def("integrate", &integrate, py::arg("model"), py::arg("p_fund"), py::arg("omega"),
          py::arg("initial_state"), py::arg("t_end"), py::arg("dt"),
          "RK4 integration of the modal equations of motion",
          py::call_guard<py::gil_scoped_release>());
    m.def("hb_state", &hb_state, py::arg("sol"), py::arg("t"),
          "(q1, q2, qd1, qd2) of a harmonic solution at time t");
    m.def("periodicity_residual",
          [](const ModalModel& model, const Eigen::Vector2d& p, const HarmonicSolution& sol,
             int steps_per_period) {
              return periodicity_residual(model, p, sol, IntegratorConfig{steps_per_period});
          },
          py::arg("model"), py::arg("p_fund"), py::arg("sol"),
          py::arg("steps_per_period") = (1 << 12),
          "Relative return-map error after one period from the HB initial state",
          py::call_guard<py::gil_scoped_release>());
    m.def("measured_energies", &measured_energies, py::arg("model"), py::arg("p_fund"),
          py::arg("omega"), py::arg("series"),
          "Trapezoid per-mode damping/forcing energies over one period");
    m.def("hb_energies", &hb_energies, py::arg("model"), py::arg("p_fund"), py::arg("sol"),
          py::arg("samples") = (1 << 12));
    m.def("mechanical_energy", &mechanical_energy, py::arg("model"), py::arg("state"));
}
