#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "nnma/backbone.hpp"
#include "nnma/model.hpp"

namespace nnma {

/// Energy lost by mode i to damping over one period at quadrature:
/// 2 zeta_i omega_ni Omega pi U_i^2.
double damping_energy(const ModalModel& model, double U_i, double omega, int i);

/// Energy injected into mode i over one period by the layout's forces:
/// pi * P_i * U_i * sin(phi_i).
double forcing_energy(const ModeShapeMatrix& shapes, const ExcitationLayout& layout,
                      double U_i, double phi_i, int i);

enum class PhaseErrorStatus {
    ok,
    no_real_solution,        ///< |phase error| would exceed pi/2
    no_coupling,             ///< U2 = 0: inter-modal transfer undefined
    singular_appropriation,  ///< force denominator vanishes
};

std::string to_string(PhaseErrorStatus s);

struct PhaseEstimate {
    PhaseErrorStatus status = PhaseErrorStatus::ok;
    double value = 0.0;      ///< [rad], meaningful when status == ok
};

struct AppropriationResult {
    std::vector<int> location_indices;
    std::vector<double> forces;       ///< per location [N]
    Eigen::Vector2d modal_forces;     ///< P1, P2
    PhaseEstimate phase_error;        ///< identically zero for exact two-force
    BackbonePoint target;
};

/// Exact two-force appropriation of a backbone point: solves the transposed
/// 2x2 shape system for (F_a, F_b) with modal forcing
/// (2 zeta1 w1 Omega U1, 2 p zeta2 w2 Omega U2).
/// Throws std::runtime_error when the shape rows are near-parallel
/// (condition number above cond_limit).
AppropriationResult two_force_appropriation(const ModeShapeMatrix& shapes, int loc_a, int loc_b,
                                            const ModalModel& model, const BackbonePoint& target,
                                            double cond_limit = 1e8);

/// Single-force amplitude from total energy balance:
/// F1 = 2 Omega (zeta1 w1 U1^2 + zeta2 w2 U2^2) / (phi(1,1) U1 + p phi(1,2) U2).
/// Throws std::runtime_error when the denominator is below eps_den (scaled).
double single_force_amplitude(const ModeShapeMatrix& shapes, int loc, const ModalModel& model,
                              const BackbonePoint& target, double eps_den = 1e-12);

/// Inter-modal phase difference implied by zero net energy transfer through
/// mode `mode` (0 or 1) under the single force F1 at `loc`. Both modes give
/// the same estimate when F1 comes from single_force_amplitude.
PhaseEstimate phase_error(const ModalModel& model, const ModeShapeMatrix& shapes, int loc,
                          const BackbonePoint& target, double F1, int mode = 0);

struct PhaseMapEntry {
    int location;
    double F1 = 0.0;
    PhaseEstimate phase;
    bool saturated = false;   ///< |value| > pi/4 or not real
};

/// single_force_amplitude + phase_error for every shape row. Locations where
/// the force denominator vanishes are flagged, not dropped. `threads <= 0`
/// reads NNM_APPROP_THREADS (default 1).
std::vector<PhaseMapEntry> phase_error_map(const ModalModel& model, const ModeShapeMatrix& shapes,
                                           const BackbonePoint& target, int threads = 0);

/// Saturation threshold used for map display (phase errors above it are
/// rendered black).
inline constexpr double kPhaseSaturation = M_PI / 4.0;

}  // namespace nnma
