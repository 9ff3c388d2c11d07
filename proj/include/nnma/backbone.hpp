#pragma once

#include <Eigen/Dense>

#include "nnma/continuation.hpp"
#include "nnma/hb.hpp"
#include "nnma/model.hpp"

namespace nnma {

/// Phase flag: -1 for the anti-phase mode pair (first NNM), +1 for in-phase
/// (second NNM). The inter-modal phase is pi for p = -1 and 0 for p = +1.
int phase_flag(int nnm_index);

/// Target point on a backbone: fundamental amplitudes and frequency.
struct BackbonePoint {
    double omega;   ///< [rad/s]
    double U1;
    double U2;
    int p;          ///< phase flag
};

/// Left sides of the two resonant harmonic-balance equations for the
/// frequency-amplitude dependence of the NNMs (cubic terms only).
Eigen::Vector2d analytic_backbone_residual(const ModalModel& model, double U1, double U2,
                                           double omega, int p);

/// Derivatives of analytic_backbone_residual with respect to (U1, U2, omega).
Eigen::Matrix<double, 2, 3> analytic_backbone_jacobian(const ModalModel& model, double U1,
                                                       double U2, double omega, int p);

struct BackboneConfig {
    double omega_min = 2.0 * M_PI * 16.1;   ///< [rad/s]
    double omega_max = 2.0 * M_PI * 20.0;
    double seed_amplitude = 5e-5;           ///< modal units, sets the linear-limit start
    double amp_ref = 1e-3;                  ///< amplitude scaling for continuation
    int harmonics = 5;                      ///< numeric branch only
    int max_points = 4000;
    ContinuationConfig continuation;        ///< tol/step settings (scale is filled in)
};

/// Continuation of the analytic two-equation system in (U1, U2, omega),
/// seeded at the linear limit of the requested NNM.
/// Unknown layout per point: [U1, U2, omega].
Branch solve_analytic_backbone(const ModalModel& model, int nnm_index, const BackboneConfig& cfg);

/// Harmonic-balance continuation of the conservative system (damping and
/// forcing removed) with the sine coefficient of the dominant mode anchored
/// to zero. Unknown layout per point: [coeffs, omega].
Branch solve_numeric_backbone(const ModalModel& model, int nnm_index, const BackboneConfig& cfg);

/// Interpret a branch point from either backbone solver as (omega, U1, U2).
BackbonePoint backbone_point(const Branch& branch, size_t i, int nnm_index);

/// Reconstruct the harmonic solution at a numeric-backbone (or other
/// HB-continuation) point whose unknowns are [coeffs, omega, forces...].
HarmonicSolution unpack_hb_unknowns(const Eigen::VectorXd& unknowns, int harmonics);

/// Piecewise-linear samples of (U1, U2) on a branch at a given frequency.
/// Multiple values are returned when the branch folds over omega.
std::vector<Eigen::Vector2d> amplitudes_at_omega(const Branch& branch, int nnm_index,
                                                 double omega);

}  // namespace nnma
