#pragma once

#include <Eigen/Dense>

#include "nnma/fourier.hpp"
#include "nnma/model.hpp"

namespace nnma {

/// Index bookkeeping for the stacked coefficient vector
/// [mode1: dc, a1..aH, b1..bH | mode2: dc, a1..aH, b1..bH].
struct HbLayout {
    int H = 5;

    int per_mode() const { return 2 * H + 1; }
    int n_coeffs() const { return 2 * per_mode(); }
    int dc(int mode) const { return mode * per_mode(); }
    int cos(int mode, int k) const { return mode * per_mode() + k; }
    int sin(int mode, int k) const { return mode * per_mode() + H + k; }
};

/// Truncated-Fourier periodic response of both modal coordinates.
struct HarmonicSolution {
    int n_harmonics = 5;
    Eigen::VectorXd coeffs;   ///< stacked per HbLayout, length 2*(2H+1)
    double omega = 0.0;       ///< response frequency [rad/s]

    /// Forcing bookkeeping for solvers: layout.omega mirrors omega and
    /// free_force[k] marks amplitudes treated as unknowns.
    ExcitationLayout forcing;
    std::vector<bool> free_force;

    HbLayout layout() const { return HbLayout{n_harmonics}; }
    void resize_zero() { coeffs = Eigen::VectorXd::Zero(2 * (2 * n_harmonics + 1)); }

    Series mode_series(int mode) const;
    void set_mode_series(int mode, const Series& s);
};

/// Fundamental amplitudes U_i >= 0 and phases phi_i in (-pi, pi] of
/// q_i = U_i cos(Omega t - phi_i).
struct AmplitudePhase {
    double U1, U2, phi1, phi2;
};
AmplitudePhase amplitude_phase(const HarmonicSolution& sol);

/// Galerkin residual of the equations of motion on {1, cos k, sin k | k<=H}:
/// the Fourier coefficients of qdd + Xi qd + Lambda q + N(q) - p(t), where the
/// forcing acts on the fundamental cosine only, p(t) = p_fund cos(Omega t).
/// Nonlinear coefficients are exact (polynomial convolution, no aliasing).
Eigen::VectorXd hb_residual(const ModalModel& model, const HarmonicSolution& sol,
                            const Eigen::Vector2d& p_modal_fundamental);

/// Analytic partial derivatives of hb_residual: columns are all Fourier
/// coefficients followed by Omega, shape (4H+2) x (4H+3).
Eigen::MatrixXd hb_jacobian(const ModalModel& model, const HarmonicSolution& sol);

/// Columns d(residual)/dF_j for forces at the given locations (forcing enters
/// the fundamental cosine rows only).
Eigen::MatrixXd hb_force_jacobian(const ModeShapeMatrix& shapes,
                                  const std::vector<int>& location_indices, int H);

}  // namespace nnma
