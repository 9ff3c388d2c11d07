#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace nnma {

/// Two-mode nonlinear modal model: diagonal linear stiffness/damping plus a
/// quadratic+cubic internal force that couples the modes.
struct ModalModel {
    Eigen::Vector2d omega_n;              ///< linear natural frequencies [rad/s]
    Eigen::Vector2d zeta;                 ///< modal damping ratios [-]
    Eigen::Vector4d alpha;                ///< quadratic coefficients a1..a4
    Eigen::Matrix<double, 5, 1> gamma;    ///< cubic coefficients g1..g5

    /// Throws std::invalid_argument on non-positive frequencies, negative
    /// damping, or non-finite coefficients.
    void validate() const;

    /// Model with all damping ratios multiplied by s (force scaling studies).
    ModalModel with_damping_scaled(double s) const;
};

/// Mass-normalised linear mode-shape samples at named excitation locations.
/// phi(j, i) is the participation of mode i at vertical DOF j.
struct ModeShapeMatrix {
    std::vector<std::string> locations;
    Eigen::Matrix<double, Eigen::Dynamic, 2> phi;

    void validate() const;
    int index_of(const std::string& name) const;  ///< -1 if absent
    Eigen::Vector2d row(int j) const { return phi.row(j).transpose(); }
};

/// Sinusoidal forcing F_j cos(Omega t) applied at a subset of locations.
/// Amplitudes are signed; a negative amplitude is an anti-phase force.
struct ExcitationLayout {
    std::vector<int> location_indices;
    std::vector<double> amplitudes;   ///< [N]
    double omega = 0.0;               ///< [rad/s]

    void validate() const;
};

/// Quadratic + cubic internal force N(q), both components.
Eigen::Vector2d nonlinear_force(const ModalModel& model, const Eigen::Vector2d& q);

/// dN/dq. N is the gradient of a scalar potential, so this matrix is symmetric.
Eigen::Matrix2d nonlinear_force_jacobian(const ModalModel& model, const Eigen::Vector2d& q);

/// Potential V(q) with grad V = N(q). Used by energy checks.
double nonlinear_potential(const ModalModel& model, const Eigen::Vector2d& q);

/// Modal forcing amplitudes P_i = sum_j F_j * phi(j, i).
/// Throws std::out_of_range for invalid location indices.
Eigen::Vector2d modal_force_vector(const ModeShapeMatrix& shapes, const ExcitationLayout& layout);

/// Equation-of-motion residual qdd + Xi qd + Lambda q + N(q) - p at one instant.
Eigen::Vector2d eom_residual(const ModalModel& model, const Eigen::Vector2d& q,
                             const Eigen::Vector2d& qdot, const Eigen::Vector2d& qddot,
                             const Eigen::Vector2d& p_modal);

/// Physical displacement at the given locations, x = Phi q.
Eigen::VectorXd physical_displacement(const ModeShapeMatrix& shapes, const Eigen::Vector2d& q);

/// Built-in cross-beam model (closely spaced bending/torsion pair).
ModalModel crossbeam_table1();

/// Built-in SYNTHETIC 6-location mode-shape table for the cross-beam model.
/// These are plausible bending/torsion-dominant samples with a slight
/// asymmetry, not measured data.
ModeShapeMatrix synthetic_shapes();

/// Resolve a named built-in model ("crossbeam-table1"). Throws on unknown name.
ModalModel builtin_model(const std::string& name);

}  // namespace nnma
