#include "nnma/model.hpp"

#include <cmath>
#include <stdexcept>

namespace nnma {

void ModalModel::validate() const {
    for (int i = 0; i < 2; ++i) {
        if (!(omega_n[i] > 0.0))
            throw std::invalid_argument("ModalModel: omega_n must be positive");
        if (!(zeta[i] >= 0.0))
            throw std::invalid_argument("ModalModel: zeta must be non-negative");
    }
    if (!omega_n.allFinite() || !zeta.allFinite() || !alpha.allFinite() || !gamma.allFinite())
        throw std::invalid_argument("ModalModel: parameters must be finite");
}

ModalModel ModalModel::with_damping_scaled(double s) const {
    ModalModel m = *this;
    m.zeta *= s;
    return m;
}

void ModeShapeMatrix::validate() const {
    if (phi.rows() < 1)
        throw std::invalid_argument("ModeShapeMatrix: needs at least one location");
    if (static_cast<Eigen::Index>(locations.size()) != phi.rows())
        throw std::invalid_argument("ModeShapeMatrix: name/row count mismatch");
    for (Eigen::Index j = 0; j < phi.rows(); ++j) {
        if (phi(j, 0) == 0.0 && phi(j, 1) == 0.0)
            throw std::invalid_argument("ModeShapeMatrix: row '" + locations[j] + "' is all zero");
    }
    if (!phi.allFinite())
        throw std::invalid_argument("ModeShapeMatrix: entries must be finite");
}

int ModeShapeMatrix::index_of(const std::string& name) const {
    for (size_t j = 0; j < locations.size(); ++j)
        if (locations[j] == name) return static_cast<int>(j);
    return -1;
}

void ExcitationLayout::validate() const {
    if (location_indices.size() != amplitudes.size())
        throw std::invalid_argument("ExcitationLayout: index/amplitude count mismatch");
    if (!(omega > 0.0))
        throw std::invalid_argument("ExcitationLayout: omega must be positive");
}

Eigen::Vector2d nonlinear_force(const ModalModel& m, const Eigen::Vector2d& q) {
    const double q1 = q[0], q2 = q[1];
    const auto& a = m.alpha;
    const auto& g = m.gamma;
    Eigen::Vector2d n;
    n[0] = a[0] * q1 * q1 + 2.0 * a[1] * q1 * q2 + a[2] * q2 * q2
         + g[0] * q1 * q1 * q1 + 3.0 * g[1] * q1 * q1 * q2 + g[2] * q1 * q2 * q2
         + g[3] * q2 * q2 * q2;
    n[1] = a[1] * q1 * q1 + 2.0 * a[2] * q1 * q2 + a[3] * q2 * q2
         + g[1] * q1 * q1 * q1 + g[2] * q1 * q1 * q2 + 3.0 * g[3] * q1 * q2 * q2
         + g[4] * q2 * q2 * q2;
    return n;
}

Eigen::Matrix2d nonlinear_force_jacobian(const ModalModel& m, const Eigen::Vector2d& q) {
    const double q1 = q[0], q2 = q[1];
    const auto& a = m.alpha;
    const auto& g = m.gamma;
    Eigen::Matrix2d J;
    J(0, 0) = 2.0 * a[0] * q1 + 2.0 * a[1] * q2
            + 3.0 * g[0] * q1 * q1 + 6.0 * g[1] * q1 * q2 + g[2] * q2 * q2;
    J(0, 1) = 2.0 * a[1] * q1 + 2.0 * a[2] * q2
            + 3.0 * g[1] * q1 * q1 + 2.0 * g[2] * q1 * q2 + 3.0 * g[3] * q2 * q2;
    J(1, 0) = J(0, 1);
    J(1, 1) = 2.0 * a[2] * q1 + 2.0 * a[3] * q2
            + g[2] * q1 * q1 + 6.0 * g[3] * q1 * q2 + 3.0 * g[4] * q2 * q2;
    return J;
}

double nonlinear_potential(const ModalModel& m, const Eigen::Vector2d& q) {
    const double q1 = q[0], q2 = q[1];
    const auto& a = m.alpha;
    const auto& g = m.gamma;
    return a[0] * q1 * q1 * q1 / 3.0 + a[1] * q1 * q1 * q2 + a[2] * q1 * q2 * q2
         + a[3] * q2 * q2 * q2 / 3.0
         + g[0] * std::pow(q1, 4) / 4.0 + g[1] * q1 * q1 * q1 * q2
         + g[2] * q1 * q1 * q2 * q2 / 2.0 + g[3] * q1 * q2 * q2 * q2
         + g[4] * std::pow(q2, 4) / 4.0;
}

Eigen::Vector2d modal_force_vector(const ModeShapeMatrix& shapes, const ExcitationLayout& layout) {
    layout.validate();
    Eigen::Vector2d p = Eigen::Vector2d::Zero();
    for (size_t k = 0; k < layout.location_indices.size(); ++k) {
        const int j = layout.location_indices[k];
        if (j < 0 || j >= shapes.phi.rows())
            throw std::out_of_range("modal_force_vector: location index out of range");
        p += layout.amplitudes[k] * shapes.row(j);
    }
    return p;
}

Eigen::Vector2d eom_residual(const ModalModel& m, const Eigen::Vector2d& q,
                             const Eigen::Vector2d& qdot, const Eigen::Vector2d& qddot,
                             const Eigen::Vector2d& p_modal) {
    Eigen::Vector2d r = qddot + nonlinear_force(m, q) - p_modal;
    for (int i = 0; i < 2; ++i)
        r[i] += 2.0 * m.zeta[i] * m.omega_n[i] * qdot[i] + m.omega_n[i] * m.omega_n[i] * q[i];
    return r;
}

Eigen::VectorXd physical_displacement(const ModeShapeMatrix& shapes, const Eigen::Vector2d& q) {
    return shapes.phi * q;
}

ModalModel crossbeam_table1() {
    ModalModel m;
    m.omega_n << 101.61, 104.58;
    m.zeta << 7.6e-3, 2.6e-3;
    m.alpha << 56.7, -52.4, -14.9, 42.7;
    m.gamma << 128e6, 32e6, 25e6, 2e6, 0.8e6;
    return m;
}

ModeShapeMatrix synthetic_shapes() {
    // SYNTHETIC layout: two points on the main beam (bending-dominant), the
    // main cross-beam tips (torsion-dominant, opposite sign) and the small
    // cross-beam tips. Slightly asymmetric, like a structure with detuning
    // masses. Not measured data.
    ModeShapeMatrix s;
    s.locations = {"main_mid", "main_quarter", "cross_a", "cross_b", "small_cross_a", "small_cross_b"};
    s.phi.resize(6, 2);
    s.phi << 0.99998, 0.0060,
             0.72000, -0.19000,
             0.55000, 0.83000,
             0.61000, -0.78000,
             0.33000, 0.47000,
             0.37000, -0.43000;
    return s;
}

ModalModel builtin_model(const std::string& name) {
    if (name == "crossbeam-table1") return crossbeam_table1();
    throw std::invalid_argument("unknown built-in model '" + name + "'");
}

}  // namespace nnma
