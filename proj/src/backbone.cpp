#include "nnma/backbone.hpp"

#include <cmath>
#include <stdexcept>

namespace nnma {

int phase_flag(int nnm_index) {
    if (nnm_index == 1) return -1;
    if (nnm_index == 2) return +1;
    throw std::invalid_argument("nnm_index must be 1 or 2");
}

Eigen::Vector2d analytic_backbone_residual(const ModalModel& m, double U1, double U2,
                                           double omega, int p) {
    const auto& g = m.gamma;
    const double w1 = m.omega_n[0], w2 = m.omega_n[1];
    Eigen::Vector2d r;
    r[0] = (w1 * w1 - omega * omega) * U1 + 0.75 * g[0] * U1 * U1 * U1
         + p * 0.75 * U2 * (3.0 * g[1] * U1 * U1 + g[3] * U2 * U2)
         + 0.75 * g[2] * U1 * U2 * U2;
    r[1] = (w2 * w2 - omega * omega) * U2
         + p * 0.75 * U1 * (g[1] * U1 * U1 + 3.0 * g[3] * U2 * U2)
         + 0.75 * g[2] * U1 * U1 * U2 + 0.75 * g[4] * U2 * U2 * U2;
    return r;
}

Eigen::Matrix<double, 2, 3> analytic_backbone_jacobian(const ModalModel& m, double U1,
                                                       double U2, double omega, int p) {
    const auto& g = m.gamma;
    const double w1 = m.omega_n[0], w2 = m.omega_n[1];
    Eigen::Matrix<double, 2, 3> J;
    J(0, 0) = (w1 * w1 - omega * omega) + 2.25 * g[0] * U1 * U1
            + p * 4.5 * g[1] * U1 * U2 + 0.75 * g[2] * U2 * U2;
    J(0, 1) = p * 0.75 * (3.0 * g[1] * U1 * U1 + 3.0 * g[3] * U2 * U2)
            + 1.5 * g[2] * U1 * U2;
    J(0, 2) = -2.0 * omega * U1;
    J(1, 0) = p * 0.75 * (3.0 * g[1] * U1 * U1 + 3.0 * g[3] * U2 * U2)
            + 1.5 * g[2] * U1 * U2;
    J(1, 1) = (w2 * w2 - omega * omega) + p * 4.5 * g[3] * U1 * U2
            + 0.75 * g[2] * U1 * U1 + 2.25 * g[4] * U2 * U2;
    J(1, 2) = -2.0 * omega * U2;
    return J;
}

namespace {

ContinuationConfig make_cont_config(const BackboneConfig& cfg, const Eigen::VectorXd& scale,
                                    int omega_index) {
    ContinuationConfig cc = cfg.continuation;
    cc.scale = scale;
    cc.residual_scale = scale[omega_index] * scale[omega_index] * cfg.amp_ref;
    cc.max_points = cfg.max_points;
    cc.out_of_bounds = [omega_index, &cfg](const Eigen::VectorXd& u) {
        return u[omega_index] > cfg.omega_max || u[omega_index] < cfg.omega_min * 0.98;
    };
    return cc;
}

}  // namespace

Branch solve_analytic_backbone(const ModalModel& model, int nnm_index, const BackboneConfig& cfg) {
    const int p = phase_flag(nnm_index);
    const int dominant = nnm_index - 1;

    ContinuationSystem sys;
    sys.residual = [&model, p](const Eigen::VectorXd& u) -> Eigen::VectorXd {
        return analytic_backbone_residual(model, u[0], u[1], u[2], p);
    };
    sys.jacobian = [&model, p](const Eigen::VectorXd& u) -> Eigen::MatrixXd {
        return analytic_backbone_jacobian(model, u[0], u[1], u[2], p);
    };

    Eigen::VectorXd scale(3);
    scale << cfg.amp_ref, cfg.amp_ref, model.omega_n[0];
    ContinuationConfig cc = make_cont_config(cfg, scale, 2);

    // Linear-limit seed: dominant amplitude pinned, other amplitude and
    // frequency converged.
    const double u0 = cfg.seed_amplitude;
    const double wlin = model.omega_n[dominant];
    const double g_self = (nnm_index == 1) ? model.gamma[0] : model.gamma[4];
    Eigen::VectorXd guess(3);
    guess[dominant] = u0;
    guess[1 - dominant] = 0.0;
    guess[2] = std::sqrt(wlin * wlin + 0.75 * g_self * u0 * u0);
    auto seed = converge_point(sys, guess, cc, dominant);
    if (!seed) {
        Branch b;
        b.kind = BranchKind::backbone;
        b.termination = Termination::seed_failure;
        return b;
    }

    Eigen::VectorXd hint = Eigen::VectorXd::Zero(3);
    hint[dominant] = 1.0;
    Branch b = continue_branch(sys, *seed, cc, hint);
    b.kind = BranchKind::backbone;
    return b;
}

Branch solve_numeric_backbone(const ModalModel& model, int nnm_index, const BackboneConfig& cfg) {
    const int H = cfg.harmonics;
    const HbLayout lay{H};
    const int n = lay.n_coeffs() + 1;
    const int iw = lay.n_coeffs();          // omega index
    const int dominant = nnm_index - 1;

    ModalModel conservative = model;
    conservative.zeta.setZero();

    auto unpack = [H](const Eigen::VectorXd& u) { return unpack_hb_unknowns(u, H); };

    // HB residual of the conservative system plus the phase anchor (sine
    // coefficient of the dominant fundamental): consistent square system.
    ContinuationSystem sys;
    sys.residual = [conservative, unpack, lay, dominant](const Eigen::VectorXd& u) -> Eigen::VectorXd {
        const HarmonicSolution sol = unpack(u);
        Eigen::VectorXd r(lay.n_coeffs() + 1);
        r.head(lay.n_coeffs()) = hb_residual(conservative, sol, Eigen::Vector2d::Zero());
        r[lay.n_coeffs()] = u[lay.sin(dominant, 1)];
        return r;
    };
    sys.jacobian = [conservative, unpack, lay, dominant, n](const Eigen::VectorXd& u) -> Eigen::MatrixXd {
        const HarmonicSolution sol = unpack(u);
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(lay.n_coeffs() + 1, n);
        J.topRows(lay.n_coeffs()) = hb_jacobian(conservative, sol);
        J(lay.n_coeffs(), lay.sin(dominant, 1)) = 1.0;
        return J;
    };

    Eigen::VectorXd scale = Eigen::VectorXd::Constant(n, cfg.amp_ref);
    scale[iw] = model.omega_n[0];
    ContinuationConfig cc = make_cont_config(cfg, scale, iw);
    // The anchor row makes the residual one row taller than n - 1; scale it
    // like the dynamic rows so the tolerance test stays meaningful.
    cc.residual_scale = model.omega_n[0] * model.omega_n[0] * cfg.amp_ref;

    const double u0 = cfg.seed_amplitude;
    const double wlin = model.omega_n[dominant];
    const double g_self = (nnm_index == 1) ? model.gamma[0] : model.gamma[4];
    Eigen::VectorXd guess = Eigen::VectorXd::Zero(n);
    guess[lay.cos(dominant, 1)] = u0;
    guess[iw] = std::sqrt(wlin * wlin + 0.75 * g_self * u0 * u0);
    auto seed = converge_point(sys, guess, cc, lay.cos(dominant, 1));
    if (!seed) {
        Branch b;
        b.kind = BranchKind::backbone;
        b.termination = Termination::seed_failure;
        return b;
    }

    Eigen::VectorXd hint = Eigen::VectorXd::Zero(n);
    hint[lay.cos(dominant, 1)] = 1.0;
    Branch b = continue_branch(sys, *seed, cc, hint);
    b.kind = BranchKind::backbone;
    return b;
}

HarmonicSolution unpack_hb_unknowns(const Eigen::VectorXd& unknowns, int harmonics) {
    const HbLayout lay{harmonics};
    const int nf = static_cast<int>(unknowns.size()) - lay.n_coeffs() - 1;
    if (nf < 0) throw std::invalid_argument("unpack_hb_unknowns: vector too short");
    HarmonicSolution sol;
    sol.n_harmonics = harmonics;
    sol.coeffs = unknowns.head(lay.n_coeffs());
    sol.omega = unknowns[lay.n_coeffs()];
    sol.forcing.omega = sol.omega;
    for (int k = 0; k < nf; ++k) {
        sol.forcing.amplitudes.push_back(unknowns[lay.n_coeffs() + 1 + k]);
        sol.free_force.push_back(true);
    }
    return sol;
}

BackbonePoint backbone_point(const Branch& branch, size_t i, int nnm_index) {
    const Eigen::VectorXd& u = branch.points.at(i).unknowns;
    BackbonePoint bp;
    bp.p = phase_flag(nnm_index);
    if (u.size() == 3) {
        bp.U1 = u[0];
        bp.U2 = u[1];
        bp.omega = u[2];
    } else {
        const int H = static_cast<int>((u.size() - 3) / 4);
        const HarmonicSolution sol = unpack_hb_unknowns(u, H);
        const AmplitudePhase ap = amplitude_phase(sol);
        bp.U1 = ap.U1;
        bp.U2 = ap.U2;
        bp.omega = sol.omega;
    }
    return bp;
}

std::vector<Eigen::Vector2d> amplitudes_at_omega(const Branch& branch, int nnm_index,
                                                 double omega) {
    std::vector<Eigen::Vector2d> out;
    for (size_t i = 0; i + 1 < branch.points.size(); ++i) {
        const BackbonePoint a = backbone_point(branch, i, nnm_index);
        const BackbonePoint b = backbone_point(branch, i + 1, nnm_index);
        const double lo = std::min(a.omega, b.omega);
        const double hi = std::max(a.omega, b.omega);
        if (omega < lo || omega > hi || lo == hi) continue;
        const double s = (omega - a.omega) / (b.omega - a.omega);
        out.emplace_back(a.U1 + s * (b.U1 - a.U1), a.U2 + s * (b.U2 - a.U2));
    }
    return out;
}

}  // namespace nnma
