#include "nnma/continuation.hpp"

#include <cmath>
#include <stdexcept>

namespace nnma {

std::string to_string(BranchKind kind) {
    switch (kind) {
        case BranchKind::backbone: return "backbone";
        case BranchKind::forced_response: return "forced_response";
        case BranchKind::quadrature_locus: return "quadrature_locus";
    }
    return "?";
}

std::string to_string(Termination term) {
    switch (term) {
        case Termination::parameter_bound: return "parameter_bound";
        case Termination::amplitude_bound: return "amplitude_bound";
        case Termination::step_failure: return "step_failure";
        case Termination::closed_loop: return "closed_loop";
        case Termination::max_points: return "max_points";
        case Termination::seed_failure: return "seed_failure";
    }
    return "?";
}

namespace {

Eigen::VectorXd effective_scale(const ContinuationConfig& cfg, Eigen::Index n) {
    if (cfg.scale.size() == 0) return Eigen::VectorXd::Ones(n);
    if (cfg.scale.size() != n)
        throw std::invalid_argument("continuation: scale vector length mismatch");
    return cfg.scale;
}

/// Unit tangent (scaled coordinates) spanning the null space of J*D^-1.
Eigen::VectorXd nullspace_tangent(const Eigen::MatrixXd& J, const Eigen::VectorXd& scale) {
    Eigen::MatrixXd Js = J;
    for (Eigen::Index c = 0; c < Js.cols(); ++c) Js.col(c) *= scale[c];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Js, Eigen::ComputeFullV);
    Eigen::VectorXd t = svd.matrixV().col(Js.cols() - 1);
    return t / t.norm();
}

}  // namespace

std::optional<Eigen::VectorXd> converge_point(const ContinuationSystem& system,
                                              const Eigen::VectorXd& guess,
                                              const ContinuationConfig& config,
                                              int frozen_index, int* iterations_out) {
    const Eigen::Index n = guess.size();
    const Eigen::VectorXd scale = effective_scale(config, n);
    Eigen::VectorXd u = guess;
    for (int it = 0; it < config.max_newton; ++it) {
        Eigen::VectorXd r = system.residual(u);
        if (!r.allFinite()) return std::nullopt;
        if (r.norm() / config.residual_scale <= config.tol) {
            if (iterations_out) *iterations_out = it;
            return u;
        }

        Eigen::MatrixXd J = system.jacobian(u);
        Eigen::MatrixXd Js = J;
        for (Eigen::Index c = 0; c < n; ++c) Js.col(c) *= scale[c];
        if (frozen_index >= 0) {
            Eigen::MatrixXd Jr(Js.rows(), n - 1);
            Jr << Js.leftCols(frozen_index), Js.rightCols(n - 1 - frozen_index);
            Eigen::VectorXd ds = Jr.colPivHouseholderQr().solve(-r);
            for (Eigen::Index c = 0, k = 0; c < n; ++c) {
                if (c == frozen_index) continue;
                u[c] += scale[c] * ds[k++];
            }
        } else {
            Eigen::VectorXd ds = Js.colPivHouseholderQr().solve(-r);
            u += scale.cwiseProduct(ds);
        }
        if (!u.allFinite()) return std::nullopt;
    }
    Eigen::VectorXd r = system.residual(u);
    if (r.allFinite() && r.norm() / config.residual_scale <= config.tol) {
        if (iterations_out) *iterations_out = config.max_newton;
        return u;
    }
    return std::nullopt;
}

namespace {

struct CorrectorResult {
    Eigen::VectorXd u;
    double residual_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Newton on {residual = 0, t_s . (u - u_pred)/scale = 0}, least squares when
/// the residual carries a redundant row.
CorrectorResult correct(const ContinuationSystem& system, const Eigen::VectorXd& u_pred,
                        const Eigen::VectorXd& tangent_scaled, const Eigen::VectorXd& scale,
                        const ContinuationConfig& cfg) {
    CorrectorResult out;
    const Eigen::Index n = u_pred.size();
    Eigen::VectorXd u = u_pred;
    for (int it = 0; it < cfg.max_newton; ++it) {
        Eigen::VectorXd r = system.residual(u);
        if (!r.allFinite()) return out;
        const double rnorm = r.norm() / cfg.residual_scale;
        const double cons = tangent_scaled.dot((u - u_pred).cwiseQuotient(scale));
        if (rnorm <= cfg.tol && std::abs(cons) <= cfg.tol * 10.0) {
            out.u = u;
            out.residual_norm = rnorm;
            out.iterations = it;
            out.converged = true;
            return out;
        }
        Eigen::MatrixXd J = system.jacobian(u);
        const Eigen::Index m = J.rows();
        Eigen::MatrixXd A(m + 1, n);
        Eigen::VectorXd rhs(m + 1);
        for (Eigen::Index c = 0; c < n; ++c) A.col(c).head(m) = J.col(c) * (scale[c] / cfg.residual_scale);
        A.row(m) = tangent_scaled.transpose();
        rhs.head(m) = -r / cfg.residual_scale;
        rhs[m] = -cons;
        Eigen::VectorXd ds = A.colPivHouseholderQr().solve(rhs);
        u += scale.cwiseProduct(ds);
        if (!u.allFinite()) return out;
    }
    return out;
}

}  // namespace

Branch continue_branch(const ContinuationSystem& system, const Eigen::VectorXd& seed,
                       const ContinuationConfig& config, const Eigen::VectorXd& direction_hint) {
    const Eigen::Index n = seed.size();
    const Eigen::VectorXd scale = effective_scale(config, n);
    Branch branch;

    Eigen::VectorXd r0 = system.residual(seed);
    if (!r0.allFinite() || r0.norm() / config.residual_scale > config.tol * 10.0)
        throw std::runtime_error("continue_branch: seed does not satisfy the residual");

    Eigen::VectorXd tangent = nullspace_tangent(system.jacobian(seed), scale);
    if (direction_hint.size() == n) {
        if (tangent.dot(direction_hint.cwiseQuotient(scale)) < 0.0) tangent = -tangent;
    }
    branch.points.push_back({seed, tangent, 0.0, r0.norm() / config.residual_scale});

    double step = std::min(config.step_initial, config.step_max);
    while (static_cast<int>(branch.points.size()) < config.max_points) {
        const BranchPoint& prev = branch.points.back();

        // Secant tangent once two points exist, null-space tangent otherwise.
        if (branch.points.size() >= 2) {
            const Eigen::VectorXd& a = branch.points[branch.points.size() - 2].unknowns;
            Eigen::VectorXd sec = (prev.unknowns - a).cwiseQuotient(scale);
            const double norm = sec.norm();
            if (norm > 0.0) tangent = sec / norm;
        } else {
            Eigen::VectorXd t = nullspace_tangent(system.jacobian(prev.unknowns), scale);
            if (t.dot(tangent) < 0.0) t = -t;
            tangent = t;
        }

        bool accepted = false;
        while (!accepted) {
            const Eigen::VectorXd u_pred = prev.unknowns + step * scale.cwiseProduct(tangent);
            CorrectorResult cr = correct(system, u_pred, tangent, scale, config);
            // Reject correctors that converge backwards along the branch.
            if (cr.converged) {
                const double progress = tangent.dot((cr.u - prev.unknowns).cwiseQuotient(scale));
                if (progress <= 0.0) cr.converged = false;
            }
            if (cr.converged) {
                branch.points.push_back({cr.u, tangent, step, cr.residual_norm});
                if (cr.iterations <= 3) step = std::min(step * config.growth, config.step_max);
                accepted = true;
            } else {
                step *= 0.5;
                if (step < config.step_min) {
                    branch.termination = Termination::step_failure;
                    return branch;
                }
            }
        }

        const Eigen::VectorXd& u = branch.points.back().unknowns;
        if (config.out_of_bounds && config.out_of_bounds(u)) {
            branch.termination = Termination::parameter_bound;
            return branch;
        }
        if (config.amplitude && config.amplitude(u) > config.amplitude_max) {
            branch.termination = Termination::amplitude_bound;
            return branch;
        }
        if (config.detect_closed_loop && branch.points.size() > 10) {
            const Eigen::VectorXd d = (u - seed).cwiseQuotient(scale);
            if (d.norm() < 0.75 * step) {
                branch.termination = Termination::closed_loop;
                return branch;
            }
        }
    }
    branch.termination = Termination::max_points;
    return branch;
}

std::vector<Eigen::VectorXd> detect_sign_change(const Branch& branch,
                                                const std::function<double(const Eigen::VectorXd&)>& observable) {
    std::vector<Eigen::VectorXd> crossings;
    if (branch.points.size() < 2) return crossings;
    double prev = observable(branch.points[0].unknowns);
    for (size_t i = 1; i < branch.points.size(); ++i) {
        const double cur = observable(branch.points[i].unknowns);
        if (prev == 0.0) {
            crossings.push_back(branch.points[i - 1].unknowns);
        } else if ((prev < 0.0 && cur > 0.0) || (prev > 0.0 && cur < 0.0)) {
            const double s = prev / (prev - cur);
            crossings.push_back(branch.points[i - 1].unknowns +
                                s * (branch.points[i].unknowns - branch.points[i - 1].unknowns));
        }
        prev = cur;
    }
    return crossings;
}

}  // namespace nnma
