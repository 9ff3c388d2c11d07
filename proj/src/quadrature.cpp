#include "nnma/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include "nnma/appropriation.hpp"

namespace nnma {

namespace {

struct QuadSystem {
    const ModalModel* model;
    const ModeShapeMatrix* shapes;
    std::vector<int> force_locations;   // one per free force
    std::vector<int> constraint_locations;
    int H;

    HbLayout layout() const { return HbLayout{H}; }
    int n_unknowns() const { return layout().n_coeffs() + 1 + static_cast<int>(force_locations.size()); }

    Eigen::Vector2d modal_force(const Eigen::VectorXd& u) const {
        const HbLayout lay = layout();
        Eigen::Vector2d p = Eigen::Vector2d::Zero();
        for (size_t k = 0; k < force_locations.size(); ++k)
            p += u[lay.n_coeffs() + 1 + k] * shapes->row(force_locations[k]);
        return p;
    }

    Eigen::VectorXd residual(const Eigen::VectorXd& u) const {
        const HbLayout lay = layout();
        const HarmonicSolution sol = unpack_hb_unknowns(u, H);
        Eigen::VectorXd r(lay.n_coeffs() + constraint_locations.size());
        r.head(lay.n_coeffs()) = hb_residual(*model, sol, modal_force(u));
        for (size_t c = 0; c < constraint_locations.size(); ++c) {
            const Eigen::Vector2d row = shapes->row(constraint_locations[c]);
            r[lay.n_coeffs() + c] = row[0] * u[lay.cos(0, 1)] + row[1] * u[lay.cos(1, 1)];
        }
        return r;
    }

    Eigen::MatrixXd jacobian(const Eigen::VectorXd& u) const {
        const HbLayout lay = layout();
        const HarmonicSolution sol = unpack_hb_unknowns(u, H);
        const int nc = lay.n_coeffs();
        const int m = nc + static_cast<int>(constraint_locations.size());
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, n_unknowns());
        J.block(0, 0, nc, nc + 1) = hb_jacobian(*model, sol);
        if (!force_locations.empty())
            J.block(0, nc + 1, nc, force_locations.size()) =
                hb_force_jacobian(*shapes, force_locations, H);
        for (size_t c = 0; c < constraint_locations.size(); ++c) {
            const Eigen::Vector2d row = shapes->row(constraint_locations[c]);
            J(nc + c, lay.cos(0, 1)) = row[0];
            J(nc + c, lay.cos(1, 1)) = row[1];
        }
        return J;
    }

    ContinuationSystem as_continuation() const {
        ContinuationSystem cs;
        cs.residual = [this](const Eigen::VectorXd& u) { return residual(u); };
        cs.jacobian = [this](const Eigen::VectorXd& u) { return jacobian(u); };
        return cs;
    }
};

ContinuationConfig make_cont_config(const QuadSystem& qs, const QuadratureConfig& cfg) {
    const HbLayout lay = qs.layout();
    ContinuationConfig cc = cfg.continuation;
    const double w1 = qs.model->omega_n[0];
    Eigen::VectorXd scale = Eigen::VectorXd::Constant(qs.n_unknowns(), cfg.amp_ref);
    scale[lay.n_coeffs()] = w1;
    const double f_ref = std::max(2.0 * qs.model->zeta.maxCoeff() * w1 * w1 * cfg.amp_ref, 1e-6);
    for (size_t k = 0; k < qs.force_locations.size(); ++k)
        scale[lay.n_coeffs() + 1 + k] = f_ref;
    cc.scale = scale;
    cc.residual_scale = w1 * w1 * cfg.amp_ref;
    cc.max_points = cfg.max_points;

    const int iw = lay.n_coeffs();
    const double slack = 0.05 * (cfg.omega_max - cfg.omega_min);
    const int nf = static_cast<int>(qs.force_locations.size());
    cc.out_of_bounds = [iw, nf, slack, cfg](const Eigen::VectorXd& u) {
        if (u[iw] > cfg.omega_max || u[iw] < cfg.omega_min - slack) return true;
        for (int k = 0; k < nf; ++k)
            if (std::abs(u[iw + 1 + k]) > cfg.force_max) return true;
        return false;
    };
    const int H = qs.H;
    cc.amplitude = [H](const Eigen::VectorXd& u) {
        const AmplitudePhase ap = amplitude_phase(unpack_hb_unknowns(u, H));
        return std::max(ap.U1, ap.U2);
    };
    cc.amplitude_max = cfg.amplitude_max;
    return cc;
}

/// Fundamental cos/sin pair of each mode of the linear model under modal
/// forcing P cos(Omega t).
void linear_fundamental(const ModalModel& m, const Eigen::Vector2d& P, double omega,
                        Eigen::Vector2d& a, Eigen::Vector2d& b) {
    for (int i = 0; i < 2; ++i) {
        const double k = m.omega_n[i] * m.omega_n[i] - omega * omega;
        const double c = 2.0 * m.zeta[i] * m.omega_n[i] * omega;
        const double d = k * k + c * c;
        a[i] = P[i] * k / d;
        b[i] = P[i] * c / d;
    }
}

/// det of the matrix mapping force amplitudes to the constraint functions of
/// the linear model (0 iff a nontrivial quadrature solution exists).
double linear_constraint_det(const ModalModel& m, const ModeShapeMatrix& shapes,
                             const std::vector<int>& force_locs,
                             const std::vector<int>& cons_locs, double omega) {
    const size_t n = force_locs.size();
    Eigen::MatrixXd M(n, n);
    for (size_t c = 0; c < n; ++c) {
        Eigen::Vector2d a, b;
        linear_fundamental(m, shapes.row(force_locs[c]), omega, a, b);
        for (size_t r = 0; r < n; ++r)
            M(r, c) = shapes.row(cons_locs[r]).dot(a);
    }
    return M.determinant();
}

/// Linear phase-resonance frequency near the requested mode: smallest-|omega
/// - omega_n| zero of the constraint determinant.
double linear_quadrature_frequency(const ModalModel& m, const ModeShapeMatrix& shapes,
                                   const std::vector<int>& force_locs,
                                   const std::vector<int>& cons_locs, int nnm_index) {
    const double wn = m.omega_n[nnm_index - 1];
    const double mid = 0.5 * (m.omega_n[0] + m.omega_n[1]);
    double lo = (nnm_index == 1) ? 0.85 * wn : mid;
    double hi = (nnm_index == 1) ? mid : 1.15 * wn;

    auto f = [&](double w) { return linear_constraint_det(m, shapes, force_locs, cons_locs, w); };
    const int nscan = 400;
    double best = wn;
    double best_dist = std::numeric_limits<double>::infinity();
    double wprev = lo, fprev = f(lo);
    bool found = false;
    for (int k = 1; k <= nscan; ++k) {
        const double w = lo + (hi - lo) * k / nscan;
        const double fw = f(w);
        if ((fprev < 0.0 && fw >= 0.0) || (fprev > 0.0 && fw <= 0.0)) {
            double a = wprev, bmax = w;
            for (int it = 0; it < 100; ++it) {
                const double c = 0.5 * (a + bmax);
                if ((f(a) <= 0.0) == (f(c) <= 0.0))
                    a = c;
                else
                    bmax = c;
            }
            const double root = 0.5 * (a + bmax);
            if (std::abs(root - wn) < best_dist) {
                best = root;
                best_dist = std::abs(root - wn);
                found = true;
            }
        }
        wprev = w;
        fprev = fw;
    }
    if (!found)
        throw std::runtime_error("quadrature_locus: no linear phase resonance in the window");
    return best;
}

}  // namespace

Branch forced_response(const ModalModel& model, const ModeShapeMatrix& shapes,
                       const ExcitationLayout& layout, const QuadratureConfig& cfg) {
    QuadSystem qs{&model, &shapes, {}, {}, cfg.harmonics};
    const HbLayout lay = qs.layout();
    const Eigen::Vector2d P = modal_force_vector(shapes, layout);

    ContinuationSystem sys;
    sys.residual = [&model, P, H = cfg.harmonics](const Eigen::VectorXd& u) {
        return hb_residual(model, unpack_hb_unknowns(u, H), P);
    };
    sys.jacobian = [&model, H = cfg.harmonics](const Eigen::VectorXd& u) {
        return hb_jacobian(model, unpack_hb_unknowns(u, H));
    };

    ContinuationConfig cc = make_cont_config(qs, cfg);

    // Linear response at the low edge of the window, refined at frozen omega.
    Eigen::VectorXd guess = Eigen::VectorXd::Zero(lay.n_coeffs() + 1);
    Eigen::Vector2d a, b;
    linear_fundamental(model, P, cfg.omega_min, a, b);
    for (int i = 0; i < 2; ++i) {
        guess[lay.cos(i, 1)] = a[i];
        guess[lay.sin(i, 1)] = b[i];
    }
    guess[lay.n_coeffs()] = cfg.omega_min;
    auto seed = converge_point(sys, guess, cc, lay.n_coeffs());
    if (!seed) {
        Branch bad;
        bad.kind = BranchKind::forced_response;
        bad.termination = Termination::seed_failure;
        return bad;
    }

    Eigen::VectorXd hint = Eigen::VectorXd::Zero(seed->size());
    hint[lay.n_coeffs()] = 1.0;
    Branch br = continue_branch(sys, *seed, cc, hint);
    br.kind = BranchKind::forced_response;
    return br;
}

Branch quadrature_locus(const ModalModel& model, const ModeShapeMatrix& shapes,
                        const std::vector<QuadratureConstraint>& constraints, int nnm_index,
                        const QuadratureConfig& cfg) {
    if (constraints.empty() || constraints.size() > 2)
        throw std::invalid_argument("quadrature_locus: need one or two constraints");

    QuadSystem qs{&model, &shapes, {}, {}, cfg.harmonics};
    for (const auto& c : constraints) {
        qs.force_locations.push_back(c.colocated_location);
        qs.constraint_locations.push_back(c.colocated_location);
    }
    const HbLayout lay = qs.layout();
    ContinuationSystem sys = qs.as_continuation();
    ContinuationConfig cc = make_cont_config(qs, cfg);

    // Linear phase resonance: frequency from the constraint determinant,
    // force direction from its null vector (single force: unit).
    const double w0 = linear_quadrature_frequency(model, shapes, qs.force_locations,
                                                  qs.constraint_locations, nnm_index);
    Eigen::VectorXd fdir = Eigen::VectorXd::Ones(1);
    if (constraints.size() == 2) {
        Eigen::MatrixXd M(2, 2);
        for (int c = 0; c < 2; ++c) {
            Eigen::Vector2d a, b;
            linear_fundamental(model, shapes.row(qs.force_locations[c]), w0, a, b);
            for (int r = 0; r < 2; ++r) M(r, c) = shapes.row(qs.constraint_locations[r]).dot(a);
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
        fdir = svd.matrixV().col(1);
    }

    Eigen::Vector2d Pdir = Eigen::Vector2d::Zero();
    for (size_t k = 0; k < qs.force_locations.size(); ++k)
        Pdir += fdir[k] * shapes.row(qs.force_locations[k]);
    // Orient so the constrained response lags the force (target_phase sign of
    // the co-located fundamental sine).
    {
        Eigen::Vector2d a, b;
        linear_fundamental(model, Pdir, w0, a, b);
        const double bx = shapes.row(constraints[0].colocated_location).dot(b);
        if (bx * constraints[0].target_phase < 0.0) fdir = -fdir;
    }

    Eigen::VectorXd guess = Eigen::VectorXd::Zero(qs.n_unknowns());
    {
        Eigen::Vector2d a, b;
        linear_fundamental(model, cfg.seed_force * Pdir, w0, a, b);
        for (int i = 0; i < 2; ++i) {
            guess[lay.cos(i, 1)] = a[i];
            guess[lay.sin(i, 1)] = b[i];
        }
    }
    guess[lay.n_coeffs()] = w0;
    for (size_t k = 0; k < qs.force_locations.size(); ++k)
        guess[lay.n_coeffs() + 1 + k] = cfg.seed_force * fdir[k];

    // Refine with the first force amplitude pinned.
    auto seed = converge_point(sys, guess, cc, lay.n_coeffs() + 1);
    if (!seed) {
        Branch bad;
        bad.kind = BranchKind::quadrature_locus;
        bad.termination = Termination::seed_failure;
        return bad;
    }

    // Trace with growing response amplitude.
    Eigen::VectorXd hint = Eigen::VectorXd::Zero(qs.n_unknowns());
    const int dom = nnm_index - 1;
    const double bseed = (*seed)[lay.sin(dom, 1)];
    hint[lay.sin(dom, 1)] = (bseed >= 0.0) ? 1.0 : -1.0;
    Branch br = continue_branch(sys, *seed, cc, hint);
    br.kind = BranchKind::quadrature_locus;
    return br;
}

Eigen::VectorXd seed_isolated_quadrature(const ModalModel& model, const ModeShapeMatrix& shapes,
                                         int loc, const HarmonicSolution& backbone_solution) {
    const int H = backbone_solution.n_harmonics;
    const HbLayout lay{H};
    const AmplitudePhase ap = amplitude_phase(backbone_solution);

    BackbonePoint target;
    target.omega = backbone_solution.omega;
    target.U1 = ap.U1;
    target.U2 = ap.U2;
    // Inter-modal phase on the backbone decides the flag.
    const double dphi = std::remainder(ap.phi1 - ap.phi2, 2.0 * M_PI);
    target.p = (std::abs(dphi) < M_PI / 2.0) ? +1 : -1;
    const double F1 = single_force_amplitude(shapes, loc, model, target);

    // Backbone coefficients are phase-anchored to a cosine fundamental; the
    // quadrature convention wants the fundamental in the sine. Shift time by
    // a quarter period: harmonic k rotates by k*pi/2.
    Eigen::VectorXd u = Eigen::VectorXd::Zero(lay.n_coeffs() + 2);
    for (int i = 0; i < 2; ++i) {
        const Series s = backbone_solution.mode_series(i);
        Series r(H);
        r.dc() = s.dc();
        for (int k = 1; k <= H; ++k) {
            const double c = std::cos(k * M_PI / 2.0);
            const double sn = std::sin(k * M_PI / 2.0);
            r.cos_coef(k) = s.cos_coef(k) * c - s.sin_coef(k) * sn;
            r.sin_coef(k) = s.cos_coef(k) * sn + s.sin_coef(k) * c;
        }
        u.segment(lay.dc(i), lay.per_mode()) = r.coef();
    }
    u[lay.n_coeffs()] = backbone_solution.omega;
    u[lay.n_coeffs() + 1] = F1;
    return u;
}

std::optional<Eigen::VectorXd> refine_quadrature_seed(const ModalModel& model,
                                                      const ModeShapeMatrix& shapes,
                                                      const std::vector<QuadratureConstraint>& constraints,
                                                      const Eigen::VectorXd& guess,
                                                      const QuadratureConfig& cfg,
                                                      int* iterations) {
    QuadSystem qs{&model, &shapes, {}, {}, cfg.harmonics};
    for (const auto& c : constraints) {
        qs.force_locations.push_back(c.colocated_location);
        qs.constraint_locations.push_back(c.colocated_location);
    }
    ContinuationSystem sys = qs.as_continuation();
    ContinuationConfig cc = make_cont_config(qs, cfg);
    return converge_point(sys, guess, cc, qs.layout().n_coeffs(), iterations);
}

Branch continue_quadrature_from(const ModalModel& model, const ModeShapeMatrix& shapes,
                                const std::vector<QuadratureConstraint>& constraints,
                                const Eigen::VectorXd& seed, const QuadratureConfig& cfg,
                                const Eigen::VectorXd& direction_hint) {
    QuadSystem qs{&model, &shapes, {}, {}, cfg.harmonics};
    for (const auto& c : constraints) {
        qs.force_locations.push_back(c.colocated_location);
        qs.constraint_locations.push_back(c.colocated_location);
    }
    ContinuationSystem sys = qs.as_continuation();
    ContinuationConfig cc = make_cont_config(qs, cfg);

    if (direction_hint.size() == seed.size()) {
        Branch br = continue_branch(sys, seed, cc, direction_hint);
        br.kind = BranchKind::quadrature_locus;
        return br;
    }

    // Both directions, stitched with the seed in the middle.
    const HbLayout lay = qs.layout();
    Eigen::VectorXd hint = Eigen::VectorXd::Zero(seed.size());
    hint[lay.n_coeffs()] = 1.0;
    Branch up = continue_branch(sys, seed, cc, hint);
    Branch down = continue_branch(sys, seed, cc, -hint);
    Branch merged;
    merged.kind = BranchKind::quadrature_locus;
    merged.termination = up.termination;
    for (size_t i = down.points.size(); i-- > 1;) merged.points.push_back(down.points[i]);
    merged.points.insert(merged.points.end(), up.points.begin(), up.points.end());
    return merged;
}

std::vector<double> phase_profile(const HarmonicSolution& sol, const ModeShapeMatrix& shapes,
                                  const std::vector<int>& locations) {
    std::vector<double> phases;
    phases.reserve(locations.size());
    for (int j : locations) {
        const Eigen::Vector2d f = colocated_fundamental(sol, shapes, j);
        double p = std::atan2(f[1], f[0]);
        if (p <= -M_PI) p += 2.0 * M_PI;
        phases.push_back(p);
    }
    return phases;
}

Eigen::Vector2d colocated_fundamental(const HarmonicSolution& sol, const ModeShapeMatrix& shapes,
                                      int location) {
    const HbLayout lay = sol.layout();
    const Eigen::Vector2d row = shapes.row(location);
    Eigen::Vector2d f;
    f[0] = row[0] * sol.coeffs[lay.cos(0, 1)] + row[1] * sol.coeffs[lay.cos(1, 1)];
    f[1] = row[0] * sol.coeffs[lay.sin(0, 1)] + row[1] * sol.coeffs[lay.sin(1, 1)];
    return f;
}

}  // namespace nnma
