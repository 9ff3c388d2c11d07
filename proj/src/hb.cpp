#include "nnma/hb.hpp"

#include <cmath>
#include <stdexcept>

namespace nnma {

Series HarmonicSolution::mode_series(int mode) const {
    const HbLayout lay = layout();
    return Series(coeffs.segment(lay.dc(mode), lay.per_mode()));
}

void HarmonicSolution::set_mode_series(int mode, const Series& s) {
    const HbLayout lay = layout();
    coeffs.segment(lay.dc(mode), lay.per_mode()) = s.resized(n_harmonics).coef();
}

AmplitudePhase amplitude_phase(const HarmonicSolution& sol) {
    const HbLayout lay = sol.layout();
    AmplitudePhase ap{};
    double* U[2] = {&ap.U1, &ap.U2};
    double* phi[2] = {&ap.phi1, &ap.phi2};
    for (int i = 0; i < 2; ++i) {
        const double a = sol.coeffs[lay.cos(i, 1)];
        const double b = sol.coeffs[lay.sin(i, 1)];
        *U[i] = std::hypot(a, b);
        double p = (*U[i] == 0.0) ? 0.0 : std::atan2(b, a);
        if (p <= -M_PI) p += 2.0 * M_PI;
        *phi[i] = p;
    }
    return ap;
}

namespace {

// Exact Fourier coefficients (up to H) of both components of N(q) for the
// H-truncated q. Intermediate products keep their full harmonic content.
void nonlinear_series(const ModalModel& m, const Series& q1, const Series& q2, int H,
                      Series& n1, Series& n2) {
    const auto& a = m.alpha;
    const auto& g = m.gamma;

    const Series q11 = multiply(q1, q1);   // order 2H
    const Series q12 = multiply(q1, q2);
    const Series q22 = multiply(q2, q2);

    const Series q111 = multiply_truncated(q11, q1, H);
    const Series q112 = multiply_truncated(q11, q2, H);
    const Series q122 = multiply_truncated(q22, q1, H);
    const Series q222 = multiply_truncated(q22, q2, H);

    n1 = Series(H);
    n2 = Series(H);
    n1.coef() = a[0] * q11.resized(H).coef() + 2.0 * a[1] * q12.resized(H).coef()
              + a[2] * q22.resized(H).coef() + g[0] * q111.coef() + 3.0 * g[1] * q112.coef()
              + g[2] * q122.coef() + g[3] * q222.coef();
    n2.coef() = a[1] * q11.resized(H).coef() + 2.0 * a[2] * q12.resized(H).coef()
              + a[3] * q22.resized(H).coef() + g[1] * q111.coef() + g[2] * q112.coef()
              + 3.0 * g[3] * q122.coef() + g[4] * q222.coef();
}

// Series (order 2H, exact) of the entries of dN/dq evaluated on the truncated
// solution. Symmetric: d12 == d21.
void jacobian_series(const ModalModel& m, const Series& q1, const Series& q2,
                     Series& d11, Series& d12, Series& d22) {
    const auto& a = m.alpha;
    const auto& g = m.gamma;
    const Series q11 = multiply(q1, q1);
    const Series q12 = multiply(q1, q2);
    const Series q22 = multiply(q2, q2);
    const int H2 = q11.harmonics();

    d11 = Series(H2);
    d12 = Series(H2);
    d22 = Series(H2);
    d11.coef() = 2.0 * a[0] * q1.resized(H2).coef() + 2.0 * a[1] * q2.resized(H2).coef()
               + 3.0 * g[0] * q11.coef() + 6.0 * g[1] * q12.coef() + g[2] * q22.coef();
    d12.coef() = 2.0 * a[1] * q1.resized(H2).coef() + 2.0 * a[2] * q2.resized(H2).coef()
               + 3.0 * g[1] * q11.coef() + 2.0 * g[2] * q12.coef() + 3.0 * g[3] * q22.coef();
    d22.coef() = 2.0 * a[2] * q1.resized(H2).coef() + 2.0 * a[3] * q2.resized(H2).coef()
               + g[2] * q11.coef() + 6.0 * g[3] * q12.coef() + 3.0 * g[4] * q22.coef();
}

}  // namespace

Eigen::VectorXd hb_residual(const ModalModel& model, const HarmonicSolution& sol,
                            const Eigen::Vector2d& p_fund) {
    const int H = sol.n_harmonics;
    const HbLayout lay = sol.layout();
    if (sol.coeffs.size() != lay.n_coeffs())
        throw std::invalid_argument("hb_residual: coefficient vector has wrong length");

    const Series q1 = sol.mode_series(0);
    const Series q2 = sol.mode_series(1);
    Series n1, n2;
    nonlinear_series(model, q1, q2, H, n1, n2);
    const Series* nl[2] = {&n1, &n2};

    const double W = sol.omega;
    Eigen::VectorXd r(lay.n_coeffs());
    for (int i = 0; i < 2; ++i) {
        const double w2 = model.omega_n[i] * model.omega_n[i];
        const double c = 2.0 * model.zeta[i] * model.omega_n[i];
        r[lay.dc(i)] = w2 * sol.coeffs[lay.dc(i)] + nl[i]->dc();
        for (int k = 1; k <= H; ++k) {
            const double ak = sol.coeffs[lay.cos(i, k)];
            const double bk = sol.coeffs[lay.sin(i, k)];
            const double kw = k * W;
            r[lay.cos(i, k)] = (w2 - kw * kw) * ak + c * kw * bk + nl[i]->cos_coef(k);
            r[lay.sin(i, k)] = (w2 - kw * kw) * bk - c * kw * ak + nl[i]->sin_coef(k);
        }
        r[lay.cos(i, 1)] -= p_fund[i];
    }
    return r;
}

Eigen::MatrixXd hb_jacobian(const ModalModel& model, const HarmonicSolution& sol) {
    const int H = sol.n_harmonics;
    const HbLayout lay = sol.layout();
    const int n = lay.n_coeffs();
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n + 1);

    // Nonlinear part: block (i, j) is the multiply operator of dN_i/dq_j.
    const Series q1 = sol.mode_series(0);
    const Series q2 = sol.mode_series(1);
    Series d11, d12, d22;
    jacobian_series(model, q1, q2, d11, d12, d22);
    const int pm = lay.per_mode();
    const Eigen::MatrixXd T11 = multiply_operator(d11, H, H);
    const Eigen::MatrixXd T12 = multiply_operator(d12, H, H);
    const Eigen::MatrixXd T22 = multiply_operator(d22, H, H);
    J.block(0, 0, pm, pm) = T11;
    J.block(0, pm, pm, pm) = T12;
    J.block(pm, 0, pm, pm) = T12;
    J.block(pm, pm, pm, pm) = T22;

    // Linear part and d/dOmega.
    const double W = sol.omega;
    for (int i = 0; i < 2; ++i) {
        const double w2 = model.omega_n[i] * model.omega_n[i];
        const double c = 2.0 * model.zeta[i] * model.omega_n[i];
        J(lay.dc(i), lay.dc(i)) += w2;
        for (int k = 1; k <= H; ++k) {
            const double ak = sol.coeffs[lay.cos(i, k)];
            const double bk = sol.coeffs[lay.sin(i, k)];
            const double kw = k * W;
            J(lay.cos(i, k), lay.cos(i, k)) += w2 - kw * kw;
            J(lay.cos(i, k), lay.sin(i, k)) += c * kw;
            J(lay.sin(i, k), lay.sin(i, k)) += w2 - kw * kw;
            J(lay.sin(i, k), lay.cos(i, k)) += -c * kw;
            J(lay.cos(i, k), n) = -2.0 * k * kw * ak + c * k * bk;
            J(lay.sin(i, k), n) = -2.0 * k * kw * bk - c * k * ak;
        }
    }
    return J;
}

Eigen::MatrixXd hb_force_jacobian(const ModeShapeMatrix& shapes,
                                  const std::vector<int>& location_indices, int H) {
    const HbLayout lay{H};
    Eigen::MatrixXd Jf = Eigen::MatrixXd::Zero(lay.n_coeffs(), location_indices.size());
    for (size_t c = 0; c < location_indices.size(); ++c) {
        const Eigen::Vector2d row = shapes.row(location_indices[c]);
        Jf(lay.cos(0, 1), c) = -row[0];
        Jf(lay.cos(1, 1), c) = -row[1];
    }
    return Jf;
}

}  // namespace nnma
