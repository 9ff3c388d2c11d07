#include <doctest.h>

#include <cmath>

#include "nnma/time_domain.hpp"

using namespace nnma;

namespace {

ModalModel linear_model() {
    ModalModel m = crossbeam_table1();
    m.alpha.setZero();
    m.gamma.setZero();
    return m;
}

}  // namespace

TEST_CASE("free linear oscillation reproduces the cosine solution") {
    ModalModel m = linear_model();
    m.zeta.setZero();
    const double w = m.omega_n[0];
    const double T = 2 * M_PI / w;
    const Eigen::Vector4d s0(1.0, 0.0, 0.0, 0.0);
    const double dt = T / 4096;
    const TimeSeries ts = integrate(m, Eigen::Vector2d::Zero(), w, s0, 10 * T, dt);
    double max_err = 0.0;
    for (Eigen::Index k = 0; k < ts.t.size(); ++k)
        max_err = std::max(max_err, std::abs(ts.q(k, 0) - std::cos(w * ts.t[k])));
    CHECK(max_err < 1e-8);
}

TEST_CASE("energy drift of the conservative system stays tiny") {
    ModalModel m = crossbeam_table1();
    m.zeta.setZero();
    const double T = 2 * M_PI / m.omega_n[0];
    const Eigen::Vector4d s0(3e-3, -1e-3, 0.0, 0.2);
    const TimeSeries ts = integrate(m, Eigen::Vector2d::Zero(), m.omega_n[0], s0, 10 * T, T / 4096);
    const double e0 = mechanical_energy(m, s0);
    double max_drift = 0.0;
    for (Eigen::Index k = 0; k < ts.t.size(); ++k) {
        Eigen::Vector4d s;
        s << ts.q(k, 0), ts.q(k, 1), ts.qdot(k, 0), ts.qdot(k, 1);
        max_drift = std::max(max_drift, std::abs(mechanical_energy(m, s) - e0) / e0);
    }
    CHECK(max_drift < 1e-8);
}

TEST_CASE("halving the step improves the error at fourth order") {
    ModalModel m = linear_model();
    m.zeta.setZero();
    const double w = m.omega_n[0];
    const double T = 2 * M_PI / w;
    const Eigen::Vector4d s0(1.0, 0.0, 0.0, 0.0);
    auto max_error = [&](double dt) {
        const TimeSeries ts = integrate(m, Eigen::Vector2d::Zero(), w, s0, T, dt);
        double err = 0.0;
        for (Eigen::Index k = 0; k < ts.t.size(); ++k)
            err = std::max(err, std::abs(ts.q(k, 0) - std::cos(w * ts.t[k])));
        return err;
    };
    const double e1 = max_error(T / 256);
    const double e2 = max_error(T / 512);
    CHECK(e1 / e2 > 12.0);   // ~16 for RK4
    CHECK(e1 / e2 < 24.0);
}

TEST_CASE("periodicity residual of the exact linear response") {
    const ModalModel m = linear_model();
    const double W = 95.0;
    const Eigen::Vector2d P(0.5, 0.2);

    HarmonicSolution sol;
    sol.n_harmonics = 1;
    sol.resize_zero();
    sol.omega = W;
    const HbLayout lay = sol.layout();
    for (int i = 0; i < 2; ++i) {
        const double k = m.omega_n[i] * m.omega_n[i] - W * W;
        const double c = 2 * m.zeta[i] * m.omega_n[i] * W;
        const double d = k * k + c * c;
        sol.coeffs[lay.cos(i, 1)] = P[i] * k / d;
        sol.coeffs[lay.sin(i, 1)] = P[i] * c / d;
    }

    CHECK(periodicity_residual(m, P, sol) < 1e-9);

    SUBCASE("a one-percent amplitude error is flagged") {
        sol.coeffs[lay.cos(0, 1)] *= 1.01;
        sol.coeffs[lay.sin(0, 1)] *= 1.01;
        CHECK(periodicity_residual(m, P, sol) > 1e-3);
    }
}

TEST_CASE("measured energies match the closed forms for one quadrature mode") {
    const ModalModel m = crossbeam_table1();
    const double W = 100.0;
    const double U = 2e-3;
    const double P1 = 0.7;

    // q1 = U sin(W t) lags the cosine force by pi/2; q2 = 0.
    HarmonicSolution sol;
    sol.n_harmonics = 1;
    sol.resize_zero();
    sol.omega = W;
    sol.coeffs[sol.layout().sin(0, 1)] = U;

    const EnergyBudget e = hb_energies(m, {P1, 0.0}, sol);
    const double ed_expected = 2 * m.zeta[0] * m.omega_n[0] * W * M_PI * U * U;
    const double ep_expected = M_PI * P1 * U;   // sin(phi) = 1
    CHECK(e.E_D1 == doctest::Approx(ed_expected).epsilon(1e-6));
    CHECK(e.E_P1 == doctest::Approx(ep_expected).epsilon(1e-6));
    CHECK(e.E_D2 == doctest::Approx(0.0));
    CHECK(e.E_P2 == doctest::Approx(0.0));
}

TEST_CASE("zero response has zero energies") {
    const ModalModel m = crossbeam_table1();
    HarmonicSolution sol;
    sol.n_harmonics = 2;
    sol.resize_zero();
    sol.omega = 90.0;
    const EnergyBudget e = hb_energies(m, Eigen::Vector2d::Zero(), sol);
    CHECK(e.E_D1 == 0.0);
    CHECK(e.E_D2 == 0.0);
    CHECK(e.E_P1 == 0.0);
    CHECK(e.E_P2 == 0.0);
}

TEST_CASE("integration rejects bad steps and diverging states") {
    const ModalModel m = crossbeam_table1();
    CHECK_THROWS_AS(integrate(m, Eigen::Vector2d::Zero(), 100.0, Eigen::Vector4d::Zero(), 1.0, 0.0),
                    std::invalid_argument);
    // A gigantic initial displacement blows up in the cubic force field.
    ModalModel unstable = m;
    unstable.gamma[0] = -128e6;
    const Eigen::Vector4d huge(10.0, 0.0, 0.0, 0.0);
    CHECK_THROWS_AS(integrate(unstable, Eigen::Vector2d::Zero(), 100.0, huge, 1.0, 1e-3),
                    std::runtime_error);
}
