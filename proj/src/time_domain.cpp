#include "nnma/time_domain.hpp"

#include <cmath>
#include <stdexcept>

namespace nnma {

namespace {

Eigen::Vector4d eom_rhs(const ModalModel& m, const Eigen::Vector4d& s,
                        const Eigen::Vector2d& p_fund, double omega, double t) {
    const Eigen::Vector2d q = s.head<2>();
    const Eigen::Vector2d qd = s.tail<2>();
    Eigen::Vector2d acc = p_fund * std::cos(omega * t) - nonlinear_force(m, q);
    for (int i = 0; i < 2; ++i)
        acc[i] -= 2.0 * m.zeta[i] * m.omega_n[i] * qd[i] + m.omega_n[i] * m.omega_n[i] * q[i];
    Eigen::Vector4d ds;
    ds << qd, acc;
    return ds;
}

Eigen::Vector4d rk4_step(const ModalModel& m, const Eigen::Vector4d& s,
                         const Eigen::Vector2d& p, double omega, double t, double dt) {
    const Eigen::Vector4d k1 = eom_rhs(m, s, p, omega, t);
    const Eigen::Vector4d k2 = eom_rhs(m, s + 0.5 * dt * k1, p, omega, t + 0.5 * dt);
    const Eigen::Vector4d k3 = eom_rhs(m, s + 0.5 * dt * k2, p, omega, t + 0.5 * dt);
    const Eigen::Vector4d k4 = eom_rhs(m, s + dt * k3, p, omega, t + dt);
    return s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

TimeSeries integrate(const ModalModel& model, const Eigen::Vector2d& p_fund, double omega,
                     const Eigen::Vector4d& initial_state, double t_end, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
    const int n = static_cast<int>(std::llround(t_end / dt));
    TimeSeries ts;
    ts.t.resize(n + 1);
    ts.q.resize(n + 1, 2);
    ts.qdot.resize(n + 1, 2);
    Eigen::Vector4d s = initial_state;
    for (int k = 0; k <= n; ++k) {
        ts.t[k] = k * dt;
        ts.q.row(k) = s.head<2>().transpose();
        ts.qdot.row(k) = s.tail<2>().transpose();
        if (k < n) {
            s = rk4_step(model, s, p_fund, omega, ts.t[k], dt);
            if (!s.allFinite()) throw std::runtime_error("integrate: state diverged");
        }
    }
    return ts;
}

Eigen::Vector4d hb_state(const HarmonicSolution& sol, double t) {
    const double th = sol.omega * t;
    Eigen::Vector4d s;
    for (int i = 0; i < 2; ++i) {
        const Series qs = sol.mode_series(i);
        s[i] = qs.eval(th);
        s[2 + i] = sol.omega * qs.derivative_theta().eval(th);
    }
    return s;
}

double periodicity_residual(const ModalModel& model, const Eigen::Vector2d& p_fund,
                            const HarmonicSolution& sol, const IntegratorConfig& cfg) {
    const double T = 2.0 * M_PI / sol.omega;
    const double dt = T / cfg.steps_per_period;
    const Eigen::Vector4d s0 = hb_state(sol, 0.0);
    Eigen::Vector4d s = s0;
    for (int k = 0; k < cfg.steps_per_period; ++k) {
        s = rk4_step(model, s, p_fund, sol.omega, k * dt, dt);
        if (!s.allFinite()) throw std::runtime_error("periodicity_residual: state diverged");
    }
    // Scale velocity components so both halves of the state carry equal weight.
    Eigen::Vector4d w = Eigen::Vector4d::Ones();
    w[2] = w[3] = 1.0 / sol.omega;
    const double denom = s0.cwiseProduct(w).norm();
    if (denom == 0.0) return (s - s0).cwiseProduct(w).norm();
    return (s - s0).cwiseProduct(w).norm() / denom;
}

EnergyBudget measured_energies(const ModalModel& model, const Eigen::Vector2d& p_fund,
                               double omega, const TimeSeries& series) {
    const Eigen::Index n = series.t.size();
    if (n < 2) throw std::invalid_argument("measured_energies: series too short");
    EnergyBudget e{0.0, 0.0, 0.0, 0.0};
    double* ed[2] = {&e.E_D1, &e.E_D2};
    double* ep[2] = {&e.E_P1, &e.E_P2};
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        const double h = series.t[k + 1] - series.t[k];
        for (int i = 0; i < 2; ++i) {
            const double c = 2.0 * model.zeta[i] * model.omega_n[i];
            const double d0 = c * series.qdot(k, i) * series.qdot(k, i);
            const double d1 = c * series.qdot(k + 1, i) * series.qdot(k + 1, i);
            const double f0 = p_fund[i] * std::cos(omega * series.t[k]) * series.qdot(k, i);
            const double f1 = p_fund[i] * std::cos(omega * series.t[k + 1]) * series.qdot(k + 1, i);
            *ed[i] += 0.5 * h * (d0 + d1);
            *ep[i] += 0.5 * h * (f0 + f1);
        }
    }
    return e;
}

EnergyBudget hb_energies(const ModalModel& model, const Eigen::Vector2d& p_fund,
                         const HarmonicSolution& sol, int samples) {
    const double T = 2.0 * M_PI / sol.omega;
    TimeSeries ts;
    ts.t.resize(samples + 1);
    ts.q.resize(samples + 1, 2);
    ts.qdot.resize(samples + 1, 2);
    for (int k = 0; k <= samples; ++k) {
        const double t = T * k / samples;
        const Eigen::Vector4d s = hb_state(sol, t);
        ts.t[k] = t;
        ts.q.row(k) = s.head<2>().transpose();
        ts.qdot.row(k) = s.tail<2>().transpose();
    }
    return measured_energies(model, p_fund, sol.omega, ts);
}

double mechanical_energy(const ModalModel& model, const Eigen::Vector4d& state) {
    const Eigen::Vector2d q = state.head<2>();
    const Eigen::Vector2d qd = state.tail<2>();
    double e = 0.5 * qd.squaredNorm() + nonlinear_potential(model, q);
    for (int i = 0; i < 2; ++i)
        e += 0.5 * model.omega_n[i] * model.omega_n[i] * q[i] * q[i];
    return e;
}

}  // namespace nnma
