#pragma once

#include <Eigen/Dense>

#include "nnma/hb.hpp"
#include "nnma/model.hpp"

namespace nnma {

/// Sampled trajectory of the modal coordinates.
struct TimeSeries {
    Eigen::VectorXd t;
    Eigen::Matrix<double, Eigen::Dynamic, 2> q;
    Eigen::Matrix<double, Eigen::Dynamic, 2> qdot;
};

struct IntegratorConfig {
    int steps_per_period = 1 << 12;
};

/// Classical RK4 on the modal equations of motion with forcing
/// p(t) = P cos(omega t), P = modal_force_vector(shapes, layout).
/// Throws std::runtime_error if the state stops being finite.
TimeSeries integrate(const ModalModel& model, const Eigen::Vector2d& p_fund, double omega,
                     const Eigen::Vector4d& initial_state, double t_end, double dt);

/// State (q1, q2, qd1, qd2) of the harmonic solution at time t.
Eigen::Vector4d hb_state(const HarmonicSolution& sol, double t);

/// |state(T) - state(0)| / |state(0)| after integrating one period from the
/// HB-reconstructed initial condition.
double periodicity_residual(const ModalModel& model, const Eigen::Vector2d& p_fund,
                            const HarmonicSolution& sol,
                            const IntegratorConfig& cfg = IntegratorConfig());

struct EnergyBudget {
    double E_D1, E_D2;   ///< dissipated per mode over one period
    double E_P1, E_P2;   ///< injected per mode over one period
};

/// Trapezoid evaluation of the per-mode damping and forcing energy integrals
/// over one period of the given series (which must span exactly one period,
/// endpoint excluded).
EnergyBudget measured_energies(const ModalModel& model, const Eigen::Vector2d& p_fund,
                               double omega, const TimeSeries& series);

/// Energy integrals of a harmonic solution evaluated on a uniform grid
/// (exact for trig polynomials).
EnergyBudget hb_energies(const ModalModel& model, const Eigen::Vector2d& p_fund,
                         const HarmonicSolution& sol, int samples = 1 << 12);

/// Kinetic plus potential energy of the conservative part at one state.
double mechanical_energy(const ModalModel& model, const Eigen::Vector4d& state);

}  // namespace nnma
