#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "nnma/backbone.hpp"
#include "nnma/continuation.hpp"
#include "nnma/hb.hpp"
#include "nnma/model.hpp"

namespace nnma {

/// Phase-quadrature condition between the excitation and the fundamental of
/// the physical response at the forced location: the co-located fundamental
/// cosine coefficient is zero, the sine coefficient carries sign target_phase
/// (+1: response lags the cos(Omega t) force by pi/2).
struct QuadratureConstraint {
    int colocated_location = 0;
    int target_phase = +1;
};

struct QuadratureConfig {
    int harmonics = 5;
    double amp_ref = 1e-3;                    ///< amplitude scaling [modal units]
    double omega_min = 2.0 * M_PI * 15.8;     ///< [rad/s]
    double omega_max = 2.0 * M_PI * 20.0;
    double amplitude_max = 0.12;              ///< modal amplitude bound
    double force_max = 1e3;                   ///< [N]
    double seed_force = 2e-4;                 ///< linear-limit seed amplitude [N]
    int max_points = 4000;
    ContinuationConfig continuation;
};

/// Fixed-force frequency response: continuation of the forced HB system in
/// Omega across [omega_min, omega_max], seeded from the linear response at
/// the window edge. Unknown layout per point: [coeffs, omega].
Branch forced_response(const ModalModel& model, const ModeShapeMatrix& shapes,
                       const ExcitationLayout& layout, const QuadratureConfig& cfg);

/// Quadrature locus with one or two free force amplitudes: augments the HB
/// system with one quadrature constraint per force and traces solutions in
/// (coeffs, Omega, F...). Seeded at the linear phase resonance of the given
/// NNM. Unknown layout per point: [coeffs, omega, F...].
Branch quadrature_locus(const ModalModel& model, const ModeShapeMatrix& shapes,
                        const std::vector<QuadratureConstraint>& constraints, int nnm_index,
                        const QuadratureConfig& cfg);

/// Initial unknown vector [coeffs, omega, F1] for an isolated quadrature
/// branch: backbone Fourier coefficients plus the energy-balance force
/// estimate. Feed to refine_quadrature_seed / continue_quadrature_from.
Eigen::VectorXd seed_isolated_quadrature(const ModalModel& model, const ModeShapeMatrix& shapes,
                                         int loc, const HarmonicSolution& backbone_solution);

/// Corrector refinement of a quadrature seed at fixed frequency. Returns
/// nullopt when the corrector fails (point not isolable from this seed).
std::optional<Eigen::VectorXd> refine_quadrature_seed(const ModalModel& model,
                                                      const ModeShapeMatrix& shapes,
                                                      const std::vector<QuadratureConstraint>& constraints,
                                                      const Eigen::VectorXd& guess,
                                                      const QuadratureConfig& cfg,
                                                      int* iterations = nullptr);

/// Continuation of the quadrature system from an already-converged unknown
/// vector, traced in the direction hint (both directions when hint is empty:
/// the two halves are concatenated, seed in the middle).
Branch continue_quadrature_from(const ModalModel& model, const ModeShapeMatrix& shapes,
                                const std::vector<QuadratureConstraint>& constraints,
                                const Eigen::VectorXd& seed, const QuadratureConfig& cfg,
                                const Eigen::VectorXd& direction_hint = Eigen::VectorXd());

/// Fundamental phase of the physical response at each location, in (-pi, pi].
std::vector<double> phase_profile(const HarmonicSolution& sol, const ModeShapeMatrix& shapes,
                                  const std::vector<int>& locations);

/// Fundamental cosine/sine pair of the physical response at one location.
Eigen::Vector2d colocated_fundamental(const HarmonicSolution& sol, const ModeShapeMatrix& shapes,
                                      int location);

}  // namespace nnma
