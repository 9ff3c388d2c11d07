#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace nnma {

/// System traced by the continuation engine: residual with m rows over n
/// unknowns, m in {n-1, n}. The m = n case is for systems carrying a
/// redundant-but-consistent row (phase-anchored conservative problems); the
/// corrector then solves in the least-squares sense.
struct ContinuationSystem {
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> residual;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian;
};

struct ContinuationConfig {
    double tol = 1e-9;            ///< corrector tolerance on the scaled residual
    int max_newton = 25;
    double step_initial = 1e-3;   ///< arclength in scaled unknowns
    double step_min = 1e-8;
    double step_max = 0.05;
    double growth = 1.3;          ///< applied after corrector success in <= 3 iterations
    int max_points = 2000;

    /// Per-unknown scaling; arclength and tangents live in u ./ scale.
    /// Empty means all ones.
    Eigen::VectorXd scale;
    /// Residual rows are divided by this before the tolerance test.
    double residual_scale = 1.0;

    /// Accepted-point predicate; returning true terminates with parameter_bound.
    std::function<bool(const Eigen::VectorXd&)> out_of_bounds;
    /// Optional amplitude observable with upper bound (amplitude_bound).
    std::function<double(const Eigen::VectorXd&)> amplitude;
    double amplitude_max = std::numeric_limits<double>::infinity();

    bool detect_closed_loop = true;
};

struct BranchPoint {
    Eigen::VectorXd unknowns;
    Eigen::VectorXd tangent;      ///< unit in scaled coordinates
    double step_used = 0.0;
    double residual_norm = 0.0;   ///< scaled
};

enum class BranchKind { backbone, forced_response, quadrature_locus };
enum class Termination { parameter_bound, amplitude_bound, step_failure, closed_loop, max_points, seed_failure };

struct Branch {
    std::vector<BranchPoint> points;
    BranchKind kind = BranchKind::backbone;
    Termination termination = Termination::max_points;

    size_t size() const { return points.size(); }
    const BranchPoint& operator[](size_t i) const { return points[i]; }
};

std::string to_string(BranchKind kind);
std::string to_string(Termination term);

/// Newton/Gauss-Newton solve of system.residual = 0 from `guess`, optionally
/// holding one unknown fixed (frozen_index >= 0). Used to converge seeds.
/// Returns nullopt if it does not reach tol within max_newton iterations.
std::optional<Eigen::VectorXd> converge_point(const ContinuationSystem& system,
                                              const Eigen::VectorXd& guess,
                                              const ContinuationConfig& config,
                                              int frozen_index = -1,
                                              int* iterations_out = nullptr);

/// Pseudo-arclength predictor-corrector. The seed must already satisfy the
/// residual to tolerance (see converge_point). `direction_hint`, if given,
/// orients the initial tangent (scaled-space dot product > 0).
/// Throws std::runtime_error if the seed is not converged.
Branch continue_branch(const ContinuationSystem& system, const Eigen::VectorXd& seed,
                       const ContinuationConfig& config,
                       const Eigen::VectorXd& direction_hint = Eigen::VectorXd());

/// Linear-interpolated zero crossings of a scalar observable along the branch.
/// Returns the interpolated unknown vectors at each crossing.
std::vector<Eigen::VectorXd> detect_sign_change(const Branch& branch,
                                                const std::function<double(const Eigen::VectorXd&)>& observable);

}  // namespace nnma
