#include <doctest.h>

#include <cmath>

#include "nnma/continuation.hpp"

using namespace nnma;

namespace {

// x^2 + y^2 = 1, the canonical closed-branch benchmark.
ContinuationSystem circle_system() {
    ContinuationSystem sys;
    sys.residual = [](const Eigen::VectorXd& u) {
        Eigen::VectorXd r(1);
        r[0] = u[0] * u[0] + u[1] * u[1] - 1.0;
        return r;
    };
    sys.jacobian = [](const Eigen::VectorXd& u) {
        Eigen::MatrixXd J(1, 2);
        J << 2 * u[0], 2 * u[1];
        return J;
    };
    return sys;
}

// Single linear oscillator under unit-ish force: unknowns (a, b, Omega).
struct Frf {
    double w = 100.0;
    double zeta = 0.01;
    double F = 1.0;

    ContinuationSystem system() const {
        ContinuationSystem sys;
        const double w2 = w * w, c = 2 * zeta * w;
        const double F0 = F;
        sys.residual = [w2, c, F0](const Eigen::VectorXd& u) {
            Eigen::VectorXd r(2);
            const double W = u[2];
            r[0] = (w2 - W * W) * u[0] + c * W * u[1] - F0;
            r[1] = (w2 - W * W) * u[1] - c * W * u[0];
            return r;
        };
        sys.jacobian = [w2, c](const Eigen::VectorXd& u) {
            Eigen::MatrixXd J(2, 3);
            const double W = u[2];
            J << w2 - W * W, c * W, -2 * W * u[0] + c * u[1],
                 -c * W, w2 - W * W, -2 * W * u[1] - c * u[0];
            return J;
        };
        return sys;
    }

    double amplitude(double W) const {
        const double k = w * w - W * W;
        const double c = 2 * zeta * w * W;
        return F / std::hypot(k, c);
    }
};

}  // namespace

TEST_CASE("circle branch closes on itself") {
    ContinuationSystem sys = circle_system();
    ContinuationConfig cfg;
    cfg.tol = 1e-12;
    cfg.step_initial = 0.05;
    cfg.step_max = 0.2;
    cfg.max_points = 500;
    Eigen::VectorXd seed(2);
    seed << 1.0, 0.0;
    const Branch b = continue_branch(sys, seed, cfg);
    CHECK(b.termination == Termination::closed_loop);
    CHECK(b.points.size() > 20);
    for (const auto& pt : b.points)
        CHECK(std::abs(pt.unknowns.squaredNorm() - 1.0) < 1e-10);
    // Both halves of the circle were visited.
    double min_x = 1.0;
    for (const auto& pt : b.points) min_x = std::min(min_x, pt.unknowns[0]);
    CHECK(min_x < -0.9);
}

TEST_CASE("consecutive tangents never reverse") {
    ContinuationSystem sys = circle_system();
    ContinuationConfig cfg;
    cfg.tol = 1e-12;
    cfg.step_initial = 0.05;
    cfg.step_max = 0.2;
    Eigen::VectorXd seed(2);
    seed << 1.0, 0.0;
    const Branch b = continue_branch(sys, seed, cfg);
    for (size_t i = 1; i < b.points.size(); ++i)
        CHECK(b.points[i].tangent.dot(b.points[i - 1].tangent) > 0.0);
    for (const auto& pt : b.points)
        CHECK(std::abs(pt.tangent.norm() - 1.0) < 1e-12);
}

TEST_CASE("linear frequency response matches the closed form") {
    Frf frf;
    ContinuationSystem sys = frf.system();
    ContinuationConfig cfg;
    cfg.tol = 1e-11;
    cfg.residual_scale = frf.w * frf.w * 1e-4;
    Eigen::VectorXd scale(3);
    scale << 1e-4, 1e-4, frf.w;
    cfg.scale = scale;
    cfg.step_initial = 1e-3;
    cfg.max_points = 3000;
    const double W_hi = 1.15 * frf.w;
    cfg.out_of_bounds = [W_hi](const Eigen::VectorXd& u) { return u[2] > W_hi; };

    // Seed at 0.9 w from the closed form.
    const double W0 = 0.9 * frf.w;
    const double k = frf.w * frf.w - W0 * W0;
    const double c = 2 * frf.zeta * frf.w * W0;
    const double d = k * k + c * c;
    Eigen::VectorXd seed(3);
    seed << frf.F * k / d, frf.F * c / d, W0;
    Eigen::VectorXd hint = Eigen::VectorXd::Zero(3);
    hint[2] = 1.0;
    const Branch b = continue_branch(sys, seed, cfg, hint);

    CHECK(b.termination == Termination::parameter_bound);
    CHECK(b.points.size() > 50);
    double peak = 0.0;
    for (const auto& pt : b.points) {
        const double amp = std::hypot(pt.unknowns[0], pt.unknowns[1]);
        peak = std::max(peak, amp);
        CHECK(amp == doctest::Approx(frf.amplitude(pt.unknowns[2])).epsilon(1e-8));
    }
    // The resonant peak was traversed.
    CHECK(peak > 0.9 * frf.amplitude(frf.w));
}

TEST_CASE("halving the maximum step keeps every point on the solution set") {
    Frf frf;
    ContinuationSystem sys = frf.system();
    ContinuationConfig cfg;
    cfg.tol = 1e-11;
    cfg.residual_scale = frf.w * frf.w * 1e-4;
    Eigen::VectorXd scale(3);
    scale << 1e-4, 1e-4, frf.w;
    cfg.scale = scale;
    cfg.out_of_bounds = [&](const Eigen::VectorXd& u) { return u[2] > 1.1 * frf.w; };
    Eigen::VectorXd seed(3);
    const double W0 = 0.95 * frf.w;
    const double k = frf.w * frf.w - W0 * W0;
    const double c = 2 * frf.zeta * frf.w * W0;
    seed << frf.F * k / (k * k + c * c), frf.F * c / (k * k + c * c), W0;
    Eigen::VectorXd hint = Eigen::VectorXd::Zero(3);
    hint[2] = 1.0;

    const Branch coarse = continue_branch(sys, seed, cfg, hint);
    ContinuationConfig fine_cfg = cfg;
    fine_cfg.step_max = cfg.step_max / 2;
    const Branch fine = continue_branch(sys, seed, fine_cfg, hint);

    // Solutions are parameterization-independent: every point of both runs
    // satisfies the residual to tolerance and matches the closed form.
    for (const Branch* b : {&coarse, &fine})
        for (const auto& pt : b->points) {
            CHECK(pt.residual_norm <= cfg.tol);
            CHECK(std::hypot(pt.unknowns[0], pt.unknowns[1]) ==
                  doctest::Approx(frf.amplitude(pt.unknowns[2])).epsilon(1e-8));
        }
}

TEST_CASE("reversed seed direction traces the branch the other way") {
    ContinuationSystem sys = circle_system();
    ContinuationConfig cfg;
    cfg.tol = 1e-12;
    cfg.step_initial = 0.03;
    cfg.step_max = 0.05;
    cfg.max_points = 40;
    cfg.detect_closed_loop = false;
    Eigen::VectorXd seed(2);
    seed << 1.0, 0.0;
    Eigen::VectorXd up(2), down(2);
    up << 0.0, 1.0;
    down << 0.0, -1.0;
    const Branch fwd = continue_branch(sys, seed, cfg, up);
    const Branch bwd = continue_branch(sys, seed, cfg, down);
    CHECK(fwd.points[5].unknowns[1] > 0.0);
    CHECK(bwd.points[5].unknowns[1] < 0.0);
    // Same solution set: mirror symmetry about y = 0.
    for (size_t i = 0; i < std::min(fwd.points.size(), bwd.points.size()); ++i)
        CHECK(std::abs(fwd.points[i].unknowns[1] + bwd.points[i].unknowns[1]) < 1e-9);
}

TEST_CASE("sign-change detection") {
    // Build a fake branch along a parabola-free path: observable = Omega - c.
    Branch b;
    for (int i = 0; i <= 10; ++i) {
        BranchPoint pt;
        pt.unknowns = Eigen::VectorXd::Constant(1, 0.5 * i);
        pt.tangent = Eigen::VectorXd::Ones(1);
        b.points.push_back(pt);
    }
    SUBCASE("constant positive observable crosses nowhere") {
        const auto crossings = detect_sign_change(b, [](const Eigen::VectorXd&) { return 2.0; });
        CHECK(crossings.empty());
    }
    SUBCASE("linear observable crosses once at the interpolated point") {
        const auto crossings =
            detect_sign_change(b, [](const Eigen::VectorXd& u) { return u[0] - 2.3; });
        REQUIRE(crossings.size() == 1);
        CHECK(crossings[0][0] == doctest::Approx(2.3).epsilon(1e-12));
    }
}

TEST_CASE("hopeless tolerances end in step_failure, not an infinite loop") {
    ContinuationSystem sys = circle_system();
    ContinuationConfig cfg;
    cfg.tol = 1e-12;
    Eigen::VectorXd seed(2);
    seed << 1.0, 0.0;
    // Converge the seed at a reachable tolerance, then demand an impossible
    // one for the corrector.
    ContinuationConfig strict = cfg;
    strict.tol = 1e-30;   // unreachable except on exactly-representable points
    strict.step_initial = 0.05;
    strict.step_min = 1e-6;
    const Branch b = continue_branch(sys, seed, strict);
    CHECK(b.termination == Termination::step_failure);
    CHECK(b.points.size() < 50);
}

TEST_CASE("a non-converged seed is rejected") {
    ContinuationSystem sys = circle_system();
    ContinuationConfig cfg;
    Eigen::VectorXd bad(2);
    bad << 3.0, 0.0;
    CHECK_THROWS_AS(continue_branch(sys, bad, cfg), std::runtime_error);
}

TEST_CASE("converge_point reaches the circle and respects frozen unknowns") {
    ContinuationSystem sys = circle_system();
    ContinuationConfig cfg;
    cfg.tol = 1e-13;
    Eigen::VectorXd guess(2);
    guess << 0.6, 0.9;
    auto u = converge_point(sys, guess, cfg, 0);
    REQUIRE(u.has_value());
    CHECK((*u)[0] == 0.6);   // frozen
    CHECK(std::abs((*u)[0] * (*u)[0] + (*u)[1] * (*u)[1] - 1.0) < 1e-12);
}
