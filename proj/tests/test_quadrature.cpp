#include <doctest.h>

#include <cmath>

#include "branch_metrics.hpp"
#include "nnma/appropriation.hpp"
#include "nnma/quadrature.hpp"
#include "nnma/time_domain.hpp"

using namespace nnma;

namespace {

QuadratureConfig fast_config() {
    QuadratureConfig cfg;
    cfg.omega_min = 2 * M_PI * 15.8;
    cfg.omega_max = 2 * M_PI * 17.2;
    cfg.max_points = 2500;
    return cfg;
}

}  // namespace

TEST_CASE("forced response of the linear model matches the closed form") {
    ModalModel m = crossbeam_table1();
    m.alpha.setZero();
    m.gamma.setZero();
    const ModeShapeMatrix shapes = synthetic_shapes();
    const int loc = shapes.index_of("main_quarter");
    ExcitationLayout layout{{loc}, {0.05}, 100.0};

    QuadratureConfig cfg = fast_config();
    cfg.continuation.step_max = 0.01;
    const Branch frf = forced_response(m, shapes, layout, cfg);
    REQUIRE(frf.points.size() > 50);
    CHECK(frf.termination == Termination::parameter_bound);

    const Eigen::Vector2d P = modal_force_vector(shapes, layout);
    const HbLayout lay{cfg.harmonics};
    for (const auto& pt : frf.points) {
        const double W = pt.unknowns[lay.n_coeffs()];
        for (int i = 0; i < 2; ++i) {
            const double k = m.omega_n[i] * m.omega_n[i] - W * W;
            const double c = 2 * m.zeta[i] * m.omega_n[i] * W;
            const double d = k * k + c * c;
            CHECK(pt.unknowns[lay.cos(i, 1)] == doctest::Approx(P[i] * k / d).epsilon(1e-8));
            CHECK(pt.unknowns[lay.sin(i, 1)] == doctest::Approx(P[i] * c / d).epsilon(1e-8));
        }
    }
}

TEST_CASE("small-force resonance peak sits at the linear frequency") {
    const ModalModel m = crossbeam_table1();
    const ModeShapeMatrix shapes = synthetic_shapes();
    const int loc = shapes.index_of("main_mid");
    ExcitationLayout layout{{loc}, {1e-4}, 100.0};

    QuadratureConfig cfg = fast_config();
    cfg.omega_min = 2 * M_PI * 16.0;
    cfg.omega_max = 2 * M_PI * 16.4;
    cfg.continuation.step_max = 4e-4;
    const Branch frf = forced_response(m, shapes, layout, cfg);
    REQUIRE(frf.points.size() > 50);

    std::vector<double> f, amp;
    for (size_t i = 0; i < frf.points.size(); ++i) {
        const HarmonicSolution sol = unpack_hb_unknowns(frf.points[i].unknowns, cfg.harmonics);
        f.push_back(sol.omega / (2 * M_PI));
        amp.push_back(amplitude_phase(sol).U1);
    }
    size_t k = std::max_element(amp.begin(), amp.end()) - amp.begin();
    REQUIRE(k > 0);
    REQUIRE(k + 1 < amp.size());
    // Parabolic fit through the three points around the maximum.
    const double denom = (amp[k - 1] - 2 * amp[k] + amp[k + 1]);
    const double shift = 0.5 * (amp[k - 1] - amp[k + 1]) / denom;
    const double peak_f = f[k] + shift * 0.5 * (f[k + 1] - f[k - 1]);
    CHECK(std::abs(peak_f - 16.172) < 0.01);
}

TEST_CASE("single-force quadrature locus: linear start and colocated constraint") {
    const ModalModel m = crossbeam_table1();
    const ModeShapeMatrix shapes = synthetic_shapes();
    const int loc = shapes.index_of("main_mid");

    QuadratureConfig cfg = fast_config();
    cfg.seed_force = 1e-5;
    const Branch locus =
        quadrature_locus(m, shapes, {QuadratureConstraint{loc, +1}}, 1, cfg);
    REQUIRE(locus.points.size() > 30);

    // The branch leaves from the linear phase resonance at vanishing force.
    const HarmonicSolution first = unpack_hb_unknowns(locus.points[0].unknowns, cfg.harmonics);
    CHECK(std::abs(first.omega - m.omega_n[0]) < 0.05);
    CHECK(std::abs(first.forcing.amplitudes[0]) == doctest::Approx(1e-5).epsilon(1e-6));

    const HbLayout lay{cfg.harmonics};
    for (const auto& pt : locus.points) {
        const HarmonicSolution sol = unpack_hb_unknowns(pt.unknowns, cfg.harmonics);
        // Quadrature at the driven point, to corrector tolerance.
        const Eigen::Vector2d f = colocated_fundamental(sol, shapes, loc);
        CHECK(std::abs(f[0]) < 1e-7);
        CHECK(f[1] > 0.0);   // +pi/2 convention

        // Global balance: dissipated equals injected, per period.
        const Eigen::Vector2d P = sol.forcing.amplitudes[0] * shapes.row(loc);
        const EnergyBudget e = hb_energies(m, P, sol, 2048);
        const double din = e.E_D1 + e.E_D2;
        const double pin = e.E_P1 + e.E_P2;
        if (din > 1e-12) CHECK(std::abs(din - pin) / din < 1e-6);
    }
}

TEST_CASE("single-force locus hugs the first backbone at low amplitude then departs") {
    const ModalModel m = crossbeam_table1();
    const ModeShapeMatrix shapes = synthetic_shapes();
    const int loc = shapes.index_of("main_mid");

    BackboneConfig bb;
    const Branch backbone = solve_numeric_backbone(m, 1, bb);

    QuadratureConfig cfg = fast_config();
    cfg.omega_max = 2 * M_PI * 18.0;
    const Branch locus = quadrature_locus(m, shapes, {QuadratureConstraint{loc, +1}}, 1, cfg);
    REQUIRE(locus.points.size() > 50);

    // Deviation from the backbone at matched frequency, per point.
    double low_amp_worst = 0.0;
    double worst = 0.0;
    double last = 0.0;
    for (size_t i = 0; i < locus.points.size(); ++i) {
        const BackbonePoint p = backbone_point(locus, i, 1);
        const auto matches = amplitudes_at_omega(backbone, 1, p.omega);
        if (matches.empty()) continue;
        double rel = std::numeric_limits<double>::infinity();
        for (const auto& uv : matches)
            rel = std::min(rel, std::hypot(p.U1 - uv[0], p.U2 - uv[1]) /
                                    std::max(std::hypot(uv[0], uv[1]), 1e-12));
        if (p.U1 < 2e-3) low_amp_worst = std::max(low_amp_worst, rel);
        worst = std::max(worst, rel);
        last = rel;
    }
    CHECK(low_amp_worst < 0.01);
    // A bending-only excitation cannot hold the NNM through the veering
    // region, where torsion takes over...
    CHECK(worst > 0.1);
    // ...but the strong coupling pulls the curve back toward the NNM at high
    // amplitude.
    CHECK(last < 0.5 * worst);
}

TEST_CASE("FRF quadrature crossing lies on the quadrature locus") {
    const ModalModel m = crossbeam_table1();
    const ModeShapeMatrix shapes = synthetic_shapes();
    const int loc = shapes.index_of("main_mid");
    const double F = 0.35;

    QuadratureConfig cfg = fast_config();
    cfg.omega_max = 2 * M_PI * 16.9;
    ExcitationLayout layout{{loc}, {F}, 100.0};
    const Branch frf = forced_response(m, shapes, layout, cfg);
    REQUIRE(frf.points.size() > 50);

    const HbLayout lay{cfg.harmonics};
    const auto crossings = detect_sign_change(frf, [&](const Eigen::VectorXd& u) {
        return shapes.phi(loc, 0) * u[lay.cos(0, 1)] + shapes.phi(loc, 1) * u[lay.cos(1, 1)];
    });
    REQUIRE(!crossings.empty());

    const Branch locus = quadrature_locus(m, shapes, {QuadratureConstraint{loc, +1}}, 1, cfg);
    REQUIRE(locus.points.size() > 30);

    // The crossing (Omega, U1, U2, |F|) must sit on the locus polyline.
    const HarmonicSolution cs = unpack_hb_unknowns(crossings[0], cfg.harmonics);
    const AmplitudePhase cap = amplitude_phase(cs);
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i + 1 < locus.points.size(); ++i) {
        const HarmonicSolution a = unpack_hb_unknowns(locus.points[i].unknowns, cfg.harmonics);
        const HarmonicSolution b = unpack_hb_unknowns(locus.points[i + 1].unknowns, cfg.harmonics);
        const double fa = std::abs(a.forcing.amplitudes[0]);
        const double fb = std::abs(b.forcing.amplitudes[0]);
        if ((fa - F) * (fb - F) > 0.0) continue;
        const double s = (fa == fb) ? 0.0 : (F - fa) / (fb - fa);
        const AmplitudePhase aa = amplitude_phase(a);
        const AmplitudePhase ab = amplitude_phase(b);
        const double w = a.omega + s * (b.omega - a.omega);
        const double u1 = aa.U1 + s * (ab.U1 - aa.U1);
        const double u2 = aa.U2 + s * (ab.U2 - aa.U2);
        best = std::min(best, std::abs(w - cs.omega) / cs.omega +
                                  std::hypot(u1 - cap.U1, u2 - cap.U2) /
                                      std::hypot(cap.U1, cap.U2));
    }
    CHECK(best < 1e-3);
}

TEST_CASE("two-force locus overlays both backbones") {
    const ModalModel m = crossbeam_table1();
    const ModeShapeMatrix shapes = synthetic_shapes();
    const std::vector<QuadratureConstraint> constraints = {
        {shapes.index_of("cross_a"), +1}, {shapes.index_of("cross_b"), +1}};

    BackboneConfig bb;
    bb.omega_max = 2 * M_PI * 17.2;
    QuadratureConfig cfg = fast_config();

    for (int nnm : {1, 2}) {
        const Branch backbone = solve_numeric_backbone(m, nnm, bb);
        const Branch locus = quadrature_locus(m, shapes, constraints, nnm, cfg);
        REQUIRE(locus.points.size() > 30);
        const auto bpts = testing::sample_points(backbone, nnm);
        auto lpts = testing::sample_points(locus, nnm);
        // Compare over the common amplitude coverage.
        const double amax =
            std::min(std::hypot(bpts.back().U1, bpts.back().U2),
                     std::hypot(lpts.back().U1, lpts.back().U2));
        auto trim = [amax](std::vector<BackbonePoint> v) {
            std::vector<BackbonePoint> out;
            for (const auto& p : v)
                if (std::hypot(p.U1, p.U2) <= amax) out.push_back(p);
            return out;
        };
        const double hd = testing::hausdorff_relative(trim(bpts), trim(lpts), m.omega_n[0], 1e-3);
        CHECK(hd < 5e-3);
    }
}

TEST_CASE("continuation-recovered forces match the energy-balance prediction") {
    const ModalModel m = crossbeam_table1();
    const ModeShapeMatrix shapes = synthetic_shapes();
    const int la = shapes.index_of("cross_a");
    const int lb = shapes.index_of("cross_b");

    QuadratureConfig cfg = fast_config();
    const Branch locus =
        quadrature_locus(m, shapes, {{la, +1}, {lb, +1}}, 1, cfg);
    REQUIRE(locus.points.size() > 40);

    const HbLayout lay{cfg.harmonics};
    int compared = 0;
    for (size_t i = 5; i < locus.points.size(); i += 10) {
        const HarmonicSolution sol = unpack_hb_unknowns(locus.points[i].unknowns, cfg.harmonics);
        const AmplitudePhase ap = amplitude_phase(sol);
        if (ap.U1 < 5e-4) continue;
        const BackbonePoint target{sol.omega, ap.U1, ap.U2, -1};
        const AppropriationResult pred = two_force_appropriation(shapes, la, lb, m, target);
        const double Fa = sol.forcing.amplitudes[0];
        const double Fb = sol.forcing.amplitudes[1];
        const double scale = std::max(std::abs(Fa), std::abs(Fb));
        CHECK(std::abs(pred.forces[0] - Fa) / scale < 0.02);
        CHECK(std::abs(pred.forces[1] - Fb) / scale < 0.02);
        ++compared;
    }
    CHECK(compared > 10);
}

TEST_CASE("one of the two appropriating forces changes sign along the first NNM") {
    const ModalModel m = crossbeam_table1();
    const ModeShapeMatrix shapes = synthetic_shapes();
    const int la = shapes.index_of("main_mid");
    const int lb = shapes.index_of("cross_b");

    QuadratureConfig cfg = fast_config();
    const Branch locus = quadrature_locus(m, shapes, {{la, +1}, {lb, +1}}, 1, cfg);
    REQUIRE(locus.points.size() > 40);

    const HbLayout lay{cfg.harmonics};
    const int fa_index = lay.n_coeffs() + 1;
    const auto crossings = detect_sign_change(
        locus, [fa_index](const Eigen::VectorXd& u) { return u[fa_index]; });
    REQUIRE(!crossings.empty());
    const double f_cross = crossings[0][lay.n_coeffs()] / (2 * M_PI);
    MESSAGE("main-beam force sign change at ", f_cross, " Hz");
    // Regression pin (depends only on the synthetic shape table geometry).
    CHECK(f_cross == doctest::Approx(16.9185).epsilon(2e-3));
    // At the crossing the other force alone appropriates the motion.
    CHECK(std::abs(crossings[0][fa_index]) < 1e-8);
}

TEST_CASE("isolated-branch seeding from a backbone point") {
    const ModalModel m = crossbeam_table1();
    BackboneConfig bb;
    bb.omega_max = 2 * M_PI * 17.2;
    const Branch backbone = solve_numeric_backbone(m, 1, bb);
    REQUIRE(backbone.points.size() > 100);

    // A location built to appropriate this exact backbone point: its shape
    // row is parallel to the required modal force, so the phase error is
    // exactly zero.
    const size_t pick = backbone.points.size() - 10;
    const HarmonicSolution bsol = unpack_hb_unknowns(backbone.points[pick].unknowns, bb.harmonics);
    const AmplitudePhase ap = amplitude_phase(bsol);
    const BackbonePoint target{bsol.omega, ap.U1, ap.U2, -1};

    Eigen::Vector2d P;
    P[0] = 2 * m.zeta[0] * m.omega_n[0] * target.omega * target.U1;
    P[1] = 2 * target.p * m.zeta[1] * m.omega_n[1] * target.omega * target.U2;

    ModeShapeMatrix shapes = synthetic_shapes();
    const int tuned = static_cast<int>(shapes.locations.size());
    shapes.locations.push_back("tuned");
    shapes.phi.conservativeResize(tuned + 1, 2);
    shapes.phi.row(tuned) = (P / P.norm()).transpose();

    QuadratureConfig cfg = fast_config();

    SUBCASE("a consistent seed converges in a few corrector iterations") {
        CHECK(std::abs(phase_error(m, shapes, tuned, target,
                                   single_force_amplitude(shapes, tuned, m, target))
                           .value) < 1e-12);
        const Eigen::VectorXd guess = seed_isolated_quadrature(m, shapes, tuned, bsol);
        int iterations = -1;
        const auto refined = refine_quadrature_seed(m, shapes, {{tuned, +1}}, guess, cfg, &iterations);
        REQUIRE(refined.has_value());
        CHECK(iterations <= 3);

        // The refined point reproduces the target.
        const HarmonicSolution rsol = unpack_hb_unknowns(*refined, cfg.harmonics);
        const AmplitudePhase rap = amplitude_phase(rsol);
        CHECK(rap.U1 == doctest::Approx(target.U1).epsilon(5e-3));
        CHECK(rap.U2 == doctest::Approx(target.U2).epsilon(5e-3));

        // And continuation from it walks an isolated branch in both
        // directions.
        const Branch iso = continue_quadrature_from(m, shapes, {{tuned, +1}}, *refined, cfg);
        CHECK(iso.points.size() > 20);
    }

    SUBCASE("an out-of-reach location fails or lands far away") {
        // A row nearly orthogonal to (U1, -U2) makes the required force huge
        // and the transfer balance unsatisfiable by any real phase.
        const int bad = tuned + 1;
        shapes.locations.push_back("near_singular");
        shapes.phi.conservativeResize(bad + 1, 2);
        Eigen::Vector2d row(target.U2, 0.97 * target.U1);
        shapes.phi.row(bad) = (row / row.norm()).transpose();

        const double F1 = single_force_amplitude(shapes, bad, m, target);
        CHECK(phase_error(m, shapes, bad, target, F1).status ==
              PhaseErrorStatus::no_real_solution);
        const Eigen::VectorXd guess = seed_isolated_quadrature(m, shapes, bad, bsol);
        const auto refined = refine_quadrature_seed(m, shapes, {{bad, +1}}, guess, cfg);
        if (refined) {
            const HarmonicSolution rsol = unpack_hb_unknowns(*refined, cfg.harmonics);
            const AmplitudePhase rap = amplitude_phase(rsol);
            const double rel = std::hypot(rap.U1 - target.U1, rap.U2 - target.U2) /
                               std::hypot(target.U1, target.U2);
            CHECK(rel > 0.05);
        }
    }
}

TEST_CASE("phase profile conventions") {
    const ModalModel m = crossbeam_table1();
    const ModeShapeMatrix shapes = synthetic_shapes();

    SUBCASE("exactly appropriated response is in quadrature everywhere") {
        HarmonicSolution sol;
        sol.n_harmonics = 3;
        sol.resize_zero();
        sol.omega = 105.0;
        const HbLayout lay = sol.layout();
        sol.coeffs[lay.sin(0, 1)] = 2e-3;
        sol.coeffs[lay.sin(1, 1)] = -1e-3;   // anti-phase, both pure sine
        const auto phases = phase_profile(sol, shapes, {0, 1, 2, 3, 4, 5});
        for (double p : phases) CHECK(std::abs(std::abs(p) - M_PI / 2) < 1e-12);
    }

    SUBCASE("pure modal force on the linear model: quadrature at resonance") {
        ModalModel lin = crossbeam_table1();
        lin.alpha.setZero();
        lin.gamma.setZero();
        ModeShapeMatrix mode1;
        mode1.locations = {"m1"};
        mode1.phi.resize(1, 2);
        mode1.phi << 1.0, 0.0;

        QuadratureConfig cfg = fast_config();
        cfg.seed_force = 1e-3;
        const Branch locus = quadrature_locus(lin, mode1, {{0, +1}}, 1, cfg);
        REQUIRE(!locus.points.empty());
        const HarmonicSolution sol = unpack_hb_unknowns(locus.points[0].unknowns, cfg.harmonics);
        CHECK(sol.omega == doctest::Approx(lin.omega_n[0]).epsilon(1e-10));
        const auto phases = phase_profile(sol, mode1, {0});
        CHECK(std::abs(phases[0] - M_PI / 2) < 1e-9);
    }

    SUBCASE("profile equals reconstruction from the modal fundamentals") {
        HarmonicSolution sol;
        sol.n_harmonics = 2;
        sol.resize_zero();
        sol.omega = 103.0;
        const HbLayout lay = sol.layout();
        sol.coeffs[lay.cos(0, 1)] = 1.1e-3;
        sol.coeffs[lay.sin(0, 1)] = 2.7e-3;
        sol.coeffs[lay.cos(1, 1)] = -0.4e-3;
        sol.coeffs[lay.sin(1, 1)] = 0.9e-3;
        const auto phases = phase_profile(sol, shapes, {0, 2, 5});
        const std::vector<int> locs = {0, 2, 5};
        for (size_t k = 0; k < locs.size(); ++k) {
            const Eigen::Vector2d row = shapes.row(locs[k]);
            const double ax = row[0] * sol.coeffs[lay.cos(0, 1)] + row[1] * sol.coeffs[lay.cos(1, 1)];
            const double bx = row[0] * sol.coeffs[lay.sin(0, 1)] + row[1] * sol.coeffs[lay.sin(1, 1)];
            CHECK(phases[k] == doctest::Approx(std::atan2(bx, ax)));
        }
    }
}
