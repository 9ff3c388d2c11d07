#include "nnma/appropriation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace nnma {

double damping_energy(const ModalModel& model, double U_i, double omega, int i) {
    return 2.0 * model.zeta[i] * model.omega_n[i] * omega * M_PI * U_i * U_i;
}

double forcing_energy(const ModeShapeMatrix& shapes, const ExcitationLayout& layout,
                      double U_i, double phi_i, int i) {
    const Eigen::Vector2d p = modal_force_vector(shapes, layout);
    return M_PI * p[i] * U_i * std::sin(phi_i);
}

std::string to_string(PhaseErrorStatus s) {
    switch (s) {
        case PhaseErrorStatus::ok: return "ok";
        case PhaseErrorStatus::no_real_solution: return "no-real-solution";
        case PhaseErrorStatus::no_coupling: return "no-coupling";
        case PhaseErrorStatus::singular_appropriation: return "singular-appropriation";
    }
    return "?";
}

AppropriationResult two_force_appropriation(const ModeShapeMatrix& shapes, int loc_a, int loc_b,
                                            const ModalModel& model, const BackbonePoint& target,
                                            double cond_limit) {
    Eigen::Matrix2d A;
    A.col(0) = shapes.row(loc_a);
    A.col(1) = shapes.row(loc_b);

    Eigen::JacobiSVD<Eigen::Matrix2d> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double smin = svd.singularValues()[1];
    if (smin <= 0.0 || svd.singularValues()[0] / smin > cond_limit)
        throw std::runtime_error("two_force_appropriation: near-parallel modal force vectors");

    Eigen::Vector2d P;
    P[0] = 2.0 * model.zeta[0] * model.omega_n[0] * target.omega * target.U1;
    P[1] = 2.0 * target.p * model.zeta[1] * model.omega_n[1] * target.omega * target.U2;
    const Eigen::Vector2d F = svd.solve(P);

    AppropriationResult res;
    res.location_indices = {loc_a, loc_b};
    res.forces = {F[0], F[1]};
    res.modal_forces = P;
    res.phase_error = {PhaseErrorStatus::ok, 0.0};
    res.target = target;
    return res;
}

double single_force_amplitude(const ModeShapeMatrix& shapes, int loc, const ModalModel& model,
                              const BackbonePoint& target, double eps_den) {
    const Eigen::Vector2d row = shapes.row(loc);
    const double den = row[0] * target.U1 + target.p * row[1] * target.U2;
    const double den_scale = std::max(std::abs(row[0]) * target.U1, std::abs(row[1]) * target.U2);
    if (std::abs(den) <= eps_den * std::max(den_scale, 1e-300))
        throw std::runtime_error("single_force_amplitude: singular appropriation denominator");
    const double num = 2.0 * target.omega *
                       (model.zeta[0] * model.omega_n[0] * target.U1 * target.U1 +
                        model.zeta[1] * model.omega_n[1] * target.U2 * target.U2);
    return num / den;
}

namespace {

// Coupling bracket common to both per-mode transfer equations:
// B(phi) = 3 g2 U1^2 + 2 g3 U1 U2 cos(phi) + 3 g4 U2^2.
double coupling_bracket(const ModalModel& m, const BackbonePoint& t, double phi) {
    return 3.0 * m.gamma[1] * t.U1 * t.U1 + 2.0 * m.gamma[2] * t.U1 * t.U2 * std::cos(phi) +
           3.0 * m.gamma[3] * t.U2 * t.U2;
}

}  // namespace

PhaseEstimate phase_error(const ModalModel& model, const ModeShapeMatrix& shapes, int loc,
                          const BackbonePoint& target, double F1, int mode) {
    const Eigen::Vector2d row = shapes.row(loc);

    // Numerator of sin(phase error) and the amplitude multiplying the
    // coupling bracket, from the zero-net-transfer condition of the chosen
    // mode (sin(phi1) = +1, sin(phi2) = p conventions).
    double num, amp;
    if (mode == 0) {
        num = 4.0 * (row[0] * F1 -
                     2.0 * model.zeta[0] * model.omega_n[0] * target.U1 * target.omega);
        amp = target.U2;
    } else {
        num = 4.0 * (2.0 * model.zeta[1] * model.omega_n[1] * target.U2 * target.omega -
                     target.p * row[1] * F1);
        amp = target.U1;
    }
    if (amp == 0.0) return {PhaseErrorStatus::no_coupling, 0.0};

    // Damped fixed point on sin(phi) = num / (amp * B(phi)), starting at 0.
    double phi = 0.0;
    bool converged = false;
    for (int it = 0; it < 200; ++it) {
        const double denom = amp * coupling_bracket(model, target, phi);
        if (denom == 0.0) return {PhaseErrorStatus::no_coupling, 0.0};
        const double s = num / denom;
        if (std::abs(s) > 1.0) break;
        const double next = 0.5 * phi + 0.5 * std::asin(s);
        if (std::abs(next - phi) < 1e-14) {
            phi = next;
            converged = true;
            break;
        }
        phi = next;
    }
    if (converged) return {PhaseErrorStatus::ok, phi};

    // Fallback: bisection on g(phi) = sin(phi) amp B(phi) - num over
    // (-pi/2, pi/2); no sign change there means the error exceeds pi/2.
    auto g = [&](double x) { return std::sin(x) * amp * coupling_bracket(model, target, x) - num; };
    const int nscan = 256;
    double a = -M_PI / 2.0 + 1e-12;
    double ga = g(a);
    for (int k = 1; k <= nscan; ++k) {
        const double b = -M_PI / 2.0 + M_PI * k / nscan - ((k == nscan) ? 1e-12 : 0.0);
        const double gb = g(b);
        if ((ga < 0.0 && gb >= 0.0) || (ga > 0.0 && gb <= 0.0)) {
            double lo = a, hi = b;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                if ((g(lo) <= 0.0) == (g(mid) <= 0.0))
                    lo = mid;
                else
                    hi = mid;
            }
            return {PhaseErrorStatus::ok, 0.5 * (lo + hi)};
        }
        a = b;
        ga = gb;
    }
    return {PhaseErrorStatus::no_real_solution, 0.0};
}

std::vector<PhaseMapEntry> phase_error_map(const ModalModel& model, const ModeShapeMatrix& shapes,
                                           const BackbonePoint& target, int threads) {
    const int n = static_cast<int>(shapes.phi.rows());
    std::vector<PhaseMapEntry> map(n);

    if (threads <= 0) {
        threads = 1;
        if (const char* env = std::getenv("NNM_APPROP_THREADS")) {
            const int v = std::atoi(env);
            if (v > 0) threads = v;
        }
    }
    threads = std::min(threads, n);

    auto work = [&](int begin, int end) {
        for (int j = begin; j < end; ++j) {
            PhaseMapEntry& e = map[j];
            e.location = j;
            try {
                e.F1 = single_force_amplitude(shapes, j, model, target);
            } catch (const std::runtime_error&) {
                e.phase = {PhaseErrorStatus::singular_appropriation, 0.0};
                e.saturated = true;
                continue;
            }
            e.phase = phase_error(model, shapes, j, target, e.F1);
            e.saturated = e.phase.status != PhaseErrorStatus::ok ||
                          std::abs(e.phase.value) > kPhaseSaturation;
        }
    };

    if (threads <= 1) {
        work(0, n);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (n + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const int b = t * chunk;
            const int e = std::min(n, b + chunk);
            if (b < e) pool.emplace_back(work, b, e);
        }
        for (auto& th : pool) th.join();
    }
    return map;
}

}  // namespace nnma
