#pragma once

// Test-side geometry helpers for comparing branches. Kept out of the library:
// they encode the comparison conventions of the test suite, not product
// behaviour.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "nnma/backbone.hpp"

namespace nnma::testing {

inline std::vector<BackbonePoint> sample_points(const Branch& branch, int nnm) {
    std::vector<BackbonePoint> pts;
    pts.reserve(branch.points.size());
    for (size_t i = 0; i < branch.points.size(); ++i)
        pts.push_back(backbone_point(branch, i, nnm));
    return pts;
}

/// Frequency at a given amplitude norm sqrt(U1^2+U2^2), linearly
/// interpolated along the branch; NaN outside the covered range.
inline double frequency_at_amplitude(const std::vector<BackbonePoint>& pts, double a) {
    auto norm = [](const BackbonePoint& p) { return std::hypot(p.U1, p.U2); };
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        const double a0 = norm(pts[i]);
        const double a1 = norm(pts[i + 1]);
        if ((a0 <= a && a <= a1) || (a1 <= a && a <= a0)) {
            if (a0 == a1) return pts[i].omega;
            const double s = (a - a0) / (a1 - a0);
            return pts[i].omega + s * (pts[i + 1].omega - pts[i].omega);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

/// Minimum |f2 - f1| (Hz) over amplitudes covered by both branches.
inline double min_frequency_gap_hz(const std::vector<BackbonePoint>& a,
                                   const std::vector<BackbonePoint>& b, int samples = 400) {
    auto norm = [](const BackbonePoint& p) { return std::hypot(p.U1, p.U2); };
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    for (const auto* pts : {&a, &b}) {
        double mn = std::numeric_limits<double>::infinity(), mx = 0.0;
        for (const auto& p : *pts) {
            mn = std::min(mn, norm(p));
            mx = std::max(mx, norm(p));
        }
        lo = std::max(lo, mn);
        hi = std::min(hi, mx);
    }
    double gap = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= samples; ++k) {
        const double amp = lo + (hi - lo) * k / samples;
        const double fa = frequency_at_amplitude(a, amp);
        const double fb = frequency_at_amplitude(b, amp);
        if (std::isfinite(fa) && std::isfinite(fb))
            gap = std::min(gap, std::abs(fb - fa) / (2.0 * M_PI));
    }
    return gap;
}

struct MatchedDeviation {
    double max_rel = 0.0;
    double max_rel_hz = 0.0;   ///< frequency of the worst grid point
    int grid_compared = 0;
};

/// Max relative amplitude deviation ||dU|| / ||U|| between two branches at
/// matched frequencies on a uniform grid. Grid points where the branches
/// fold differently (unequal match counts, a hair's width around turning
/// points) are skipped; matches are paired in U2 order.
inline MatchedDeviation matched_amplitude_deviation(const Branch& ref, const Branch& other,
                                                    int nnm, double f_lo_hz, double f_hi_hz,
                                                    int grid = 780) {
    MatchedDeviation out;
    for (int k = 0; k <= grid; ++k) {
        const double omega = 2.0 * M_PI * (f_lo_hz + (f_hi_hz - f_lo_hz) * k / grid);
        auto va = amplitudes_at_omega(ref, nnm, omega);
        auto vb = amplitudes_at_omega(other, nnm, omega);
        if (va.empty() || va.size() != vb.size()) continue;
        auto by_u2 = [](const Eigen::Vector2d& x, const Eigen::Vector2d& y) { return x[1] < y[1]; };
        std::sort(va.begin(), va.end(), by_u2);
        std::sort(vb.begin(), vb.end(), by_u2);
        for (size_t i = 0; i < va.size(); ++i) {
            const double rel = (va[i] - vb[i]).norm() / std::max(va[i].norm(), 1e-12);
            if (rel > out.max_rel) {
                out.max_rel = rel;
                out.max_rel_hz = omega / (2.0 * M_PI);
            }
        }
        ++out.grid_compared;
    }
    return out;
}

/// Symmetric Hausdorff distance between polylines in scaled
/// (omega/omega_ref, U1/u_ref, U2/u_ref) space, divided by the diameter of
/// the first polyline. Measured over the common amplitude coverage with a
/// small interior margin so that one branch ending slightly before the other
/// does not register its endpoint overhang as disagreement.
inline double hausdorff_relative(const std::vector<BackbonePoint>& a,
                                 const std::vector<BackbonePoint>& b, double omega_ref,
                                 double u_ref) {
    auto map = [&](const BackbonePoint& p) {
        return Eigen::Vector3d(p.omega / omega_ref, p.U1 / u_ref, p.U2 / u_ref);
    };
    auto norm = [](const BackbonePoint& p) { return std::hypot(p.U1, p.U2); };
    double alo = 0.0, ahi = std::numeric_limits<double>::infinity();
    for (const auto* pts : {&a, &b}) {
        double mn = std::numeric_limits<double>::infinity(), mx = 0.0;
        for (const auto& p : *pts) {
            mn = std::min(mn, norm(p));
            mx = std::max(mx, norm(p));
        }
        alo = std::max(alo, mn);
        ahi = std::min(ahi, mx);
    }
    const double margin = 0.03 * (ahi - alo);
    auto inside = [&](const BackbonePoint& p) {
        return norm(p) >= alo + margin && norm(p) <= ahi - margin;
    };

    auto seg_dist = [](const Eigen::Vector3d& p, const Eigen::Vector3d& s0,
                       const Eigen::Vector3d& s1) {
        const Eigen::Vector3d d = s1 - s0;
        const double len2 = d.squaredNorm();
        double t = len2 > 0 ? (p - s0).dot(d) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        return (p - (s0 + t * d)).norm();
    };
    auto directed = [&](const std::vector<BackbonePoint>& from,
                        const std::vector<BackbonePoint>& to) {
        double worst = 0.0;
        for (const auto& p : from) {
            if (!inside(p)) continue;
            double best = std::numeric_limits<double>::infinity();
            const Eigen::Vector3d pm = map(p);
            for (size_t i = 0; i + 1 < to.size(); ++i)
                best = std::min(best, seg_dist(pm, map(to[i]), map(to[i + 1])));
            worst = std::max(worst, best);
        }
        return worst;
    };
    Eigen::Vector3d mn = map(a[0]), mx = map(a[0]);
    bool any = false;
    for (const auto& p : a) {
        if (!inside(p)) continue;
        mn = any ? mn.cwiseMin(map(p)) : map(p);
        mx = any ? mx.cwiseMax(map(p)) : map(p);
        any = true;
    }
    if (!any) return std::numeric_limits<double>::infinity();
    const double diameter = (mx - mn).norm();
    return std::max(directed(a, b), directed(b, a)) / diameter;
}

}  // namespace nnma::testing
