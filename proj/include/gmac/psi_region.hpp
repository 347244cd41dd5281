#pragma once

// Membership and boundary tracing for the down-set Psi^{-1}(V, eps),
// plus the continuity-shift and rectangle-sandwich diagnostics used to
// validate the tracing near the singular regime.

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "gmac/bvn.hpp"
#include "gmac/channel.hpp"

namespace gmac {

struct Vec2 {
    double z1;
    double z2;
};

/// Exact membership predicate for Psi^{-1}(V, eps):
/// Psi(-z1, -z2; V) >= 1 - eps.
inline bool psi_inv_membership(Vec2 z, const BvnCov& cov, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("psi_inv_membership: eps in (0,1)");
    return psi(-z.z1, -z.z2, cov) >= 1.0 - eps;
}

/// The set Psi^{-1}(V, eps) represented by a traced boundary polyline
/// (vector frame, ordered by z1 ascending) plus its marginal asymptotes.
struct PsiInverseRegion {
    BvnCov cov;
    double eps;
    Vec2 asymptotes;             // (sqrt(v11) PhiInv(eps), sqrt(v22) PhiInv(eps))
    std::vector<Vec2> boundary;  // empty only for rank-0 covariance
    bool rectangle = false;      // singular rank-1 case: boundary is the rectangle corner

    bool contains(Vec2 z) const { return psi_inv_membership(z, cov, eps); }
};

namespace detail {

// Solves Psi(-(a + t d)) = 1 - eps along the ray from anchor a in
// direction d (both components negative), by bracketing and bisection.
inline Vec2 solve_on_ray(const BvnCov& cov, double eps, Vec2 anchor, Vec2 dir, int dir_index) {
    auto residual = [&](double t) {
        return psi(-(anchor.z1 + t * dir.z1), -(anchor.z2 + t * dir.z2), cov) - (1.0 - eps);
    };
    double lo = 0.0, hi = 1.0;
    int grow = 0;
    while (residual(hi) < 0.0) {
        lo = hi;
        hi *= 2.0;
        if (++grow > 120)
            throw std::runtime_error("trace_boundary: no bracket on ray " +
                                     std::to_string(dir_index));
    }
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double r = residual(mid);
        if (r < 0.0)
            lo = mid;
        else
            hi = mid;
        if (std::fabs(r) <= 1e-10) {
            lo = hi = mid;
            break;
        }
    }
    double t = 0.5 * (lo + hi);
    Vec2 z{anchor.z1 + t * dir.z1, anchor.z2 + t * dir.z2};
    if (std::fabs(psi(-z.z1, -z.z2, cov) - (1.0 - eps)) > 1e-9)
        throw std::runtime_error("trace_boundary: bisection residual too large on ray " +
                                 std::to_string(dir_index));
    return z;
}

}  // namespace detail

/// Traces the boundary of Psi^{-1}(V, eps) with `resolution` rays fanned
/// from just outside the asymptote corner into the third quadrant. For a
/// rank-1 covariance the region is the rectangle of Lemma-2 type and the
/// corner is returned directly.
inline PsiInverseRegion trace_boundary(const BvnCov& cov, double eps, int resolution) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("trace_boundary: eps in (0,1)");
    if (resolution < 16) throw std::invalid_argument("trace_boundary: resolution must be >= 16");
    double q = phi_inv(eps);
    double s1 = std::sqrt(cov.v11), s2 = std::sqrt(cov.v22);
    PsiInverseRegion region{cov, eps, {s1 * q, s2 * q}, {}, false};
    if (cov.singular()) {
        // rank-1 reduction: {z1 <= 0} x {z2 <= sqrt(v22) PhiInv(eps)} when v11 ~ 0
        region.rectangle = true;
        if (cov.v11 <= cov.v22) {
            region.asymptotes = {0.0, s2 * q};
            region.boundary.push_back({0.0, s2 * q});
        } else {
            region.asymptotes = {s1 * q, 0.0};
            region.boundary.push_back({s1 * q, 0.0});
        }
        return region;
    }
    double delta = 1e-4 * (s1 + s2);
    Vec2 anchor{region.asymptotes.z1 + delta, region.asymptotes.z2 + delta};
    region.boundary.reserve(static_cast<std::size_t>(resolution) - 1);
    // ray angles u in (0, pi/2); u_j = j/resolution * pi/2 so that doubling
    // the resolution keeps every existing direction
    for (int j = 1; j < resolution; ++j) {
        double u = 0.5 * std::numbers::pi * static_cast<double>(j) / resolution;
        Vec2 dir{-std::cos(u), -std::sin(u)};
        region.boundary.push_back(detail::solve_on_ray(cov, eps, anchor, dir, j));
    }
    return region;
}

/// Smallest uniform shift nu such that
/// Psi^{-1}(V, eps + lambda) is contained in Psi^{-1}(V, eps) + nu * 1,
/// computed over the traced (finite) boundary window.
inline double lemma1_shift_check(const BvnCov& cov, double eps, double lambda,
                                 int resolution = 256) {
    if (!(lambda > 0.0) || !(eps + lambda < 1.0))
        throw std::invalid_argument("lemma1_shift_check: need eps, eps+lambda in (0,1)");
    PsiInverseRegion wide = trace_boundary(cov, eps + lambda, resolution);
    double nu = 0.0;
    for (const Vec2& z : wide.boundary) {
        // minimal per-vertex shift by bisection on Psi along the diagonal
        double lo = 0.0, hi = 1.0;
        auto inside = [&](double v) {
            return psi(-(z.z1 - v), -(z.z2 - v), cov) >= 1.0 - eps;
        };
        if (inside(0.0)) continue;
        while (!inside(hi)) hi *= 2.0;
        for (int it = 0; it < 80; ++it) {
            double mid = 0.5 * (lo + hi);
            (inside(mid) ? hi : lo) = mid;
        }
        nu = std::max(nu, hi);
    }
    return nu;
}

/// Rectangle sandwich around Psi^{-1}(V(rho_n), eps) near rho_n -> 1:
/// inner = [0, sqrt(V12(1)) PhiInv(eps + a_n)]^- - b_n 1 and
/// outer = [0, sqrt(V12(1)) PhiInv(eps)]^- + c_n 1.
struct RectangleSandwich {
    double a_n;
    double b_n;
    double c_n;
    Vec2 inner_corner;
    Vec2 outer_corner;
};

inline RectangleSandwich lemma2_sandwich(const ChannelParams& p, double rho_n, double eps,
                                         int resolution = 128) {
    if (!(rho_n > 0.9 && rho_n <= 1.0))
        throw std::invalid_argument("lemma2_sandwich: rho_n must be in (0.9, 1]");
    DispersionMatrix v = dispersion_matrix(p, CorrelationPoint(rho_n));
    DispersionMatrix v_at_1 = dispersion_matrix(p, CorrelationPoint(1.0));
    double q = phi_inv(eps);
    double s12_1 = std::sqrt(v_at_1.v12);
    double gap = 1.0 - rho_n;
    if (gap == 0.0) {
        Vec2 corner{0.0, s12_1 * q};
        return {0.0, 0.0, 0.0, corner, corner};
    }
    BvnCov cov(v.v1, v.v12, v.v1_12);
    double b_n = std::pow(gap, 0.25);
    // a_n solves Phi((-(s12(1) PhiInv(eps+a) - b_n)) / s12(rho_n)) - Phi(-b_n / s1(rho_n)) = 1 - eps
    double s12_n = std::sqrt(v.v12), s1_n = std::sqrt(v.v1);
    auto expr = [&](double a) {
        return phi(-(s12_1 * phi_inv(eps + a) - b_n) / s12_n) - phi(-b_n / s1_n) - (1.0 - eps);
    };
    // expr decreases in a; expr(0) >= 0 whenever rho_n is close enough to 1
    double lo = 0.0, hi = std::min(0.5 * (1.0 - eps), 0.9999 - eps);
    if (expr(lo) < 0.0)
        throw std::runtime_error("lemma2_sandwich: cannot solve for a_n (rho_n too far from 1)");
    for (int it = 0; it < 100; ++it) {
        double mid = 0.5 * (lo + hi);
        (expr(mid) >= 0.0 ? lo : hi) = mid;
    }
    double a_n = lo;
    double c_prime = s12_n * q - s12_1 * q;
    double c_dprime = std::fabs(s1_n * q);
    double c_n = std::max(std::fabs(c_prime), c_dprime);
    Vec2 inner{-b_n, s12_1 * phi_inv(eps + a_n) - b_n};
    Vec2 outer{c_n, s12_1 * q + c_n};

    // verify the inclusions at traced vertices before reporting
    if (!psi_inv_membership(inner, cov, eps))
        throw std::runtime_error("lemma2_sandwich: inner rectangle corner not contained");
    PsiInverseRegion traced = trace_boundary(cov, eps, resolution);
    for (const Vec2& z : traced.boundary) {
        if (z.z1 > outer.z1 + 1e-9 || z.z2 > outer.z2 + 1e-9)
            throw std::runtime_error("lemma2_sandwich: traced vertex escapes outer rectangle");
    }
    return {a_n, b_n, c_n, inner, outer};
}

}  // namespace gmac
