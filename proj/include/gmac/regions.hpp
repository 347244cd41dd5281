#pragma once

// First-order capacity region, global finite-n inner/outer regions, local
// second-order regions for the three boundary cases, and the angle-of-
// approach geometry of the curved segment.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "gmac/bvn.hpp"
#include "gmac/channel.hpp"
#include "gmac/psi_region.hpp"

namespace gmac {

/// Rate pair in the R-plane; the vector frame is (R1, R1 + R2).
struct RatePoint {
    double r1;
    double r2;

    Vec2 vector_frame() const { return {r1, r1 + r2}; }
    static RatePoint from_vector_frame(Vec2 v) { return {v.z1, v.z2 - v.z1}; }
};

/// Second-order rate pair (nats per sqrt-use); entries may be negative.
struct SecondOrderPair {
    double l1;
    double l2;

    Vec2 vector_frame() const { return {l1, l1 + l2}; }
    static SecondOrderPair from_vector_frame(Vec2 v) { return {v.z1, v.z2 - v.z1}; }
    double norm() const { return std::hypot(l1, l2); }
};

enum class CoordinateFrame { rate_plane, vector_frame };

/// Polyline over rate-plane or vector-frame coordinates.
struct RegionBoundary {
    CoordinateFrame frame;
    std::vector<Vec2> points;
};

enum class BoundaryCase { vertical_i, curved_ii, top_iii };

/// A first-order boundary point together with its Theorem-2 case tag.
struct BoundaryPoint {
    double rho_star;
    RatePoint rates;
    BoundaryCase case_tag;
};

/// Classifies the boundary point parametrized by rho and fills in its rates.
inline BoundaryPoint boundary_point(const ChannelParams& p, double rho) {
    CorrelationPoint c(rho);
    MIVector mi = mi_vector(p, c);
    BoundaryCase tag = rho == 0.0  ? BoundaryCase::vertical_i
                       : rho == 1.0 ? BoundaryCase::top_iii
                                    : BoundaryCase::curved_ii;
    return {rho, RatePoint::from_vector_frame({mi.i1, mi.i12}), tag};
}

/// Upper-right boundary of the capacity region, sampled at `grid` values
/// of rho in [0, 1] plus the vertical segment at rho = 0. R-plane
/// coordinates, ordered by increasing R1.
inline RegionBoundary capacity_boundary(const ChannelParams& p, int grid) {
    if (grid < 2) throw std::invalid_argument("capacity_boundary: grid must be >= 2");
    RegionBoundary out{CoordinateFrame::rate_plane, {}};
    out.points.reserve(static_cast<std::size_t>(grid) + 1);
    for (int i = 0; i < grid; ++i) {
        double rho = 1.0 - static_cast<double>(i) / (grid - 1);  // rho descending => R1 ascending
        MIVector mi = mi_vector(p, CorrelationPoint(rho));
        out.points.push_back({mi.i1, mi.i12 - mi.i1});
    }
    // vertical segment at rho = 0 down to the R1 axis
    out.points.push_back({out.points.back().z1, 0.0});
    return out;
}

/// Global region I(rho) + Psi^{-1}(V(rho), eps)/sqrt(n) + offset * 1 in
/// the vector frame, as a traced boundary.
inline RegionBoundary global_region(const ChannelParams& p, double rho, double n, double eps,
                                    double third_order_offset = 0.0, int resolution = 256) {
    if (!(n >= 1.0)) throw std::invalid_argument("global_region: n must be >= 1");
    CorrelationPoint c(rho);
    MIVector mi = mi_vector(p, c);
    DispersionMatrix v = dispersion_matrix(p, c);
    PsiInverseRegion psi_inv = trace_boundary(BvnCov(v.v1, v.v12, v.v1_12), eps, resolution);
    RegionBoundary out{CoordinateFrame::vector_frame, {}};
    double rn = std::sqrt(n);
    out.points.reserve(psi_inv.boundary.size());
    for (const Vec2& z : psi_inv.boundary)
        out.points.push_back({mi.i1 + z.z1 / rn + third_order_offset,
                              mi.i12 + z.z2 / rn + third_order_offset});
    return out;
}

/// Pareto envelope (in the R-plane) of global regions over a rho grid.
inline RegionBoundary global_region_envelope(const ChannelParams& p,
                                             const std::vector<double>& rho_grid, double n,
                                             double eps, double third_order_offset = 0.0,
                                             int resolution = 128) {
    std::vector<Vec2> pts;
    for (double rho : rho_grid) {
        RegionBoundary b = global_region(p, rho, n, eps, third_order_offset, resolution);
        for (const Vec2& v : b.points) pts.push_back({v.z1, v.z2 - v.z1});  // to R-plane
    }
    std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
        return a.z1 != b.z1 ? a.z1 < b.z1 : a.z2 > b.z2;
    });
    // Pareto filter: keep points not dominated by any other
    std::vector<Vec2> front;
    double best_r2 = -std::numeric_limits<double>::infinity();
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
        if (it->z2 > best_r2) {
            best_r2 = it->z2;
            front.push_back(*it);
        }
    }
    std::reverse(front.begin(), front.end());
    return {CoordinateFrame::rate_plane, std::move(front)};
}

/// Half-plane form of the case-(ii) local region in the (L1, L2) plane:
/// L2 <= a_rho L1 + b_{rho,eps}.
struct HalfPlane {
    double a_rho;
    double b;
    SecondOrderPair tangency;  // boundary point shared with Psi^{-1}
    double theta_star;         // angle of the tangency point, radians in [0, 2pi)

    bool contains(const SecondOrderPair& l) const { return l.l2 <= a_rho * l.l1 + b; }
};

namespace detail {

// Support value of the traced Psi^{-1} boundary in the L-frame along the
// half-plane normal: L2 - a L1 = z2 - (1 + a) z1.
inline double support_value(const Vec2& z, double a) { return z.z2 - (1.0 + a) * z.z1; }

}  // namespace detail

/// Computes a_rho = D2/D1 and the offset b_{rho,eps} as the support-
/// function maximum of the traced Psi^{-1}(V(rho), eps) boundary.
inline HalfPlane half_plane_form(const ChannelParams& p, double rho, double eps,
                                 int resolution = 2048) {
    if (!(rho > 0.0 && rho < 1.0))
        throw std::invalid_argument("half_plane_form: rho must be in (0, 1)");
    CorrelationPoint c(rho);
    DerivativeVector d = derivative_vector(p, c);
    double a = d.d2() / d.d1;
    DispersionMatrix v = dispersion_matrix(p, c);
    BvnCov cov(v.v1, v.v12, v.v1_12);
    PsiInverseRegion region = trace_boundary(cov, eps, resolution);

    std::size_t best = 0;
    double best_val = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < region.boundary.size(); ++i) {
        double val = detail::support_value(region.boundary[i], a);
        if (val > best_val) {
            best_val = val;
            best = i;
        }
    }
    // refine by golden-section on the ray angle around the discrete maximizer
    double q = phi_inv(eps);
    double s1 = std::sqrt(cov.v11), s2 = std::sqrt(cov.v22);
    double delta = 1e-4 * (s1 + s2);
    Vec2 anchor{s1 * q + delta, s2 * q + delta};
    auto value_at_angle = [&](double u) {
        Vec2 dir{-std::cos(u), -std::sin(u)};
        Vec2 z = detail::solve_on_ray(cov, eps, anchor, dir, -1);
        return std::pair<double, Vec2>(detail::support_value(z, a), z);
    };
    // boundary index i corresponds to ray angle (i + 1) * step
    double step = 0.5 * std::numbers::pi / resolution;
    double ulo = std::max(1e-9, best * step);
    double uhi = std::min(0.5 * std::numbers::pi - 1e-9, (best + 2.0) * step);
    constexpr double gr = 0.6180339887498949;
    double u1 = uhi - gr * (uhi - ulo), u2 = ulo + gr * (uhi - ulo);
    auto [f1, z1pt] = value_at_angle(u1);
    auto [f2, z2pt] = value_at_angle(u2);
    for (int it = 0; it < 80; ++it) {
        if (f1 >= f2) {
            uhi = u2;
            u2 = u1;
            f2 = f1;
            z2pt = z1pt;
            u1 = uhi - gr * (uhi - ulo);
            std::tie(f1, z1pt) = value_at_angle(u1);
        } else {
            ulo = u1;
            u1 = u2;
            f1 = f2;
            z1pt = z2pt;
            u2 = ulo + gr * (uhi - ulo);
            std::tie(f2, z2pt) = value_at_angle(u2);
        }
    }
    Vec2 zt = f1 >= f2 ? z1pt : z2pt;
    SecondOrderPair tangency = SecondOrderPair::from_vector_frame(zt);
    double theta = std::atan2(tangency.l2, tangency.l1);
    if (theta < 0.0) theta += 2.0 * std::numbers::pi;
    return {a, std::max(f1, f2), tangency, theta};
}

/// Intersection of the half-plane boundary line with L2 = L1 tan(theta).
/// Throws when the approach is parallel to the boundary line.
inline SecondOrderPair angle_intersection(const HalfPlane& hp, double theta) {
    double t = std::tan(theta);
    double denom = t - hp.a_rho;
    if (std::fabs(denom) < 1e-12)
        throw std::runtime_error("angle_intersection: approach parallel to boundary line");
    double l1 = hp.b / denom;
    return {l1, l1 * t};
}

/// One row of the angle-of-approach sweep.
struct SweepRow {
    double theta;
    double l1;
    double l2;
    double norm;
};

struct SweepResult {
    HalfPlane hp;
    double critical_low;   // pi + arctan(a_rho)
    double critical_high;  // 2 pi + arctan(a_rho)
    std::vector<SweepRow> rows;
};

/// Sweeps theta over [0, 2pi), skipping the two critical angles where the
/// norm diverges.
inline SweepResult angle_sweep(const ChannelParams& p, double rho, double eps, int grid,
                               int resolution = 2048) {
    if (grid < 8) throw std::invalid_argument("angle_sweep: grid must be >= 8");
    HalfPlane hp = half_plane_form(p, rho, eps, resolution);
    double at = std::atan(hp.a_rho);  // in (-pi/2, 0)
    SweepResult out{hp, std::numbers::pi + at, 2.0 * std::numbers::pi + at, {}};
    out.rows.reserve(static_cast<std::size_t>(grid));
    for (int i = 0; i < grid; ++i) {
        double theta = 2.0 * std::numbers::pi * i / grid;
        double t = std::tan(theta);
        double denom = t - hp.a_rho;
        if (std::fabs(denom) < 1e-12) continue;
        double l1 = hp.b / denom;
        double l2 = l1 * t;
        out.rows.push_back({theta, l1, l2, std::hypot(l1, l2)});
    }
    return out;
}

/// Local second-order region for the three Theorem-2 cases, exposed as a
/// membership predicate plus case-specific descriptors.
struct LocalRegion {
    BoundaryCase case_tag;
    // case (i): L1 <= threshold, L2 free
    double case_i_threshold = 0.0;
    // case (ii): half-plane data
    std::optional<HalfPlane> half_plane;
    // case (iii): rectangle corner (vector frame) and cone direction D(1)
    Vec2 rect_corner{0.0, 0.0};
    DerivativeVector cone_dir{0.0, 0.0};

    bool contains(const SecondOrderPair& l) const {
        switch (case_tag) {
            case BoundaryCase::vertical_i:
                return l.l1 <= case_i_threshold;
            case BoundaryCase::curved_ii:
                return half_plane->contains(l);
            case BoundaryCase::top_iii: {
                // exists beta <= 0 with v - beta D(1) in the rectangle corner's down-set
                Vec2 v = l.vector_frame();
                double beta_hi = std::min(0.0, v.z1 / cone_dir.d1);  // v1 <= beta d1, d1 < 0
                double beta_lo = (v.z2 - rect_corner.z2) / cone_dir.d12;
                return beta_lo <= beta_hi;
            }
        }
        return false;
    }
};

inline LocalRegion local_region_case(const BoundaryPoint& bp, const ChannelParams& p,
                                     double eps, int resolution = 2048) {
    LocalRegion out;
    out.case_tag = bp.case_tag;
    switch (bp.case_tag) {
        case BoundaryCase::vertical_i: {
            DispersionMatrix v = dispersion_matrix(p, CorrelationPoint(0.0));
            out.case_i_threshold = std::sqrt(v.v1) * phi_inv(eps);
            break;
        }
        case BoundaryCase::curved_ii:
            out.half_plane = half_plane_form(p, bp.rho_star, eps, resolution);
            break;
        case BoundaryCase::top_iii: {
            DispersionMatrix v = dispersion_matrix(p, CorrelationPoint(1.0));
            out.rect_corner = {0.0, std::sqrt(v.v12) * phi_inv(eps)};
            out.cone_dir = derivative_vector(p, CorrelationPoint(1.0));
            break;
        }
    }
    return out;
}

/// Single-user normal approximation n C(S) + sqrt(n V(S)) PhiInv(eps),
/// with the third-order term exposed as a caller offset.
inline double single_user_expansion(double snr, double n, double eps, double offset = 0.0) {
    if (!(n >= 1.0)) throw std::invalid_argument("single_user_expansion: n must be >= 1");
    return n * gaussian_capacity(snr) + std::sqrt(n * gaussian_dispersion(snr)) * phi_inv(eps) +
           offset;
}

}  // namespace gmac
