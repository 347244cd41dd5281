#pragma once

// Univariate and bivariate Gaussian distribution machinery: Phi, its
// inverse, and the orthant probability Psi(z1, z2; V) including the
// singular-covariance regime.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gmac {

/// Standard normal CDF.
inline double phi(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// Standard normal pdf.
inline double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

namespace detail {

// Acklam's rational approximation to the normal quantile, |error| < 1.2e-9
// before refinement.
inline double phi_inv_approx(double e) {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double plow = 0.02425;
    if (e < plow) {
        double q = std::sqrt(-2.0 * std::log(e));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (e > 1.0 - plow) {
        double q = std::sqrt(-2.0 * std::log(1.0 - e));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double q = e - 0.5, r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace detail

/// Inverse standard normal CDF, refined by Newton steps to ~1e-13.
inline double phi_inv(double e) {
    if (!(e > 0.0 && e < 1.0)) throw std::invalid_argument("phi_inv: e must be in (0, 1)");
    double z = detail::phi_inv_approx(e);
    for (int it = 0; it < 2; ++it) {
        double err = phi(z) - e;
        double pdf = normal_pdf(z);
        if (pdf <= 0.0) break;
        z -= err / pdf;
    }
    return z;
}

/// Covariance of a bivariate Gaussian, with rank detection.
struct BvnCov {
    double v11;
    double v22;
    double v12;

    BvnCov(double v11_, double v22_, double v12_) : v11(v11_), v22(v22_), v12(v12_) {
        if (v11 < 0.0 || v22 < 0.0 || v12 * v12 > v11 * v22 * (1.0 + 1e-12) + 1e-300)
            throw std::invalid_argument("BvnCov: matrix must be positive semi-definite");
    }

    /// Correlation coefficient; only meaningful when both variances > 0.
    double correlation() const {
        double d = std::sqrt(v11 * v22);
        if (d <= 0.0) return 0.0;
        return std::clamp(v12 / d, -1.0, 1.0);
    }

    double min_eigenvalue() const {
        double tr = v11 + v22;
        double det = v11 * v22 - v12 * v12;
        double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
        return 0.5 * (tr - disc);
    }

    /// True when the matrix is numerically rank-deficient.
    bool singular() const {
        double scale = std::max(v11, v22);
        return min_eigenvalue() < 1e-12 * scale || scale == 0.0;
    }
};

namespace detail {

// Gauss-Legendre nodes/weights on [-1, 1], positive-half only.
inline constexpr double gl_x6[3] = {-0.9324695142031521, -0.6612093864662645,
                                    -0.2386191860831969};
inline constexpr double gl_w6[3] = {0.1713244923791704, 0.3607615730481386, 0.4679139345726910};
inline constexpr double gl_x12[6] = {-0.9815606342467192, -0.9041172563704749,
                                     -0.7699026741943047, -0.5873179542866175,
                                     -0.3678314989981802, -0.1252334085114689};
inline constexpr double gl_w12[6] = {0.04717533638651183, 0.1069393259953184, 0.1600783285433462,
                                     0.2031674267230659,  0.2334925365383548, 0.2491470458134028};
inline constexpr double gl_x20[10] = {-0.9931285991850949,  -0.9639719272779138,
                                      -0.9122344282513259,  -0.8391169718222188,
                                      -0.7463319064601508,  -0.6360536807265150,
                                      -0.5108670019508271,  -0.3737060887154195,
                                      -0.2277858511416451,  -0.07652652113349734};
inline constexpr double gl_w20[10] = {0.01761400713915212, 0.04060142980038694,
                                      0.06267204833410907, 0.08327674157670475,
                                      0.1019301198172404,  0.1181945319615184,
                                      0.1316886384491766,  0.1420961093183820,
                                      0.1491729864726037,  0.1527533871307258};

// Standardized upper-orthant probability Pr(X > h, Y > k) for a bivariate
// normal with correlation r. Genz's fixed-node Gauss-Legendre reduction of
// the single-integral representation (the tvpack BVND scheme); absolute
// accuracy ~5e-16.
inline double bvn_upper(double h, double k, double r) {
    constexpr double twopi = 2.0 * std::numbers::pi;
    const double* gx;
    const double* gw;
    int ng;
    double ar = std::fabs(r);
    if (ar < 0.3) {
        gx = gl_x6; gw = gl_w6; ng = 3;
    } else if (ar < 0.75) {
        gx = gl_x12; gw = gl_w12; ng = 6;
    } else {
        gx = gl_x20; gw = gl_w20; ng = 10;
    }
    double hk = h * k;
    double bvn = 0.0;
    if (ar < 0.925) {
        double hs = 0.5 * (h * h + k * k);
        double asr = std::asin(r);
        for (int i = 0; i < ng; ++i) {
            for (int is = -1; is <= 1; is += 2) {
                double sn = std::sin(asr * (is * gx[i] + 1.0) / 2.0);
                bvn += gw[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
            }
        }
        bvn = bvn * asr / (2.0 * twopi) + phi(-h) * phi(-k);
        return bvn;
    }
    if (r < 0.0) {
        k = -k;
        hk = -hk;
    }
    if (ar < 1.0) {
        double as = (1.0 - r) * (1.0 + r);
        double a = std::sqrt(as);
        double bs = (h - k) * (h - k);
        double cc = (4.0 - hk) / 8.0;
        double dd = (12.0 - hk) / 16.0;
        double asr = -(bs / as + hk) / 2.0;
        if (asr > -100.0)
            bvn = a * std::exp(asr) *
                  (1.0 - cc * (bs - as) * (1.0 - dd * bs / 5.0) / 3.0 + cc * dd * as * as / 5.0);
        if (-hk < 100.0) {
            double b = std::sqrt(bs);
            bvn -= std::exp(-hk / 2.0) * std::sqrt(twopi) * phi(-b / a) * b *
                   (1.0 - cc * bs * (1.0 - dd * bs / 5.0) / 3.0);
        }
        a /= 2.0;
        for (int i = 0; i < ng; ++i) {
            for (int is = -1; is <= 1; is += 2) {
                double x = a * (is * gx[i] + 1.0);
                double xs = x * x;
                double rs = std::sqrt(1.0 - xs);
                asr = -(bs / xs + hk) / 2.0;
                if (asr > -100.0) {
                    bvn += a * gw[i] * std::exp(asr) *
                           (std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs -
                            (1.0 + cc * xs * (1.0 + dd * xs)));
                }
            }
        }
        bvn = -bvn / twopi;
    }
    if (r > 0.0) {
        bvn += phi(-std::max(h, k));
    } else {
        bvn = -bvn;
        if (k > h) bvn += phi(k) - phi(h);
    }
    return std::clamp(bvn, 0.0, 1.0);
}

}  // namespace detail

/// Orthant probability Psi(z1, z2; V) = Pr(Z1 <= z1, Z2 <= z2) for
/// (Z1, Z2) ~ N(0, V). Singular covariances reduce to a univariate Phi
/// along the support line (rank 1) or an indicator (rank 0).
inline double psi(double z1, double z2, const BvnCov& cov) {
    if (!cov.singular()) {
        double s1 = std::sqrt(cov.v11), s2 = std::sqrt(cov.v22);
        return detail::bvn_upper(-z1 / s1, -z2 / s2, cov.correlation());
    }
    double scale = std::max(cov.v11, cov.v22);
    if (scale == 0.0) return (z1 >= 0.0 && z2 >= 0.0) ? 1.0 : 0.0;
    if (cov.v11 < 1e-12 * scale) {
        // Z1 degenerate at 0
        if (z1 < 0.0) return 0.0;
        return phi(z2 / std::sqrt(cov.v22));
    }
    if (cov.v22 < 1e-12 * scale) {
        if (z2 < 0.0) return 0.0;
        return phi(z1 / std::sqrt(cov.v11));
    }
    // rank 1 with both variances positive: Z2 = c Z1 a.s.
    double c = cov.v12 / cov.v11;
    double s = std::sqrt(cov.v11);
    if (c > 0.0) return phi(std::min(z1, z2 / c) / s);
    // c < 0: the two constraints bound Z1 from both sides
    return std::max(0.0, phi(z1 / s) - phi((z2 / c) / s));
}

}  // namespace gmac
