#pragma once

// Closed-form scalar and matrix quantities for the two-user Gaussian
// multiple-access channel with degraded message sets: capacity and
// dispersion functions, the mutual-information vector I(rho), the
// dispersion matrix V(rho), its derivative D(rho), and the moments of
// the information-density vector. All rates are in nats (natural log).

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

namespace gmac {

/// Admissible transmit powers of the two encoders (linear-scale SNR).
struct ChannelParams {
    double s1;
    double s2;

    ChannelParams(double s1_, double s2_) : s1(s1_), s2(s2_) {
        if (!(s1 > 0.0)) throw std::invalid_argument("ChannelParams: s1 must be > 0");
        if (!(s2 > 0.0)) throw std::invalid_argument("ChannelParams: s2 must be > 0");
    }
};

/// Input correlation coefficient, rho in [-1, 1].
struct CorrelationPoint {
    double rho;

    explicit CorrelationPoint(double r) : rho(r) {
        if (!(std::fabs(r) <= 1.0))
            throw std::invalid_argument("CorrelationPoint: |rho| must be <= 1, got " +
                                        std::to_string(r));
    }
};

/// Gaussian capacity function C(x) = 1/2 log(1+x), nats.
inline double gaussian_capacity(double x) {
    if (!(x >= 0.0)) throw std::invalid_argument("gaussian_capacity: x must be >= 0");
    return 0.5 * std::log1p(x);
}

/// Gaussian cross-dispersion V(x, y) = x(y+2) / (2(x+1)(y+1)), nats^2.
inline double gaussian_cross_dispersion(double x, double y) {
    if (!(x >= 0.0) || !(y >= 0.0))
        throw std::invalid_argument("gaussian_cross_dispersion: arguments must be >= 0");
    return x * (y + 2.0) / (2.0 * (x + 1.0) * (y + 1.0));
}

/// Gaussian dispersion function V(x) = V(x, x).
inline double gaussian_dispersion(double x) { return gaussian_cross_dispersion(x, x); }

/// Per-letter constants of the channel at a correlation point:
/// alpha = S1(1-rho^2), theta = S1+S2+2 rho sqrt(S1 S2), kappa = rho sqrt(S1/S2).
struct PerLetterConstants {
    double alpha;
    double theta;
    double kappa;

    PerLetterConstants(const ChannelParams& p, const CorrelationPoint& c)
        : alpha(p.s1 * (1.0 - c.rho * c.rho)),
          theta(p.s1 + p.s2 + 2.0 * c.rho * std::sqrt(p.s1 * p.s2)),
          kappa(c.rho * std::sqrt(p.s1 / p.s2)) {
        // alpha can come out as a tiny negative at |rho|=1 through rounding
        if (alpha < 0.0) alpha = 0.0;
    }
};

/// Mutual-information vector (I1, I12), nats/use.
struct MIVector {
    double i1;
    double i12;
};

inline MIVector mi_vector(const ChannelParams& p, const CorrelationPoint& c) {
    PerLetterConstants k(p, c);
    return {gaussian_capacity(k.alpha), gaussian_capacity(k.theta)};
}

/// Symmetric 2x2 information-dispersion matrix, nats^2/use.
struct DispersionMatrix {
    double v1;
    double v12;
    double v1_12;  // off-diagonal

    double determinant() const { return v1 * v12 - v1_12 * v1_12; }
};

inline DispersionMatrix dispersion_matrix(const ChannelParams& p, const CorrelationPoint& c) {
    PerLetterConstants k(p, c);
    return {gaussian_dispersion(k.alpha), gaussian_dispersion(k.theta),
            gaussian_cross_dispersion(k.alpha, k.theta)};
}

/// Derivative of the mutual-information vector with respect to rho.
/// d2() = d12 - d1 is the derivative of the sum-rate coordinate R2.
struct DerivativeVector {
    double d1;
    double d12;

    double d2() const { return d12 - d1; }
};

inline DerivativeVector derivative_vector(const ChannelParams& p, const CorrelationPoint& c) {
    PerLetterConstants k(p, c);
    double d1 = -p.s1 * c.rho / (1.0 + k.alpha);
    double d12 = std::sqrt(p.s1 * p.s2) / (1.0 + k.theta);
    return {d1, d12};
}

/// Information-density pair (j1, j12) at a single channel use, nats.
struct InfoDensitySample {
    double j1;
    double j12;
};

/// Evaluates the information densities from their quadratic forms in
/// Z = y - x1 - x2, entirely in the log domain.
inline InfoDensitySample info_density(const ChannelParams& p, const CorrelationPoint& c,
                                      double x1, double x2, double y) {
    PerLetterConstants k(p, c);
    double z = y - x1 - x2;
    double w1 = x1 - k.kappa * x2 + z;
    double w12 = x1 + x2 + z;
    double j1 = 0.5 * std::log1p(k.alpha) - 0.5 * z * z + w1 * w1 / (2.0 * (1.0 + k.alpha));
    double j12 = 0.5 * std::log1p(k.theta) - 0.5 * z * z + w12 * w12 / (2.0 * (1.0 + k.theta));
    return {j1, j12};
}

/// Mean and covariance of a (possibly aggregated) information-density
/// vector; third absolute moments are Monte-Carlo estimates when present.
struct SequenceMoments {
    double mean1 = 0.0;
    double mean12 = 0.0;
    double var1 = 0.0;
    double var12 = 0.0;
    double cov1_12 = 0.0;
};

/// Closed-form per-letter moments of j(x1, x2, Y) with Y ~ W(.|x1, x2).
inline SequenceMoments per_letter_moments(const ChannelParams& p, const CorrelationPoint& c,
                                          double x1, double x2) {
    PerLetterConstants k(p, c);
    double u1 = x1 - k.kappa * x2;  // drives j1
    double u12 = x1 + x2;           // drives j12
    SequenceMoments m;
    m.mean1 = 0.5 * std::log1p(k.alpha) + (u1 * u1 - k.alpha) / (2.0 * (1.0 + k.alpha));
    m.mean12 = 0.5 * std::log1p(k.theta) + (u12 * u12 - k.theta) / (2.0 * (1.0 + k.theta));
    double a1 = 1.0 + k.alpha, a12 = 1.0 + k.theta;
    m.var1 = (k.alpha * k.alpha + 2.0 * u1 * u1) / (2.0 * a1 * a1);
    m.var12 = (k.theta * k.theta + 2.0 * u12 * u12) / (2.0 * a12 * a12);
    m.cov1_12 = (k.alpha * k.theta + 2.0 * u1 * u12) / (2.0 * a1 * a12);
    return m;
}

/// Moments of A_n = n^{-1/2} sum_i j(x1i, x2i, Y_i). By symmetry of the
/// noise these depend on the sequences only through ||x1||^2, ||x2||^2
/// and <x1, x2>.
inline SequenceMoments sequence_moments(const ChannelParams& p, const CorrelationPoint& c,
                                        std::span<const double> x1, std::span<const double> x2) {
    if (x1.size() != x2.size() || x1.empty())
        throw std::invalid_argument("sequence_moments: sequences must have equal length n >= 1");
    const double n = static_cast<double>(x1.size());
    double p1 = 0.0, p2 = 0.0, ip = 0.0;
    for (std::size_t i = 0; i < x1.size(); ++i) {
        p1 += x1[i] * x1[i];
        p2 += x2[i] * x2[i];
        ip += x1[i] * x2[i];
    }
    PerLetterConstants k(p, c);
    // ||x1 - kappa x2||^2 and ||x1 + x2||^2 from the three sufficient statistics
    double q1 = p1 + k.kappa * k.kappa * p2 - 2.0 * k.kappa * ip;
    double q12 = p1 + p2 + 2.0 * ip;
    double a1 = 1.0 + k.alpha, a12 = 1.0 + k.theta;
    SequenceMoments m;
    m.mean1 = std::sqrt(n) * (gaussian_capacity(k.alpha) + (q1 - n * k.alpha) / (2.0 * n * a1));
    m.mean12 = std::sqrt(n) * (gaussian_capacity(k.theta) + (q12 - n * k.theta) / (2.0 * n * a12));
    m.var1 = (n * k.alpha * k.alpha + 2.0 * q1) / (2.0 * n * a1 * a1);
    m.var12 = (n * k.theta * k.theta + 2.0 * q12) / (2.0 * n * a12 * a12);
    m.cov1_12 = (n * k.alpha * k.theta + 2.0 * (p1 + (1.0 - k.kappa) * ip - k.kappa * p2)) /
                (2.0 * n * a1 * a12);
    return m;
}

/// Second and fourth central moments of j1 averaged over the input
/// ensemble N(0, Sigma(rho)), plus the Cauchy-Schwarz surrogate bound
/// (m2 + m4)/2 on the third absolute moment.
struct M2M4 {
    double m2;
    double m4;
    double t1_surrogate;
};

inline M2M4 expected_m2_m4(const ChannelParams& p, const CorrelationPoint& c) {
    PerLetterConstants k(p, c);
    double a = k.alpha, a1 = 1.0 + a;
    double m2 = a * (2.0 + a) / (2.0 * a1 * a1);
    double m4 = 3.0 * a * a * (5.0 * a * a + 20.0 * a + 12.0) / (4.0 * a1 * a1 * a1 * a1);
    return {m2, m4, 0.5 * (m2 + m4)};
}

}  // namespace gmac
