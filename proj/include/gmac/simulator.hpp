#pragma once

// Monte-Carlo engine: correlation-type representative codewords, sampling
// of information-density sums under the Gaussian channel, the converse and
// achievability threshold-event bounds, and the Berry-Esseen envelope check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "gmac/bvn.hpp"
#include "gmac/channel.hpp"

namespace gmac {

/// Codeword pair with cached power and correlation statistics.
struct CodewordPair {
    std::vector<double> x1;
    std::vector<double> x2;
    double p1 = 0.0;       // ||x1||^2
    double p2 = 0.0;       // ||x2||^2
    double ip = 0.0;       // <x1, x2>
    double rho_emp = 0.0;  // ip / sqrt(p1 p2)

    CodewordPair(std::vector<double> a, std::vector<double> b)
        : x1(std::move(a)), x2(std::move(b)) {
        if (x1.size() != x2.size() || x1.empty())
            throw std::invalid_argument("CodewordPair: sequences must have equal length n >= 1");
        for (std::size_t i = 0; i < x1.size(); ++i) {
            p1 += x1[i] * x1[i];
            p2 += x2[i] * x2[i];
            ip += x1[i] * x2[i];
        }
        if (!(p1 > 0.0) || !(p2 > 0.0))
            throw std::invalid_argument("CodewordPair: sequences must be nonzero");
        rho_emp = ip / std::sqrt(p1 * p2);
    }

    std::size_t n() const { return x1.size(); }
};

/// Builds an exact-power pair with empirical correlation exactly
/// rho_target: x1 constant at sqrt(S1); x2 made of +-sqrt(S2) entries with
/// two entries rescaled to sqrt(S2 (1 +- eta)) to absorb the fractional
/// part of n * rho_target.
inline CodewordPair representative_pair(const ChannelParams& p, std::size_t n,
                                        double rho_target) {
    if (n < 2) throw std::invalid_argument("representative_pair: n must be >= 2");
    if (!(std::fabs(rho_target) <= 1.0))
        throw std::invalid_argument("representative_pair: |rho_target| must be <= 1");
    const double r1 = std::sqrt(p.s1), r2 = std::sqrt(p.s2);
    std::vector<double> x1(n, r1), x2(n, r2);
    const double t = static_cast<double>(n) * rho_target;  // target sum of signs
    const double base = static_cast<double>(n) - 2.0;
    const double sqrt2 = std::numbers::sqrt2;
    if (t >= base + sqrt2 || t <= -(base + sqrt2)) {
        // near-aligned branch: both tweaked entries share the sign of t
        double sgn = t >= 0.0 ? 1.0 : -1.0;
        double g = std::fabs(t) - base;  // in (sqrt2, 2]
        double inner = g * g / 2.0 - 1.0;
        double eta = std::sqrt(std::max(0.0, 1.0 - inner * inner));
        for (std::size_t i = 0; i < n - 2; ++i) x2[i] = sgn * r2;
        x2[n - 2] = sgn * r2 * std::sqrt(1.0 + eta);
        x2[n - 1] = sgn * r2 * std::sqrt(1.0 - eta);
    } else {
        // m sign flips among the first n-2 entries; the last two carry the
        // fractional residual f = sqrt(1+eta) - sqrt(1-eta) in [-1, 1]
        double m_real = std::round((base - t) / 2.0);
        double m = std::clamp(m_real, 0.0, base);
        double f = t - (base - 2.0 * m);
        double eta_sq = f * f - f * f * f * f / 4.0;
        double eta = (f >= 0.0 ? 1.0 : -1.0) * std::sqrt(std::max(0.0, eta_sq));
        auto mi = static_cast<std::size_t>(m);
        for (std::size_t i = 0; i < mi; ++i) x2[i] = -r2;
        x2[n - 2] = r2 * std::sqrt(1.0 + eta);
        x2[n - 1] = -r2 * std::sqrt(1.0 - eta);
    }
    CodewordPair pair(std::move(x1), std::move(x2));
    if (std::fabs(pair.rho_emp - rho_target) > 1e-10)
        throw std::runtime_error("representative_pair: empirical correlation off target");
    return pair;
}

/// Index k of the correlation cell containing rho_emp, under the
/// (2n+1)-cell partition I_0 = {0}, I_k = ((k-1)/n, k/n] and mirrored
/// negatives.
inline long type_class_index(const CodewordPair& pair, std::size_t n) {
    double r = pair.rho_emp;
    if (r == 0.0) return 0;
    long nn = static_cast<long>(n);
    if (r > 0.0) return std::clamp(static_cast<long>(std::ceil(r * n)), 1L, nn);
    return -std::clamp(static_cast<long>(std::ceil(-r * n)), 1L, nn);
}

/// One Monte-Carlo draw of the pair of information-density sums.
struct SumSample {
    double sum1;   // sum_i j1
    double sum12;  // sum_i j12
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline constexpr std::size_t shard_size = 16384;

inline std::uint64_t shard_seed(std::uint64_t seed, std::size_t shard) {
    return splitmix64(seed + 0x9E3779B97F4A7C15ULL * (shard + 1));
}

}  // namespace detail

/// Raw A_n samples with per-letter third-moment estimate accumulated in
/// the same pass. A_n = n^{-1/2} sum_i j(x1i, x2i, Y_i).
struct AnSamples {
    std::size_t n = 0;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    std::vector<SumSample> sums;  // raw per-trial (sum1, sum12)
    double t_hat = 0.0;           // mean over draws of ||j - E j||^3, per letter
};

/// Samples the information-density sums for a fixed codeword pair.
/// Deterministic given (seed, trials, n); trials are partitioned into
/// shards with derived sub-seeds so the result is independent of any
/// parallel dispatch, and shard accumulators combine in fixed order.
inline AnSamples sample_infodensity_sums(const ChannelParams& p, const CorrelationPoint& c,
                                         const CodewordPair& pair, std::size_t trials,
                                         std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("sample_infodensity_sums: trials must be >= 1");
    const std::size_t n = pair.n();
    PerLetterConstants k(p, c);
    const double a1 = 1.0 + k.alpha, a12 = 1.0 + k.theta;
    const double c1 = 0.5 * std::log1p(k.alpha), c12 = 0.5 * std::log1p(k.theta);
    // per-letter linear terms and means
    std::vector<double> w1(n), w12(n), m1(n), m12(n);
    for (std::size_t i = 0; i < n; ++i) {
        w1[i] = pair.x1[i] - k.kappa * pair.x2[i];
        w12[i] = pair.x1[i] + pair.x2[i];
        m1[i] = c1 + (w1[i] * w1[i] - k.alpha) / (2.0 * a1);
        m12[i] = c12 + (w12[i] * w12[i] - k.theta) / (2.0 * a12);
    }
    AnSamples out;
    out.n = n;
    out.trials = trials;
    out.seed = seed;
    out.sums.resize(trials);
    const std::size_t shards = (trials + detail::shard_size - 1) / detail::shard_size;
    double t_acc = 0.0;
    for (std::size_t sh = 0; sh < shards; ++sh) {
        std::mt19937_64 gen(detail::shard_seed(seed, sh));
        std::normal_distribution<double> normal;
        double t_shard = 0.0;
        std::size_t lo = sh * detail::shard_size;
        std::size_t hi = std::min(trials, lo + detail::shard_size);
        for (std::size_t tr = lo; tr < hi; ++tr) {
            double s1 = 0.0, s12 = 0.0, cube = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double z = normal(gen);
                double v1 = w1[i] + z, v12 = w12[i] + z;
                double j1 = c1 - 0.5 * z * z + v1 * v1 / (2.0 * a1);
                double j12 = c12 - 0.5 * z * z + v12 * v12 / (2.0 * a12);
                s1 += j1;
                s12 += j12;
                double u1 = j1 - m1[i], u2 = j12 - m12[i];
                double q = u1 * u1 + u2 * u2;
                cube += q * std::sqrt(q);
            }
            out.sums[tr] = {s1, s12};
            t_shard += cube / static_cast<double>(n);
        }
        t_acc += t_shard;
    }
    out.t_hat = t_acc / static_cast<double>(trials);
    return out;
}

/// Empirical mean and covariance of A_n from raw sums.
inline SequenceMoments empirical_an_moments(const AnSamples& s) {
    const double rn = std::sqrt(static_cast<double>(s.n));
    const double t = static_cast<double>(s.trials);
    SequenceMoments m;
    for (const SumSample& v : s.sums) {
        m.mean1 += v.sum1 / rn;
        m.mean12 += v.sum12 / rn;
    }
    m.mean1 /= t;
    m.mean12 /= t;
    for (const SumSample& v : s.sums) {
        double d1 = v.sum1 / rn - m.mean1, d12 = v.sum12 / rn - m.mean12;
        m.var1 += d1 * d1;
        m.var12 += d12 * d12;
        m.cov1_12 += d1 * d12;
    }
    m.var1 /= t - 1.0;
    m.var12 /= t - 1.0;
    m.cov1_12 /= t - 1.0;
    return m;
}

/// Monte-Carlo probability estimate.
struct MCEstimate {
    double p_hat = 0.0;
    std::size_t trials = 0;
    double std_err = 0.0;
    std::uint64_t seed = 0;
};

inline MCEstimate make_estimate(std::size_t hits, std::size_t trials, std::uint64_t seed) {
    double p = static_cast<double>(hits) / static_cast<double>(trials);
    return {p, trials, std::sqrt(p * (1.0 - p) / static_cast<double>(trials)), seed};
}

/// A bound value with its estimate, threshold offset and exponential slack.
struct BoundReport {
    MCEstimate estimate;
    double gamma = 0.0;
    double slack = 0.0;             // 2 exp(-n gamma)
    double bound = 0.0;             // lower (converse) or upper (achievability)
    double power_violation = 0.0;   // achievability diagnostic only
};

inline double default_gamma(std::size_t n) {
    return std::log(static_cast<double>(n)) / (2.0 * static_cast<double>(n));
}

/// Union-event probability over precomputed sums: the events are
/// {sum1 <= n thr1} and {sum12 <= n thr12}.
inline MCEstimate union_event_probability(const AnSamples& s, double thr1, double thr12) {
    const double n = static_cast<double>(s.n);
    std::size_t hits = 0;
    for (const SumSample& v : s.sums)
        if (v.sum1 <= n * thr1 || v.sum12 <= n * thr12) ++hits;
    return make_estimate(hits, s.trials, s.seed);
}

/// Converse bound from precomputed sums: events at R1 - gamma and
/// R1 + R2 - gamma, lower bound max(0, p_hat - 2 exp(-n gamma)). Reusing
/// one `AnSamples` across rate points gives common random numbers, hence
/// exact monotonicity in each rate.
inline BoundReport converse_bound(const AnSamples& s, double r1, double r2, double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("converse_bound: gamma must be > 0");
    BoundReport rep;
    rep.estimate = union_event_probability(s, r1 - gamma, r1 + r2 - gamma);
    rep.gamma = gamma;
    rep.slack = 2.0 * std::exp(-static_cast<double>(s.n) * gamma);
    rep.bound = std::max(0.0, rep.estimate.p_hat - rep.slack);
    return rep;
}

inline BoundReport converse_bound(const ChannelParams& p, const CorrelationPoint& c,
                                  const CodewordPair& pair, double r1, double r2, double gamma,
                                  std::size_t trials, std::uint64_t seed) {
    return converse_bound(sample_infodensity_sums(p, c, pair, trials, seed), r1, r2, gamma);
}

/// Sums drawn with random Gaussian inputs, for the achievability side.
struct AchievabilitySamples {
    std::size_t n = 0;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    std::vector<SumSample> sums;
    double power_violation = 0.0;  // fraction of trials with ||xj||^2 > n Sj
};

/// Samples the achievability information densities with inputs drawn
/// i.i.d. from N(0, Sigma(rho)) per letter: X2 = sqrt(S2) U2,
/// X1 = rho sqrt(S1) U2 + sqrt(S1 (1 - rho^2)) U1.
inline AchievabilitySamples sample_achievability_sums(const ChannelParams& p,
                                                      const CorrelationPoint& c, std::size_t n,
                                                      std::size_t trials, std::uint64_t seed) {
    if (n < 1 || trials < 1)
        throw std::invalid_argument("sample_achievability_sums: n, trials must be >= 1");
    PerLetterConstants k(p, c);
    const double a1 = 1.0 + k.alpha, a12 = 1.0 + k.theta;
    const double c1 = 0.5 * std::log1p(k.alpha), c12 = 0.5 * std::log1p(k.theta);
    const double g2 = std::sqrt(p.s2);
    const double g1c = c.rho * std::sqrt(p.s1);                          // common part of X1
    const double g1i = std::sqrt(std::max(0.0, p.s1 * (1.0 - c.rho * c.rho)));
    AchievabilitySamples out;
    out.n = n;
    out.trials = trials;
    out.seed = seed;
    out.sums.resize(trials);
    const std::size_t shards = (trials + detail::shard_size - 1) / detail::shard_size;
    std::size_t violations = 0;
    const double lim1 = static_cast<double>(n) * p.s1, lim2 = static_cast<double>(n) * p.s2;
    for (std::size_t sh = 0; sh < shards; ++sh) {
        std::mt19937_64 gen(detail::shard_seed(seed, sh));
        std::normal_distribution<double> normal;
        std::size_t lo = sh * detail::shard_size;
        std::size_t hi = std::min(trials, lo + detail::shard_size);
        for (std::size_t tr = lo; tr < hi; ++tr) {
            double s1 = 0.0, s12 = 0.0, pw1 = 0.0, pw2 = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double u1 = normal(gen), u2 = normal(gen), z = normal(gen);
                double x2 = g2 * u2;
                double x1 = g1c * u2 + g1i * u1;
                double v1 = x1 - k.kappa * x2 + z, v12 = x1 + x2 + z;
                s1 += c1 - 0.5 * z * z + v1 * v1 / (2.0 * a1);
                s12 += c12 - 0.5 * z * z + v12 * v12 / (2.0 * a12);
                pw1 += x1 * x1;
                pw2 += x2 * x2;
            }
            out.sums[tr] = {s1, s12};
            if (pw1 > lim1 || pw2 > lim2) ++violations;
        }
    }
    out.power_violation = static_cast<double>(violations) / static_cast<double>(trials);
    return out;
}

/// Achievability bound from precomputed sums: events at R1 + gamma and
/// R1 + R2 + gamma, upper bound min(1, p_hat + 2 exp(-n gamma)). The two
/// auxiliary-output constants are both 1 because the comparison laws are
/// the exact induced outputs of the Gaussian ensemble.
inline BoundReport achievability_bound(const AchievabilitySamples& s, double r1, double r2,
                                       double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("achievability_bound: gamma must be > 0");
    const double n = static_cast<double>(s.n);
    std::size_t hits = 0;
    for (const SumSample& v : s.sums)
        if (v.sum1 <= n * (r1 + gamma) || v.sum12 <= n * (r1 + r2 + gamma)) ++hits;
    BoundReport rep;
    rep.estimate = make_estimate(hits, s.trials, s.seed);
    rep.gamma = gamma;
    rep.slack = 2.0 * std::exp(-n * gamma);
    rep.bound = std::min(1.0, rep.estimate.p_hat + rep.slack);
    rep.power_violation = s.power_violation;
    return rep;
}

inline BoundReport achievability_bound(const ChannelParams& p, const CorrelationPoint& c,
                                       std::size_t n, double r1, double r2, double gamma,
                                       std::size_t trials, std::uint64_t seed) {
    return achievability_bound(sample_achievability_sums(p, c, n, trials, seed), r1, r2, gamma);
}

/// Result of the Berry-Esseen envelope comparison at one threshold pair.
struct BerryEsseenReport {
    double empirical = 0.0;
    double gaussian = 0.0;   // Psi at the closed-form A_n moments
    double envelope = 0.0;   // k2 t / (lambda_min^{3/2} sqrt(n)) + 4 std_err
    double t_hat = 0.0;
    double lambda_min = 0.0;
    bool ok = false;
};

inline constexpr double berry_esseen_k2 = 265.0;

/// Compares the empirical quadrant probability of A_n against the
/// bivariate Gaussian at the closed-form moments. The envelope is a
/// theorem, so a violation signals an implementation bug.
inline BerryEsseenReport berry_esseen_check(const ChannelParams& p, const CorrelationPoint& c,
                                            const CodewordPair& pair, double thr1, double thr12,
                                            std::size_t trials, std::uint64_t seed) {
    AnSamples s = sample_infodensity_sums(p, c, pair, trials, seed);
    SequenceMoments m = sequence_moments(p, c, pair.x1, pair.x2);
    BvnCov cov(m.var1, m.var12, m.cov1_12);
    if (cov.singular())
        throw std::invalid_argument("berry_esseen_check: covariance of A_n is singular");
    const double rn = std::sqrt(static_cast<double>(s.n));
    std::size_t hits = 0;
    for (const SumSample& v : s.sums)
        if (v.sum1 / rn <= thr1 && v.sum12 / rn <= thr12) ++hits;
    MCEstimate est = make_estimate(hits, trials, seed);
    BerryEsseenReport rep;
    rep.empirical = est.p_hat;
    rep.gaussian = psi(thr1 - m.mean1, thr12 - m.mean12, cov);
    rep.t_hat = s.t_hat;
    rep.lambda_min = cov.min_eigenvalue();
    rep.envelope = berry_esseen_k2 * s.t_hat / (std::pow(rep.lambda_min, 1.5) * rn) +
                   4.0 * est.std_err;
    rep.ok = std::fabs(rep.empirical - rep.gaussian) <= rep.envelope;
    return rep;
}

}  // namespace gmac
