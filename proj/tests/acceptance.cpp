// Acceptance gate: one check per numbered criterion, each printing a
// single PASS/FAIL line. Run with no arguments for all criteria, or with
// a single index to run one. Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "gmac/regions.hpp"
#include "gmac/simulator.hpp"
#include "oracles.hpp"

using namespace gmac;

namespace {

struct Criterion {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// 1: tangency geometry at S1=S2=1, rho=0.5, eps=0.1
Criterion criterion1() {
    Criterion c;
    auto t0 = std::chrono::steady_clock::now();
    ChannelParams p(1.0, 1.0);
    HalfPlane hp = half_plane_form(p, 0.5, 0.1);
    double dt = seconds_since(t0);
    c.require(std::fabs(hp.theta_star - 3.253) <= 0.01,
              "theta_star = " + num(hp.theta_star) + " vs 3.253 +- 0.01");
    c.require(std::fabs(hp.tangency.l1 - (-0.920)) <= 0.005,
              "tangency L1 = " + num(hp.tangency.l1) + " vs -0.920 +- 0.005");
    c.require(std::fabs(hp.tangency.l2 - (-0.103)) <= 0.005,
              "tangency L2 = " + num(hp.tangency.l2) + " vs -0.103 +- 0.005");
    c.require(dt < 5.0, "runtime " + num(dt) + "s >= 5s");
    return c;
}

// 2: critical angles and the 10^4-point sweep
Criterion criterion2() {
    Criterion c;
    auto t0 = std::chrono::steady_clock::now();
    ChannelParams p(1.0, 1.0);
    SweepResult sw = angle_sweep(p, 0.5, 0.1, 10000, 1024);
    double dt = seconds_since(t0);
    double two_pi = 2.0 * std::numbers::pi;
    c.require(std::fabs(sw.critical_low / two_pi - 0.328) <= 0.002,
              "low critical angle " + num(sw.critical_low / two_pi) + " x 2pi");
    c.require(std::fabs(sw.critical_high / two_pi - 0.828) <= 0.002,
              "high critical angle " + num(sw.critical_high / two_pi) + " x 2pi");
    c.require(dt < 10.0, "sweep runtime " + num(dt) + "s >= 10s");
    // cross-derivation: the same angles from the closed-form slope
    double a_rho = -1.875;
    c.require(std::fabs(sw.hp.a_rho - a_rho) <= 1e-9, "slope != -1.875");
    double lo = std::numbers::pi + std::atan(a_rho);
    double hi = 2.0 * std::numbers::pi + std::atan(a_rho);
    c.require(std::fabs(lo / two_pi - 0.328) <= 0.002, "arctan cross-check low");
    c.require(std::fabs(hi / two_pi - 0.828) <= 0.002, "arctan cross-check high");
    return c;
}

// 3: bivariate CDF accuracy against the quadrature oracle
Criterion criterion3() {
    Criterion c;
    double max_err = 0.0;
    for (int iz1 = 0; iz1 <= 20; ++iz1)
        for (int iz2 = 0; iz2 <= 20; ++iz2)
            for (int ir = 0; ir < 19; ++ir) {
                double z1 = -4.0 + 0.4 * iz1;
                double z2 = -4.0 + 0.4 * iz2;
                double r = -0.95 + 0.1 * ir;
                BvnCov cov(1.0, 1.0, r);
                max_err = std::max(max_err,
                                   std::fabs(psi(z1, z2, cov) - oracle::psi(z1, z2, cov)));
            }
    c.require(max_err <= 1e-8, "grid max error " + num(max_err));
    double spot_err = 0.0;
    for (int ir = 0; ir < 19; ++ir) {
        double r = -0.95 + 0.1 * ir;
        double want = 0.25 + std::asin(r) / (2.0 * std::numbers::pi);
        spot_err = std::max(spot_err, std::fabs(psi(0.0, 0.0, BvnCov(1.0, 1.0, r)) - want));
    }
    c.require(spot_err <= 1e-9, "arcsine spot error " + num(spot_err));
    return c;
}

// 4: sampled moments vs closed forms at n = 16, plus the m2 identity
Criterion criterion4() {
    Criterion c;
    ChannelParams p(1.0, 1.0);
    std::mt19937_64 gen(2024);
    const std::size_t n = 16, trials = 100000;
    for (int cfg = 0; cfg < 20; ++cfg) {
        double rho_pair = -0.95 + 1.9 * std::generate_canonical<double, 53>(gen);
        double rho_chan = -0.95 + 1.9 * std::generate_canonical<double, 53>(gen);
        CorrelationPoint ch(rho_chan);
        CodewordPair pair = representative_pair(p, n, rho_pair);
        AnSamples s = sample_infodensity_sums(p, ch, pair, trials, 9000 + cfg);
        SequenceMoments emp = empirical_an_moments(s);
        SequenceMoments cf = sequence_moments(p, ch, pair.x1, pair.x2);
        double t = static_cast<double>(trials);
        std::string tag = " (cfg " + std::to_string(cfg) + ")";
        c.require(std::fabs(emp.mean1 - cf.mean1) <= 4.0 * std::sqrt(cf.var1 / t),
                  "mean1" + tag);
        c.require(std::fabs(emp.mean12 - cf.mean12) <= 4.0 * std::sqrt(cf.var12 / t),
                  "mean12" + tag);
        c.require(std::fabs(emp.var1 - cf.var1) <=
                      4.0 * cf.var1 * std::sqrt(2.0 / (t - 1)) + 1e-12,
                  "var1" + tag);
        c.require(std::fabs(emp.var12 - cf.var12) <=
                      4.0 * cf.var12 * std::sqrt(2.0 / (t - 1)) + 1e-12,
                  "var12" + tag);
        c.require(std::fabs(emp.cov1_12 - cf.cov1_12) <=
                      4.0 * std::sqrt((cf.var1 * cf.var12 + cf.cov1_12 * cf.cov1_12) / t) +
                          1e-12,
                  "cov" + tag);
    }
    double id_err = 0.0;
    for (int i = 0; i < 100; ++i) {
        CorrelationPoint ch(static_cast<double>(i) / 99.0);
        id_err = std::max(id_err, std::fabs(expected_m2_m4(p, ch).m2 -
                                            dispersion_matrix(p, ch).v1));
    }
    c.require(id_err <= 1e-12, "second-moment identity error " + num(id_err));
    return c;
}

// 5: Gaussian-approximation envelope over the (n, rho) grid
Criterion criterion5() {
    Criterion c;
    auto t0 = std::chrono::steady_clock::now();
    ChannelParams p(1.0, 1.0);
    std::uint64_t seed = 31337;
    for (std::size_t n : {200, 500, 1000})
        for (double rho : {0.0, 0.5, 0.9}) {
            CorrelationPoint ch(rho);
            CodewordPair pair = representative_pair(p, n, rho);
            SequenceMoments m = sequence_moments(p, ch, pair.x1, pair.x2);
            BerryEsseenReport rep =
                berry_esseen_check(p, ch, pair, m.mean1, m.mean12, 100000, ++seed);
            c.require(rep.ok, "violation at n=" + std::to_string(n) + ", rho=" + num(rho) +
                                  ": |" + num(rep.empirical - rep.gaussian) + "| > " +
                                  num(rep.envelope));
        }
    double dt = seconds_since(t0);
    c.require(dt < 180.0, "runtime " + num(dt) + "s >= 180s");
    return c;
}

// 6: region property suite
Criterion criterion6() {
    Criterion c;
    ChannelParams p(1.0, 1.0);
    DispersionMatrix v = dispersion_matrix(p, CorrelationPoint(0.5));
    BvnCov cov(v.v1, v.v12, v.v1_12);
    // down-set property
    std::mt19937_64 gen(606);
    int failures = 0;
    for (int i = 0; i < 10000; ++i) {
        double z1 = -5.0 + 10.0 * std::generate_canonical<double, 53>(gen);
        double z2 = -5.0 + 10.0 * std::generate_canonical<double, 53>(gen);
        if (!psi_inv_membership({z1, z2}, cov, 0.1)) continue;
        double d1 = 3.0 * std::generate_canonical<double, 53>(gen);
        double d2 = 3.0 * std::generate_canonical<double, 53>(gen);
        if (!psi_inv_membership({z1 - d1, z2 - d2}, cov, 0.1)) ++failures;
    }
    c.require(failures == 0, std::to_string(failures) + " down-set failures");
    // rectangle sandwich near full correlation
    for (int k = 4; k <= 12; ++k) {
        double rho_n = 1.0 - std::pow(2.0, -k);
        try {
            lemma2_sandwich(p, rho_n, 0.1, 128);  // throws when inclusions fail
        } catch (const std::exception& e) {
            c.require(false, std::string("sandwich k=") + std::to_string(k) + ": " + e.what());
        }
    }
    // shift-inclusion rate stability
    double ratio_ref = lemma1_shift_check(cov, 0.1, 1e-2, 128) / 1e-2;
    for (double lambda : {1e-3, 1e-4}) {
        double ratio = lemma1_shift_check(cov, 0.1, lambda, 128) / lambda;
        c.require(ratio <= 2.0 * ratio_ref && ratio >= 0.5 * ratio_ref,
                  "shift ratio " + num(ratio) + " vs reference " + num(ratio_ref));
    }
    // shift invariance of the half-plane membership along the derivative
    LocalRegion region = local_region_case(boundary_point(p, 0.5), p, 0.1, 512);
    DerivativeVector d = derivative_vector(p, CorrelationPoint(0.5));
    int flips = 0;
    for (int i = 0; i < 10000; ++i) {
        double l1 = -4.0 + 8.0 * std::generate_canonical<double, 53>(gen);
        double l2 = -4.0 + 8.0 * std::generate_canonical<double, 53>(gen);
        bool base = region.contains({l1, l2});
        for (double beta : {-1.0, 1.0})
            if (region.contains({l1 + beta * d.d1, l2 + beta * d.d2()}) != base) ++flips;
    }
    c.require(flips == 0, std::to_string(flips) + " shift-invariance flips");
    return c;
}

// 7: converse vs achievability on a 5x5 rate grid at n = 500
Criterion criterion7() {
    Criterion c;
    ChannelParams p(1.0, 1.0);
    CorrelationPoint ch(0.5);
    const std::size_t n = 500, trials = 100000;
    MIVector mi = mi_vector(p, ch);
    CodewordPair pair = representative_pair(p, n, 0.5);
    AnSamples cs = sample_infodensity_sums(p, ch, pair, trials, 7001);
    AchievabilitySamples as = sample_achievability_sums(p, ch, n, trials, 7002);
    double gamma = default_gamma(n);
    std::vector<double> offs = {-0.02, -0.01, 0.0, 0.01, 0.02};
    std::vector<std::vector<double>> conv_p(5, std::vector<double>(5));
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            double r1 = mi.i1 + offs[i];
            double r2 = mi.i12 - mi.i1 + offs[j];
            BoundReport lo = converse_bound(cs, r1, r2, gamma);
            BoundReport hi = achievability_bound(as, r1, r2, gamma);
            conv_p[i][j] = lo.estimate.p_hat;
            double se = std::hypot(lo.estimate.std_err, hi.estimate.std_err);
            c.require(lo.bound <= hi.bound + 8.0 * se,
                      "sandwich broken at grid (" + std::to_string(i) + "," +
                          std::to_string(j) + ")");
        }
    // exact monotonicity in each rate under common random numbers
    for (int i = 0; i < 5; ++i)
        for (int j = 1; j < 5; ++j) {
            c.require(conv_p[i][j] >= conv_p[i][j - 1], "not monotone in sum rate");
            c.require(conv_p[j][i] >= conv_p[j - 1][i], "not monotone in rate 1");
        }
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    using Fn = Criterion (*)();
    const Fn criteria[] = {criterion1, criterion2, criterion3, criterion4,
                           criterion5, criterion6, criterion7};
    int lo = 1, hi = 7;
    if (argc == 2) {
        lo = hi = std::atoi(argv[1]);
        if (lo < 1 || hi > 7) {
            std::fprintf(stderr, "usage: acceptance [1-7]\n");
            return 64;
        }
    }
    int failures = 0;
    for (int i = lo; i <= hi; ++i) {
        Criterion c = criteria[i - 1]();
        if (c.ok)
            std::printf("criterion %d: PASS\n", i);
        else {
            std::printf("criterion %d: FAIL (%s)\n", i, c.detail.c_str());
            ++failures;
        }
    }
    return failures;
}
