// Command-line front end: emits capacity, finite-n and local second-order
// region data as CSV/JSON, and runs the Monte-Carlo bound estimators.
// Exit codes: 0 success, 2 validation error, 3 numerical failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gmac/io.hpp"
#include "gmac/regions.hpp"
#include "gmac/simulator.hpp"

namespace {

using nlohmann::json;

struct OutputTarget {
    std::optional<std::ofstream> file;
    std::ostream& stream() { return file ? *file : std::cout; }

    explicit OutputTarget(const std::string& path) {
        if (!path.empty()) {
            file.emplace(path, std::ios::binary);
            if (!*file) throw std::invalid_argument("cannot open output file: " + path);
        }
    }
};

std::uint64_t default_seed() {
    if (const char* env = std::getenv("GMAC_SEED")) return std::strtoull(env, nullptr, 10);
    return 12345;
}

using Config = std::vector<std::pair<std::string, std::string>>;

void emit_table(std::ostream& os, const std::string& format, const Config& config,
                const std::vector<std::string>& cols,
                const std::vector<std::vector<double>>& rows) {
    if (format == "json") {
        json j;
        j["artifact_version"] = gmac::artifact_version;
        for (const auto& [k, v] : config) j["config"][k] = v;
        j["columns"] = cols;
        j["rows"] = rows;
        os << j.dump(2) << "\n";
        return;
    }
    gmac::CsvWriter w{os};
    w.header(config);
    w.columns(cols);
    for (const auto& r : rows) w.row(r);
}

std::vector<double> parse_grid(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    if (out.empty()) throw std::invalid_argument("--rho-grid: empty list");
    return out;
}

struct CommonOpts {
    double s1 = 1.0, s2 = 1.0, rho = 0.5, eps = 0.1;
    double n = 500;
    std::size_t trials = 100000;
    std::uint64_t seed = default_seed();
    double gamma = 0.0;  // 0 means default (log n)/(2n)
    double offset = 0.0;
    int grid = 512;
    int resolution = 2048;
    std::string format = "csv";
    std::string out;
    std::string rho_grid;
};

void add_channel_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--s1", o.s1, "transmit power of user 1 (must be > 0)");
    cmd->add_option("--s2", o.s2, "transmit power of user 2 (must be > 0)");
    cmd->add_option("--format", o.format, "output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", o.out, "output file (default stdout)");
}

Config base_config(const CommonOpts& o) {
    return {{"s1", gmac::fmt9(o.s1)}, {"s2", gmac::fmt9(o.s2)}};
}

int run_capacity(const CommonOpts& o) {
    gmac::ChannelParams p(o.s1, o.s2);
    if (o.grid < 2) throw std::invalid_argument("--grid must be >= 2");
    Config cfg = base_config(o);
    cfg.push_back({"grid", std::to_string(o.grid)});
    cfg.push_back({"frame", "rate_plane"});
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < o.grid; ++i) {
        double rho = 1.0 - static_cast<double>(i) / (o.grid - 1);
        gmac::MIVector mi = gmac::mi_vector(p, gmac::CorrelationPoint(rho));
        rows.push_back({rho, mi.i1, mi.i12 - mi.i1});
    }
    rows.push_back({0.0, rows.back()[1], 0.0});  // vertical segment endpoint
    OutputTarget t(o.out);
    emit_table(t.stream(), o.format, cfg, {"rho", "R1", "R2"}, rows);
    return 0;
}

int run_global(const CommonOpts& o) {
    gmac::ChannelParams p(o.s1, o.s2);
    std::vector<double> rhos =
        o.rho_grid.empty() ? std::vector<double>{o.rho} : parse_grid(o.rho_grid);
    Config cfg = base_config(o);
    cfg.push_back({"n", gmac::fmt9(o.n)});
    cfg.push_back({"eps", gmac::fmt9(o.eps)});
    cfg.push_back({"offset", gmac::fmt9(o.offset)});
    cfg.push_back({"frame", "vector_and_rate"});
    std::vector<std::vector<double>> rows;
    for (double rho : rhos) {
        gmac::RegionBoundary b =
            gmac::global_region(p, rho, o.n, o.eps, o.offset, o.resolution);
        for (const gmac::Vec2& z : b.points)
            rows.push_back({rho, o.n, o.eps, z.z1, z.z2, z.z1, z.z2 - z.z1});
    }
    if (rhos.size() > 1) {
        // Pareto envelope in the R-plane, keeping the contributing rho
        std::sort(rows.begin(), rows.end(),
                  [](const auto& a, const auto& b) { return a[5] > b[5]; });
        std::vector<std::vector<double>> front;
        double best = -1e300;
        for (auto& r : rows)
            if (r[6] > best) {
                best = r[6];
                front.push_back(r);
            }
        std::reverse(front.begin(), front.end());
        rows = std::move(front);
    }
    OutputTarget t(o.out);
    emit_table(t.stream(), o.format, cfg, {"rho", "n", "eps", "z1", "z2", "R1", "R2"}, rows);
    return 0;
}

int run_psi_inv(const CommonOpts& o, bool scale_by_sqrt_n) {
    gmac::ChannelParams p(o.s1, o.s2);
    gmac::DispersionMatrix v = gmac::dispersion_matrix(p, gmac::CorrelationPoint(o.rho));
    gmac::PsiInverseRegion region =
        gmac::trace_boundary(gmac::BvnCov(v.v1, v.v12, v.v1_12), o.eps, o.resolution);
    double scale = scale_by_sqrt_n ? 1.0 / std::sqrt(o.n) : 1.0;
    Config cfg = base_config(o);
    cfg.push_back({"rho", gmac::fmt9(o.rho)});
    cfg.push_back({"eps", gmac::fmt9(o.eps)});
    cfg.push_back({"resolution", std::to_string(o.resolution)});
    cfg.push_back({"scaled_by_sqrt_n", scale_by_sqrt_n ? gmac::fmt9(o.n) : "no"});
    cfg.push_back({"frame", "vector_frame"});
    std::vector<std::vector<double>> rows;
    for (const gmac::Vec2& z : region.boundary) rows.push_back({z.z1 * scale, z.z2 * scale});
    OutputTarget t(o.out);
    emit_table(t.stream(), o.format, cfg, {"z1", "z2"}, rows);
    return 0;
}

int run_local(const CommonOpts& o) {
    gmac::ChannelParams p(o.s1, o.s2);
    gmac::BoundaryPoint bp = gmac::boundary_point(p, o.rho);
    gmac::LocalRegion region = gmac::local_region_case(bp, p, o.eps, o.resolution);
    Config cfg = base_config(o);
    cfg.push_back({"rho", gmac::fmt9(o.rho)});
    cfg.push_back({"eps", gmac::fmt9(o.eps)});
    std::vector<std::string> cols;
    std::vector<std::vector<double>> rows;
    switch (region.case_tag) {
        case gmac::BoundaryCase::vertical_i:
            cfg.push_back({"case", "i"});
            cfg.push_back({"l1_threshold", gmac::fmt9(region.case_i_threshold)});
            cols = {"l1_threshold"};
            rows.push_back({region.case_i_threshold});
            break;
        case gmac::BoundaryCase::curved_ii: {
            const gmac::HalfPlane& hp = *region.half_plane;
            cfg.push_back({"case", "ii"});
            cfg.push_back({"a_rho", gmac::fmt9(hp.a_rho)});
            cfg.push_back({"b", gmac::fmt9(hp.b)});
            cfg.push_back({"theta_star", gmac::fmt9(hp.theta_star)});
            cfg.push_back({"tangency_l1", gmac::fmt9(hp.tangency.l1)});
            cfg.push_back({"tangency_l2", gmac::fmt9(hp.tangency.l2)});
            cfg.push_back({"frame", "l_frame"});
            gmac::DispersionMatrix v = gmac::dispersion_matrix(p, gmac::CorrelationPoint(o.rho));
            gmac::PsiInverseRegion psi_b =
                gmac::trace_boundary(gmac::BvnCov(v.v1, v.v12, v.v1_12), o.eps, o.resolution);
            cols = {"L1", "L2", "line_L2"};
            for (const gmac::Vec2& z : psi_b.boundary)
                rows.push_back({z.z1, z.z2 - z.z1, hp.a_rho * z.z1 + hp.b});
            break;
        }
        case gmac::BoundaryCase::top_iii:
            cfg.push_back({"case", "iii"});
            cfg.push_back({"rect_corner_z2", gmac::fmt9(region.rect_corner.z2)});
            cfg.push_back({"cone_d1", gmac::fmt9(region.cone_dir.d1)});
            cfg.push_back({"cone_d12", gmac::fmt9(region.cone_dir.d12)});
            cols = {"rect_corner_z1", "rect_corner_z2", "cone_d1", "cone_d12"};
            rows.push_back({region.rect_corner.z1, region.rect_corner.z2, region.cone_dir.d1,
                            region.cone_dir.d12});
            break;
    }
    OutputTarget t(o.out);
    emit_table(t.stream(), o.format, cfg, cols, rows);
    return 0;
}

int run_sweep(const CommonOpts& o) {
    gmac::ChannelParams p(o.s1, o.s2);
    gmac::SweepResult sw = gmac::angle_sweep(p, o.rho, o.eps, o.grid, o.resolution);
    Config cfg = base_config(o);
    cfg.push_back({"rho", gmac::fmt9(o.rho)});
    cfg.push_back({"eps", gmac::fmt9(o.eps)});
    cfg.push_back({"grid", std::to_string(o.grid)});
    cfg.push_back({"a_rho", gmac::fmt9(sw.hp.a_rho)});
    cfg.push_back({"b", gmac::fmt9(sw.hp.b)});
    cfg.push_back({"critical_angle_low", gmac::fmt9(sw.critical_low)});
    cfg.push_back({"critical_angle_high", gmac::fmt9(sw.critical_high)});
    cfg.push_back({"theta_star", gmac::fmt9(sw.hp.theta_star)});
    std::vector<std::vector<double>> rows;
    for (const gmac::SweepRow& r : sw.rows)
        rows.push_back(
            {r.theta, r.theta / (2.0 * std::numbers::pi), r.l1, r.l2, r.norm});
    OutputTarget t(o.out);
    emit_table(t.stream(), o.format, cfg,
               {"theta_rad", "theta_frac_2pi", "L1", "L2", "norm"}, rows);
    return 0;
}

int run_single_user(const CommonOpts& o) {
    double v = gmac::single_user_expansion(o.s1, o.n, o.eps, o.offset);
    Config cfg = {{"s", gmac::fmt9(o.s1)},
                  {"n", gmac::fmt9(o.n)},
                  {"eps", gmac::fmt9(o.eps)},
                  {"offset", gmac::fmt9(o.offset)}};
    OutputTarget t(o.out);
    emit_table(t.stream(), o.format, cfg, {"log_m"}, {{v}});
    return 0;
}

json mc_base(const CommonOpts& o, std::size_t n) {
    json j;
    j["artifact_version"] = gmac::artifact_version;
    j["params"] = {{"s1", o.s1}, {"s2", o.s2}, {"rho", o.rho}, {"n", n}};
    j["seed"] = o.seed;
    j["trials"] = o.trials;
    return j;
}

int run_mc_moments(const CommonOpts& o, const std::string& an_out) {
    gmac::ChannelParams p(o.s1, o.s2);
    gmac::CorrelationPoint c(o.rho);
    auto n = static_cast<std::size_t>(o.n);
    gmac::CodewordPair pair = gmac::representative_pair(p, n, o.rho);
    gmac::AnSamples s = gmac::sample_infodensity_sums(p, c, pair, o.trials, o.seed);
    gmac::SequenceMoments emp = gmac::empirical_an_moments(s);
    gmac::SequenceMoments cf = gmac::sequence_moments(p, c, pair.x1, pair.x2);
    json j = mc_base(o, n);
    j["empirical"] = {{"mean1", emp.mean1},   {"mean12", emp.mean12}, {"var1", emp.var1},
                      {"var12", emp.var12},   {"cov1_12", emp.cov1_12}};
    j["closed_form"] = {{"mean1", cf.mean1},  {"mean12", cf.mean12},  {"var1", cf.var1},
                        {"var12", cf.var12},  {"cov1_12", cf.cov1_12}};
    j["t_hat"] = s.t_hat;
    j["type_class_index"] = gmac::type_class_index(pair, n);
    if (!an_out.empty()) {
        std::ofstream bin(an_out, std::ios::binary);
        if (!bin) throw std::invalid_argument("cannot open --an-out file: " + an_out);
        gmac::write_an_stream(bin, s);
        j["an_stream"] = an_out;
    }
    OutputTarget t(o.out);
    t.stream() << j.dump(2) << "\n";
    return 0;
}

int run_mc_bound(const CommonOpts& o, bool converse, std::optional<double> r1_opt,
                 std::optional<double> r2_opt) {
    gmac::ChannelParams p(o.s1, o.s2);
    gmac::CorrelationPoint c(o.rho);
    auto n = static_cast<std::size_t>(o.n);
    double gamma = o.gamma > 0.0 ? o.gamma : gmac::default_gamma(n);
    gmac::MIVector mi = gmac::mi_vector(p, c);
    double r1 = r1_opt.value_or(mi.i1);
    double r2 = r2_opt.value_or(mi.i12 - mi.i1);
    gmac::BoundReport rep;
    if (converse) {
        gmac::CodewordPair pair = gmac::representative_pair(p, n, o.rho);
        rep = gmac::converse_bound(p, c, pair, r1, r2, gamma, o.trials, o.seed);
    } else {
        rep = gmac::achievability_bound(p, c, n, r1, r2, gamma, o.trials, o.seed);
    }
    json j = mc_base(o, n);
    j["kind"] = converse ? "converse" : "achievability";
    j["r1"] = r1;
    j["r2"] = r2;
    j["gamma"] = gamma;
    j["p_hat"] = rep.estimate.p_hat;
    j["std_err"] = rep.estimate.std_err;
    j["slack"] = rep.slack;
    j["bound"] = rep.bound;
    if (!converse) j["power_violation"] = rep.power_violation;
    OutputTarget t(o.out);
    t.stream() << j.dump(2) << "\n";
    return 0;
}

int run_mc_berry_esseen(const CommonOpts& o, std::optional<double> thr1,
                        std::optional<double> thr2) {
    gmac::ChannelParams p(o.s1, o.s2);
    gmac::CorrelationPoint c(o.rho);
    auto n = static_cast<std::size_t>(o.n);
    gmac::CodewordPair pair = gmac::representative_pair(p, n, o.rho);
    gmac::SequenceMoments m = gmac::sequence_moments(p, c, pair.x1, pair.x2);
    double t1 = thr1.value_or(m.mean1), t2 = thr2.value_or(m.mean12);
    gmac::BerryEsseenReport rep =
        gmac::berry_esseen_check(p, c, pair, t1, t2, o.trials, o.seed);
    json j = mc_base(o, n);
    j["kind"] = "berry-esseen";
    j["thr1"] = t1;
    j["thr2"] = t2;
    j["empirical"] = rep.empirical;
    j["gaussian"] = rep.gaussian;
    j["envelope"] = rep.envelope;
    j["t_hat"] = rep.t_hat;
    j["lambda_min"] = rep.lambda_min;
    j["ok"] = rep.ok;
    OutputTarget t(o.out);
    t.stream() << j.dump(2) << "\n";
    if (!rep.ok) throw std::runtime_error("berry-esseen envelope violated");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian multiple-access finite-blocklength region calculator"};
    app.require_subcommand(1);
    CommonOpts o;

    auto* cap = app.add_subcommand("capacity", "first-order capacity region boundary");
    add_channel_flags(cap, o);
    cap->add_option("--grid", o.grid, "number of correlation samples (default 512)");

    auto* glob = app.add_subcommand("global", "finite-n inner/outer region boundary");
    add_channel_flags(glob, o);
    glob->add_option("--rho", o.rho, "input correlation");
    glob->add_option("--rho-grid", o.rho_grid, "comma-separated correlations for the envelope");
    glob->add_option("--n", o.n, "blocklength");
    glob->add_option("--eps", o.eps, "error probability");
    glob->add_option("--offset", o.offset, "third-order offset (nats/use)");
    glob->add_option("--resolution", o.resolution, "boundary rays per region");

    auto* psin = app.add_subcommand("psi-inv", "down-set boundary for a correlation point");
    bool scale_by_sqrt_n = false;
    add_channel_flags(psin, o);
    psin->add_option("--rho", o.rho, "input correlation");
    psin->add_option("--eps", o.eps, "error probability");
    psin->add_option("--n", o.n, "blocklength (used with --scale-by-sqrt-n)");
    psin->add_option("--resolution", o.resolution, "boundary rays");
    psin->add_flag("--scale-by-sqrt-n", scale_by_sqrt_n, "divide coordinates by sqrt(n)");

    auto* loc = app.add_subcommand("local", "local second-order region at a boundary point");
    add_channel_flags(loc, o);
    loc->add_option("--rho", o.rho, "boundary parametrization (0, (0,1), or 1)");
    loc->add_option("--eps", o.eps, "error probability");
    loc->add_option("--resolution", o.resolution, "boundary rays");

    auto* sw = app.add_subcommand("sweep", "feasible second-order norm vs angle of approach");
    add_channel_flags(sw, o);
    sw->add_option("--rho", o.rho, "input correlation in (0,1)");
    sw->add_option("--eps", o.eps, "error probability");
    sw->add_option("--grid", o.grid, "number of angles over [0, 2pi)");
    sw->add_option("--resolution", o.resolution, "boundary rays for the offset");

    auto* su = app.add_subcommand("single-user", "single-user normal approximation");
    add_channel_flags(su, o);
    su->add_option("--n", o.n, "blocklength");
    su->add_option("--eps", o.eps, "error probability");
    su->add_option("--offset", o.offset, "third-order offset (nats)");

    auto* mc = app.add_subcommand("mc", "Monte-Carlo estimators");
    mc->require_subcommand(1);
    std::string an_out;
    std::optional<double> r1_opt, r2_opt, thr1_opt, thr2_opt;
    auto add_mc_flags = [&](CLI::App* cmd) {
        add_channel_flags(cmd, o);
        cmd->add_option("--rho", o.rho, "input correlation");
        cmd->add_option("--n", o.n, "blocklength");
        cmd->add_option("--trials", o.trials, "Monte-Carlo trials");
        cmd->add_option("--seed", o.seed, "RNG seed (env GMAC_SEED as fallback)");
    };
    auto* mom = mc->add_subcommand("moments", "sample moments of the density sums");
    add_mc_flags(mom);
    mom->add_option("--an-out", an_out, "binary stream of raw samples");
    auto* conv = mc->add_subcommand("converse", "threshold-event lower bound");
    add_mc_flags(conv);
    conv->add_option("--r1", r1_opt, "rate of user 1 (default I1(rho))");
    conv->add_option("--r2", r2_opt, "rate of user 2 (default I12(rho) - I1(rho))");
    conv->add_option("--gamma", o.gamma, "threshold slack (default (log n)/(2n))");
    auto* ach = mc->add_subcommand("achievability", "random-coding upper bound");
    add_mc_flags(ach);
    ach->add_option("--r1", r1_opt, "rate of user 1 (default I1(rho))");
    ach->add_option("--r2", r2_opt, "rate of user 2 (default I12(rho) - I1(rho))");
    ach->add_option("--gamma", o.gamma, "threshold slack (default (log n)/(2n))");
    auto* be = mc->add_subcommand("berry-esseen", "Gaussian-approximation envelope check");
    add_mc_flags(be);
    be->add_option("--thr1", thr1_opt, "quadrant threshold 1 (default closed-form mean)");
    be->add_option("--thr2", thr2_opt, "quadrant threshold 2 (default closed-form mean)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (cap->parsed()) return run_capacity(o);
        if (glob->parsed()) return run_global(o);
        if (psin->parsed()) return run_psi_inv(o, scale_by_sqrt_n);
        if (loc->parsed()) return run_local(o);
        if (sw->parsed()) return run_sweep(o);
        if (su->parsed()) return run_single_user(o);
        if (mom->parsed()) return run_mc_moments(o, an_out);
        if (conv->parsed()) return run_mc_bound(o, true, r1_opt, r2_opt);
        if (ach->parsed()) return run_mc_bound(o, false, r1_opt, r2_opt);
        if (be->parsed()) return run_mc_berry_esseen(o, thr1_opt, thr2_opt);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
