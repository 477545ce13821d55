// lvlab: command-line front end for the L-value laboratory.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "lvlab/arith.hpp"
#include "lvlab/cache.hpp"
#include "lvlab/error.hpp"
#include "lvlab/experiment.hpp"
#include "lvlab/holo.hpp"
#include "lvlab/quad.hpp"
#include "lvlab/report.hpp"
#include "lvlab/selberg.hpp"
#include "lvlab/stats.hpp"

using namespace lvlab;
using lab::json;

namespace {

struct Common {
    std::string config_file;
    std::string family, x_policy, sigma_policy, out, cache, format;
    std::optional<double> scale;
    std::optional<int> precision, workers;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config_file, "JSON config file (flags override it)");
    sub->add_option("--family", c.family, "quad or holo");
    sub->add_option("--scale", c.scale, "D for quad, k for holo");
    sub->add_option("--x-policy", c.x_policy, "theorem-window, cube-root or a number");
    sub->add_option("--sigma-policy", c.sigma_policy, "default, zero-driven or a number");
    sub->add_option("--precision", c.precision, "digits for oracle evaluations");
    sub->add_option("--workers", c.workers, "worker threads");
    sub->add_option("--out", c.out, "output directory");
    sub->add_option("--cache", c.cache, "cache directory");
    sub->add_option("--seed", c.seed, "seed for subsampling");
    sub->add_option("--format", c.format, "table or structured");
}

// defaults < config file < flags
lab::ExperimentConfig build_config(const Common& c) {
    lab::ExperimentConfig cfg;
    if (!c.config_file.empty()) {
        json j;
        try {
            j = json::parse(lab::read_file(c.config_file));
        } catch (const json::exception& e) {
            fail(ErrorKind::config, "config file " + c.config_file + ": " + e.what());
        } catch (const Error& e) {
            fail(ErrorKind::config, e.what());
        }
        lab::config_from_json(j, cfg);
    }
    json flags = json::object();
    if (!c.family.empty()) flags["family"] = c.family;
    if (c.scale) flags["scale"] = *c.scale;
    if (!c.x_policy.empty()) flags["x_policy"] = c.x_policy;
    if (!c.sigma_policy.empty()) flags["sigma_policy"] = c.sigma_policy;
    if (c.precision) flags["precision"] = *c.precision;
    if (c.workers) flags["workers"] = *c.workers;
    if (!c.out.empty()) flags["out"] = c.out;
    if (!c.cache.empty()) flags["cache"] = c.cache;
    if (c.seed) flags["seed"] = *c.seed;
    if (!c.format.empty()) flags["format"] = c.format;
    lab::config_from_json(flags, cfg);
    return cfg;
}

void emit(const lab::Report& r, const lab::ExperimentConfig& cfg, bool to_file) {
    const std::string text = lab::render(r, cfg.format);
    std::cout << text;
    if (to_file) {
        const auto name = r.kind + (cfg.format == lab::Format::table ? ".txt" : ".json");
        lab::atomic_write((std::filesystem::path(cfg.out_dir) / name).string(), text);
    }
}

int run_experiment(const Common& c, std::optional<std::string> statistic, std::optional<std::size_t> cap) {
    auto cfg = build_config(c);
    if (statistic) lab::config_from_json(json{{"statistic", *statistic}}, cfg);
    if (cap) cfg.sample_cap = *cap;
    auto res = lab::run(cfg);
    std::cout << lab::render(res.report, cfg.format);
    std::cerr << "members " << res.manifest.members.size() << ", resumed " << res.manifest.resumed << ", wall "
              << lab::num_text(std::round(res.manifest.wall_seconds * 100) / 100) << " s; report in "
              << res.manifest.artifacts.front() << "\n";
    return 0;
}

std::vector<std::int64_t> family_sample(const lab::ExperimentConfig& cfg) {
    return lab::sample_members(std::int64_t(cfg.scale), cfg.sample_cap, cfg.seed);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lvlab: central values and low-lying zeros of quadratic-character and level-1 Hecke L-functions"};
    app.require_subcommand(1);

    Common common;

    auto* disc = app.add_subcommand("discriminants", "list s(D): odd squarefree d in (D/2, D]");
    add_common(disc, common);

    auto* eig = app.add_subcommand("eigenforms", "Hecke eigenbasis of S_k with certification");
    add_common(eig, common);
    std::size_t eig_n = 100;
    eig->add_option("--coefficients", eig_n, "number of lambda(n) to compute");

    auto* lv = app.add_subcommand("lvalues", "L(s) for one member");
    add_common(lv, common);
    std::int64_t lv_d = 1;
    int lv_index = 0;
    double lv_s = 0.5, lv_t = 0;
    std::string lv_method = "both";
    lv->add_option("--d", lv_d, "odd squarefree d (quad)");
    lv->add_option("--index", lv_index, "form index in H_k (holo)");
    lv->add_option("--s", lv_s, "real part of s");
    lv->add_option("--t", lv_t, "imaginary part of s");
    lv->add_option("--method", lv_method, "oracle, afe or both (quad)");

    auto* zer = app.add_subcommand("zeros", "zeros of L(1/2 + it, chi_8d) for 0 < t <= T");
    add_common(zer, common);
    std::int64_t z_d = 1;
    double z_T = 30;
    zer->add_option("--d", z_d, "odd squarefree d");
    zer->add_option("--height", z_T, "height T");

    auto* ps = app.add_subcommand("primesums", "prime-sum statistic P over a family");
    add_common(ps, common);
    std::optional<std::size_t> ps_cap;
    ps->add_option("--sample", ps_cap, "subsample size (0 keeps all)");

    auto* dist = app.add_subcommand("distribution", "normalized statistic A, B or P with distribution report");
    add_common(dist, common);
    std::string dist_stat = "A";
    std::optional<std::size_t> dist_cap;
    dist->add_option("--statistic", dist_stat, "P, A or B");
    dist->add_option("--sample", dist_cap, "subsample size (0 keeps all)");

    auto* dens = app.add_subcommand("density", "one-level density of low-lying zeros (quad)");
    add_common(dens, common);
    std::size_t dens_cap = 200;
    double dens_T = 30;
    std::string dens_test = "fejer";
    dens->add_option("--sample", dens_cap, "members sampled from s(D)");
    dens->add_option("--height", dens_T, "zero search height");
    dens->add_option("--test", dens_test, "fejer or gaussian-cosine");

    auto* tail = app.add_subcommand("tailcheck", "upper-tail frequencies of B (or A) against the Gaussian");
    add_common(tail, common);
    std::string tail_stat = "B";
    std::optional<std::size_t> tail_cap;
    tail->add_option("--statistic", tail_stat, "B or A");
    tail->add_option("--sample", tail_cap, "subsample size (0 keeps all)");

    auto* ver = app.add_subcommand("verify-identities", "decomposition residuals, upper-bound gaps, explicit formula");
    add_common(ver, common);
    std::size_t ver_cap = 0;
    ver->add_option("--sample", ver_cap, "subsample size (0 keeps all)");

    auto* cch = app.add_subcommand("cache", "cache administration");
    add_common(cch, common);
    std::string cache_cmd;
    bool cache_force = false;
    cch->add_option("command", cache_cmd, "verify, rebuild or gc")->required();
    cch->add_flag("--force", cache_force, "also remove unreadable records");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_code(ErrorKind::config);
    }

    try {
        if (*disc) {
            auto cfg = build_config(common);
            const auto fam = arith::enumerate_discriminants(std::int64_t(cfg.scale));
            lab::Report r;
            r.kind = "discriminants";
            r.params["D"] = fam.D;
            r.columns = {"d", "conductor"};
            for (auto d : fam.members) r.rows.push_back(json::array({d, 8 * d}));
            r.summary["count"] = fam.members.size();
            emit(r, cfg, !common.out.empty());
        } else if (*eig) {
            auto cfg = build_config(common);
            if (!common.family.empty() && cfg.family != selberg::Family::holo)
                fail(ErrorKind::config, "eigenforms applies to the holo family");
            const int k = int(cfg.scale);
            if (cfg.scale != k || k % 2 || k < 0) fail(ErrorKind::config, "k must be a non-negative even integer");
            const auto res = lab::eigenforms_cached(cfg.cache_dir, k, eig_n);
            lab::Report r;
            r.kind = "eigenforms";
            r.params["k"] = k;
            r.params["coefficients"] = eig_n;
            r.columns = {"index", "lambda(2)", "lambda(3)", "lambda(5)", "residual"};
            for (const auto& f : res.forms)
                r.rows.push_back(json::array({f.index, f.lambda[2], f.lambda[3], f.lambda[5], f.basis_residual}));
            r.summary["dim"] = res.report.dim;
            r.summary["conditioning"] = res.report.conditioning;
            r.summary["combination_c"] = res.report.combination_c;
            r.summary["precision_bits"] = res.report.precision_bits;
            for (const auto& b : lab::check_eigenforms(res.forms)) r.flags.push_back(b);
            emit(r, cfg, !common.out.empty());
        } else if (*lv) {
            auto cfg = build_config(common);
            lab::Report r;
            r.kind = "lvalues";
            r.columns = {"member", "s", "value_re", "value_im", "method", "est_error"};
            const quad::cplx s{lv_s, lv_t};
            const std::string stext = lab::num_text(lv_s) + (lv_t != 0 ? "+" + lab::num_text(lv_t) + "i" : "");
            if (cfg.family == selberg::Family::quad) {
                const auto dq = quad::QuadraticDiscriminant::make(lv_d);
                r.params["d"] = lv_d;
                if (lv_method != "oracle" && lv_method != "afe" && lv_method != "both")
                    fail(ErrorKind::config, "method must be oracle, afe or both");
                auto row = [&](const quad::QuadLValue& v) {
                    r.rows.push_back(json::array({"d=" + std::to_string(lv_d), stext, v.value.real(), v.value.imag(),
                                                  quad::method_name(v.method), v.est_error}));
                };
                if (lv_method != "afe") row(quad::l_value_oracle(dq, s, cfg.precision));
                if (lv_method != "oracle") row(quad::l_value_afe(dq, s));
            } else {
                const int k = int(cfg.scale);
                const std::size_t N = holo::coefficient_demand(k, s) + 1;
                const auto res = lab::eigenforms_cached(cfg.cache_dir, k, std::max<std::size_t>(N, 64));
                if (lv_index < 0 || lv_index >= int(res.forms.size()))
                    fail(ErrorKind::config, "form index out of range for dim S_k = " + std::to_string(res.forms.size()));
                const auto v = holo::l_value_holo(res.forms[lv_index], s);
                r.params["k"] = k;
                r.rows.push_back(json::array({"k=" + std::to_string(k) + "#" + std::to_string(lv_index), stext,
                                              v.value.real(), v.value.imag(), "afe", v.est_error}));
            }
            emit(r, cfg, !common.out.empty());
        } else if (*zer) {
            auto cfg = build_config(common);
            const auto dq = quad::QuadraticDiscriminant::make(z_d);
            quad::ZeroSearchOptions opt;
            opt.supported_height = std::max(quad::kDefaultSupportedHeight, z_T);
            const auto zl = quad::find_zeros(dq, z_T, opt);
            lab::Report r;
            r.kind = "zeros";
            r.params["d"] = z_d;
            r.params["T"] = z_T;
            r.columns = {"n", "gamma"};
            for (std::size_t i = 0; i < zl.ordinates.size(); ++i) r.rows.push_back(json::array({i + 1, zl.ordinates[i]}));
            r.summary["count"] = zl.ordinates.size();
            r.summary["gamma_min"] = zl.gamma_min;
            r.summary["count_check"] = zl.count_check;
            r.summary["grid_step"] = zl.grid_step;
            if (std::abs(zl.count_check) > 2) r.flags.push_back("count_check beyond +-2");
            emit(r, cfg, !common.out.empty());
        } else if (*ps) {
            return run_experiment(common, "P", ps_cap);
        } else if (*dist) {
            return run_experiment(common, dist_stat, dist_cap);
        } else if (*tail) {
            if (tail_stat != "A" && tail_stat != "B") fail(ErrorKind::config, "tailcheck takes statistic A or B");
            return run_experiment(common, tail_stat, tail_cap);
        } else if (*dens) {
            auto cfg = build_config(common);
            if (cfg.family != selberg::Family::quad)
                fail(ErrorKind::config, "density needs zero lists, available for the quad family only");
            stats::TestFunction tf;
            if (dens_test == "fejer") tf = stats::TestFunction::fejer;
            else if (dens_test == "gaussian-cosine") tf = stats::TestFunction::gaussian_cosine;
            else fail(ErrorKind::config, "test must be fejer or gaussian-cosine");
            cfg.sample_cap = dens_cap;
            std::vector<stats::ZeroCoverage> zc;
            for (auto d : family_sample(cfg)) {
                const auto dq = quad::QuadraticDiscriminant::make(d);
                quad::ZeroSearchOptions opt;
                opt.supported_height = std::max(quad::kDefaultSupportedHeight, dens_T);
                const auto zl = quad::find_zeros(dq, dens_T, opt);
                zc.push_back({"d=" + std::to_string(d), zl.ordinates, zl.T, double(dq.q)});
            }
            const auto res = stats::one_level_density(zc, selberg::Family::quad, cfg.scale, tf);
            lab::Report r;
            r.kind = "density";
            r.params["D"] = cfg.scale;
            r.params["sample"] = zc.size();
            r.params["height"] = dens_T;
            r.params["seed"] = cfg.seed;
            r.summary = lab::to_json(res);
            if (!res.conforming) r.flags.push_back("non-conforming test function: Fourier transform not compactly supported");
            emit(r, cfg, !common.out.empty());
        } else if (*ver) {
            auto cfg = build_config(common);
            if (common.x_policy.empty()) cfg.x_policy = lab::XPolicy::cube_root;
            lab::Report r;
            r.kind = "identities";
            r.params = lab::config_payload(cfg);
            r.columns = {"id", "x", "sigma", "lhs", "main", "err1", "err2", "residual", "gap"};
            std::vector<double> lhs, main;
            std::size_t within = 0, total = 0, flagged = 0;
            double min_gap = std::numeric_limits<double>::infinity();
            auto one = [&](const selberg::Member& m, double x) {
                try {
                    const auto dec = selberg::decomposition_residual(m, x);
                    const auto gap = selberg::upper_bound_gap(m, x);
                    lhs.push_back(dec.lhs);
                    main.push_back(dec.main);
                    ++total;
                    if (std::abs(dec.residual()) <= 5 * dec.budget()) ++within;
                    if (!gap.near_zero) min_gap = std::min(min_gap, gap.gap);
                    r.rows.push_back(json::array({m.id(), x, dec.sigma, dec.lhs, dec.main, dec.err1, dec.err2,
                                                  dec.residual(), gap.near_zero ? json("near-zero") : json(gap.gap)}));
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::sign) throw;
                    ++flagged;
                }
            };
            std::vector<holo::EigenResult> spaces;
            if (cfg.family == selberg::Family::quad) {
                const double x = lab::resolve_x(cfg, cfg.scale);
                for (auto d : family_sample(cfg)) one(selberg::Member::of(quad::QuadraticDiscriminant::make(d), cfg.scale), x);
            } else {
                const int k = int(cfg.scale);
                const double x = lab::resolve_x(cfg, k);
                std::size_t N = std::max<std::size_t>(std::size_t(x * x * x) + 1, 64);
                N = std::max(N, holo::coefficient_demand(k, {0.5, 0}) + 1);
                spaces.push_back(lab::eigenforms_cached(cfg.cache_dir, k, N));
                for (const auto& f : spaces.back().forms) one(selberg::Member::of(f), x);
            }
            r.summary["members"] = total;
            r.summary["sign_flagged"] = flagged;
            if (total) r.summary["within_5x_budget"] = double(within) / double(total);
            if (total >= 2) r.summary["corr_lhs_main"] = stats::pearson(lhs, main);
            r.summary["c0"] = std::isfinite(min_gap) ? json(-min_gap) : json("n/a");
            if (cfg.family == selberg::Family::quad) {
                const auto d1 = quad::QuadraticDiscriminant::make(1);
                quad::ZeroSearchOptions opt;
                opt.supported_height = 500;
                const auto zl = quad::find_zeros(d1, 420, opt);
                const auto ef = selberg::explicit_formula(d1, 20, 0.25, zl);
                json e;
                e["d"] = 1;
                e["x"] = 20;
                e["s"] = 0.25;
                e["zero_height"] = zl.T;
                e["zeros"] = zl.ordinates.size();
                e["lhs"] = ef.lhs;
                e["prime_sum"] = ef.prime_sum;
                e["zero_sum"] = ef.zero_sum;
                e["trivial_sum"] = ef.trivial_sum;
                e["tail_bound"] = ef.tail_bound;
                e["residual"] = ef.residual;
                r.summary["explicit_formula"] = e;
            }
            emit(r, cfg, !common.out.empty());
        } else if (*cch) {
            auto cfg = build_config(common);
            if (cfg.cache_dir.empty()) fail(ErrorKind::config, "cache needs --cache <dir>");
            const auto st = lab::cache_admin(cache_cmd, cfg.cache_dir, cache_force);
            lab::Report r;
            r.kind = "cache";
            r.params["command"] = st.command;
            r.params["directory"] = cfg.cache_dir;
            r.columns = {"file", "record", "reason"};
            for (const auto& v : st.violations) r.rows.push_back(json::array({v.file, v.record, v.reason}));
            r.summary["records"] = st.records;
            r.summary["violations"] = st.violations.size();
            r.summary["rebuilt"] = st.rebuilt;
            r.summary["removed"] = st.removed;
            r.summary["status"] = st.status;
            emit(r, cfg, false);
            return st.command == "verify" && !st.violations.empty() ? 1 : 0;
        }
    } catch (const Error& e) {
        std::cerr << "lvlab: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "lvlab: internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
