#include "lvlab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <random>
#include <thread>

#include "lvlab/arith.hpp"
#include "lvlab/cache.hpp"
#include "lvlab/error.hpp"

namespace lvlab::lab {

namespace fs = std::filesystem;

namespace {

double parse_number(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos == s.size()) return v;
    } catch (const std::exception&) {
    }
    fail(ErrorKind::config, what + ": cannot parse '" + s + "'");
}

const char* family_text(Family f) { return selberg::family_name(f); }

Family parse_family(const std::string& s) {
    if (s == "quad") return Family::quad;
    if (s == "holo") return Family::holo;
    fail(ErrorKind::config, "family must be quad or holo, got '" + s + "'");
}

Statistic parse_statistic(const std::string& s) {
    if (s == "P") return Statistic::P;
    if (s == "A") return Statistic::A;
    if (s == "B") return Statistic::B;
    fail(ErrorKind::config, "statistic must be P, A or B, got '" + s + "'");
}

}  // namespace

void parse_x_policy(const std::string& s, ExperimentConfig& c) {
    if (s == "theorem-window") {
        c.x_policy = XPolicy::theorem_window;
    } else if (s == "cube-root") {
        c.x_policy = XPolicy::cube_root;
    } else {
        c.x_policy = XPolicy::explicit_value;
        c.x_value = parse_number(s, "x policy");
    }
}

void parse_sigma_policy(const std::string& s, ExperimentConfig& c) {
    if (s == "default") {
        c.sigma_policy = SigmaPolicy::default_floor;
    } else if (s == "zero-driven") {
        c.sigma_policy = SigmaPolicy::zero_driven;
    } else {
        c.sigma_policy = SigmaPolicy::explicit_value;
        c.sigma_value = parse_number(s, "sigma policy");
    }
}

std::string x_policy_text(const ExperimentConfig& c) {
    switch (c.x_policy) {
        case XPolicy::theorem_window: return "theorem-window";
        case XPolicy::cube_root: return "cube-root";
        case XPolicy::explicit_value: return num_text(c.x_value);
    }
    return "?";
}

std::string sigma_policy_text(const ExperimentConfig& c) {
    switch (c.sigma_policy) {
        case SigmaPolicy::default_floor: return "default";
        case SigmaPolicy::zero_driven: return "zero-driven";
        case SigmaPolicy::explicit_value: return num_text(c.sigma_value);
    }
    return "?";
}

namespace {

std::vector<int> weights(const ExperimentConfig& c) {
    std::vector<int> ks;
    const int k0 = int(c.scale);
    const int k1 = c.k_max ? c.k_max : k0;
    for (int k = k0; k <= k1; k += 2) ks.push_back(k);
    return ks;
}

void check_writable(const std::string& dir, const std::string& what) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) fail(ErrorKind::config, what + " " + dir + " cannot be created");
    const fs::path probe = fs::path(dir) / ".write-probe";
    {
        std::ofstream out(probe);
        if (!out) fail(ErrorKind::config, what + " " + dir + " is not writable");
    }
    fs::remove(probe, ec);
}

}  // namespace

void validate(const ExperimentConfig& c) {
    if (c.family == Family::quad) {
        if (!(c.scale >= 16) || c.scale != std::floor(c.scale) || c.scale > 1e9)
            fail(ErrorKind::config, "quad scale D must be an integer in [16, 1e9]");
        if (c.k_max) fail(ErrorKind::config, "k range applies to the holo family only");
    } else {
        const int k = int(c.scale);
        if (c.scale != k || k < 12 || k % 2) fail(ErrorKind::config, "holo scale k must be an even integer >= 12");
        if (c.k_max && (c.k_max < k || c.k_max % 2)) fail(ErrorKind::config, "k range end must be even and >= k");
        if (c.statistic == Statistic::B)
            for (int kk : weights(c))
                if (kk % 4 == 2)
                    fail(ErrorKind::config, "statistic B is undefined at k = " + std::to_string(kk) +
                                                ": k = 2 mod 4 gives root number -1 and central value L(1/2,f) = 0");
        if (c.sigma_policy == SigmaPolicy::zero_driven)
            fail(ErrorKind::config, "zero-driven sigma needs zero lists, available for the quad family only");
    }
    if (c.x_policy == XPolicy::explicit_value && !(c.x_value > 1)) fail(ErrorKind::config, "explicit x must exceed 1");
    if (c.sigma_policy == SigmaPolicy::explicit_value && !(c.sigma_value > 0))
        fail(ErrorKind::config, "explicit sigma must be positive");
    if (c.precision < 1 || c.precision > quad::kOracleMaxPrecision)
        fail(ErrorKind::config, "precision must be between 1 and " + std::to_string(quad::kOracleMaxPrecision));
    if (c.workers < 1 || c.workers > 256) fail(ErrorKind::config, "workers must be between 1 and 256");
    if (c.out_dir.empty()) fail(ErrorKind::config, "output directory is empty");
    check_writable(c.out_dir, "output directory");
    if (!c.cache_dir.empty()) check_writable(c.cache_dir, "cache directory");
}

json config_payload(const ExperimentConfig& c) {
    json j;
    j["family"] = family_text(c.family);
    j["scale"] = c.scale;
    j["k_max"] = c.k_max;
    j["statistic"] = stats::statistic_name(c.statistic);
    j["x_policy"] = x_policy_text(c);
    j["sigma_policy"] = sigma_policy_text(c);
    j["precision"] = c.precision;
    j["sample_cap"] = c.sample_cap;
    j["seed"] = c.seed;
    return j;
}

json config_to_json(const ExperimentConfig& c) {
    json j = config_payload(c);
    j["workers"] = c.workers;
    j["cache"] = c.cache_dir;
    j["out"] = c.out_dir;
    j["format"] = c.format == Format::table ? "table" : "structured";
    return j;
}

void config_from_json(const json& j, ExperimentConfig& c) {
    try {
        if (j.contains("family")) c.family = parse_family(j["family"].get<std::string>());
        if (j.contains("scale")) c.scale = j["scale"].get<double>();
        if (j.contains("k_max")) c.k_max = j["k_max"].get<int>();
        if (j.contains("statistic")) c.statistic = parse_statistic(j["statistic"].get<std::string>());
        if (j.contains("x_policy")) {
            const auto& v = j["x_policy"];
            parse_x_policy(v.is_string() ? v.get<std::string>() : num_text(v.get<double>()), c);
        }
        if (j.contains("sigma_policy")) {
            const auto& v = j["sigma_policy"];
            parse_sigma_policy(v.is_string() ? v.get<std::string>() : num_text(v.get<double>()), c);
        }
        if (j.contains("precision")) c.precision = j["precision"].get<int>();
        if (j.contains("sample_cap")) c.sample_cap = j["sample_cap"].get<std::size_t>();
        if (j.contains("workers")) c.workers = j["workers"].get<int>();
        if (j.contains("cache")) c.cache_dir = j["cache"].get<std::string>();
        if (j.contains("out")) c.out_dir = j["out"].get<std::string>();
        if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("format")) {
            auto f = parse_format(j["format"].get<std::string>());
            if (!f) fail(ErrorKind::config, "format must be table or structured");
            c.format = *f;
        }
    } catch (const json::exception& e) {
        fail(ErrorKind::config, std::string("config file: ") + e.what());
    }
}

double family_log_conductor(Family f, double scale) {
    return f == Family::quad ? std::log(scale) : 2 * std::log(scale);
}

double resolve_x(const ExperimentConfig& c, double scale) {
    const double lc = family_log_conductor(c.family, scale);
    switch (c.x_policy) {
        case XPolicy::explicit_value: return c.x_value;
        case XPolicy::cube_root: return std::exp(lc / 3);
        case XPolicy::theorem_window: return std::exp(lc * std::pow(std::log(lc), -0.25));
    }
    return 0;
}

double resolve_sigma(const ExperimentConfig& c, double x) {
    if (c.sigma_policy == SigmaPolicy::explicit_value) return c.sigma_value;
    return 4 / std::log(x);
}

std::vector<std::int64_t> sample_members(std::int64_t D, std::size_t cap, std::uint64_t seed) {
    auto members = arith::enumerate_discriminants(D).members;
    if (cap && cap < members.size()) {
        std::mt19937_64 rng(seed);
        // partial Fisher-Yates; std::shuffle's draw order varies across standard libraries
        for (std::size_t i = 0; i < cap; ++i) {
            const std::size_t j = i + std::size_t(rng() % (members.size() - i));
            std::swap(members[i], members[j]);
        }
        members.resize(cap);
        std::sort(members.begin(), members.end());
    }
    return members;
}

std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

struct Unit {
    std::string id;
    double scale = 0;  // D or k of this member
    std::int64_t d = 0;
    const holo::HeckeEigenform* form = nullptr;
    // results
    std::string status = "ok";
    std::string message;
    bool included = false;
    double raw = 0;
    double sigma = 0;
    bool done = false;
};

std::string file_safe(const std::string& id) {
    std::string s;
    for (char ch : id) s += std::isalnum(static_cast<unsigned char>(ch)) ? ch : '_';
    return s;
}

json unit_to_json(const Unit& u) {
    json j;
    j["id"] = u.id;
    j["status"] = u.status;
    j["message"] = u.message;
    j["included"] = u.included;
    j["raw"] = u.included ? json(u.raw) : json(nullptr);
    j["sigma"] = u.sigma;
    return j;
}

bool unit_from_file(const std::string& path, Unit& u) {
    try {
        const json j = json::parse(read_file(path));
        if (j.at("id").get<std::string>() != u.id) return false;
        u.status = j.at("status").get<std::string>();
        u.message = j.at("message").get<std::string>();
        u.included = j.at("included").get<bool>();
        if (u.included) u.raw = j.at("raw").get<double>();
        u.sigma = j.at("sigma").get<double>();
        u.done = true;
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

class Evaluator {
public:
    Evaluator(const ExperimentConfig& c, LValueCache* cache) : c_(c), cache_(cache) {}

    double quad_l(const quad::QuadraticDiscriminant& dq, double s) const {
        const bool oracle = c_.precision > 15;
        const std::string method = oracle ? "hurwitz-oracle" : "afe";
        if (cache_)
            if (auto r = cache_->find(dq.d, {s, 0}, method)) return r->value.real();
        const auto v = oracle ? quad::l_value_oracle(dq, {s, 0}, c_.precision) : quad::l_value_afe(dq, {s, 0});
        if (cache_) cache_->put({kCodeVersion, dq.d, {s, 0}, method, v.value, v.est_error});
        return v.value.real();
    }

    double member_l(const Unit& u, double s) const {
        if (u.form) return holo::l_value_holo(*u.form, {s, 0}).value.real();
        return quad_l(quad::QuadraticDiscriminant::make(u.d), s);
    }

    void evaluate(Unit& u) const {
        const double x = resolve_x(c_, u.scale);
        selberg::Member m = u.form ? selberg::Member::of(*u.form)
                                   : selberg::Member::of(quad::QuadraticDiscriminant::make(u.d), u.scale);
        switch (c_.statistic) {
            case Statistic::P: {
                u.raw = selberg::prime_sum_stat(m, x).core();
                u.included = true;
                break;
            }
            case Statistic::A: {
                double sigma = resolve_sigma(c_, x);
                if (c_.sigma_policy == SigmaPolicy::zero_driven) {
                    const auto zl = quad::find_zeros(m.dq, 10.0);
                    sigma = selberg::sigma_x(selberg::critical_zeros(zl), x).sigma;
                }
                u.sigma = sigma;
                const double L = member_l(u, 0.5 + sigma);
                if (!(L > 0)) {
                    u.status = "flagged";
                    u.message = "L(1/2+sigma) = " + num_text(L) + " is not positive";
                    return;
                }
                u.raw = std::log(L);
                u.included = true;
                break;
            }
            case Statistic::B: {
                const double L = member_l(u, 0.5);
                if (std::abs(L) < selberg::kNearZeroCentral) {
                    u.status = "flagged";
                    u.message = "central value below 1e-12";
                    return;
                }
                if (L < 0) {
                    u.status = "flagged";
                    u.message = "negative central value";
                }
                u.raw = std::log(std::abs(L));
                u.included = true;
                break;
            }
        }
    }

private:
    const ExperimentConfig& c_;
    LValueCache* cache_;
};

std::string iso_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::size_t holo_coefficients(const ExperimentConfig& c, int k) {
    const int dim = holo::dim_cusp_forms(k);
    std::size_t N = std::max<std::size_t>(64, 5 * std::size_t(dim) + 5);
    const double x = resolve_x(c, k);
    if (c.statistic == Statistic::P) N = std::max(N, std::size_t(std::floor(x)) + 1);
    const double s = c.statistic == Statistic::B ? 0.5 : 0.5 + resolve_sigma(c, x);
    return std::max(N, holo::coefficient_demand(k, {s, 0}) + 1);
}

}  // namespace

ExperimentResult run(const ExperimentConfig& c) {
    const auto wall0 = std::chrono::steady_clock::now();
    const std::clock_t cpu0 = std::clock();
    const std::string started = iso_now();
    validate(c);

    const json payload = config_payload(c);
    const std::string hash = fnv1a_hex(std::string(kCodeVersion) + payload.dump());
    const std::string unit_dir = (fs::path(c.out_dir) / ("units-" + hash)).string();
    fs::create_directories(unit_dir);

    std::vector<holo::EigenResult> spaces;
    std::vector<Unit> units;
    if (c.family == Family::quad) {
        for (auto d : sample_members(std::int64_t(c.scale), c.sample_cap, c.seed)) {
            Unit u;
            u.d = d;
            u.scale = c.scale;
            u.id = "d=" + std::to_string(d);
            units.push_back(u);
        }
    } else {
        // basis construction is serial, one k at a time
        for (int k : weights(c)) spaces.push_back(eigenforms_cached(c.cache_dir, k, holo_coefficients(c, k)));
        for (const auto& sp : spaces)
            for (const auto& f : sp.forms) {
                Unit u;
                u.form = &f;
                u.scale = f.k;
                u.id = "k=" + std::to_string(f.k) + "#" + std::to_string(f.index);
                units.push_back(u);
            }
    }
    if (units.empty()) fail(ErrorKind::config, "the requested family is empty");

    ExperimentResult res;
    auto& man = res.manifest;
    std::vector<std::string> unit_paths(units.size());
    for (std::size_t i = 0; i < units.size(); ++i) {
        unit_paths[i] = (fs::path(unit_dir) / (file_safe(units[i].id) + ".json")).string();
        if (fs::exists(unit_paths[i]) && unit_from_file(unit_paths[i], units[i])) ++man.resumed;
    }

    std::unique_ptr<LValueCache> cache;
    if (!c.cache_dir.empty() && c.family == Family::quad) cache = std::make_unique<LValueCache>(c.cache_dir);
    const Evaluator eval(c, cache.get());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= units.size()) return;
            Unit& u = units[i];
            if (u.done) continue;
            try {
                eval.evaluate(u);
            } catch (const Error& e) {
                u.status = "error";
                u.message = e.what();
                u.included = false;
            }
            u.done = true;
            atomic_write(unit_paths[i], unit_to_json(u).dump() + "\n");
        }
    };
    const int nw = std::min<int>(c.workers, int(units.size()));
    if (nw <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nw; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (cache) cache->flush();

    // report
    Report& rep = res.report;
    rep.kind = "distribution";
    rep.params = payload;
    const double x0 = resolve_x(c, c.scale);
    rep.params["x"] = x0;
    if (c.statistic == Statistic::A && c.sigma_policy != SigmaPolicy::zero_driven)
        rep.params["sigma"] = resolve_sigma(c, x0);
    rep.params["members"] = units.size();
    rep.columns = {"id", "raw", "normalized", "status"};

    std::vector<double> values;
    std::vector<std::string> ids;
    std::size_t excluded = 0, negative = 0;
    for (const auto& u : units) {
        man.members.push_back({u.id, u.status, u.message});
        json row = json::array({u.id});
        if (u.included) {
            const auto norm = stats::make_normalization(c.family, u.scale);
            const double v = (u.raw + norm.mean_shift) / std::sqrt(norm.log_log_scale);
            values.push_back(v);
            ids.push_back(u.id);
            row.push_back(u.raw);
            row.push_back(v);
        } else {
            ++excluded;
            row.push_back(nullptr);
            row.push_back(nullptr);
        }
        if (u.message == "negative central value") ++negative;
        row.push_back(u.status);
        rep.rows.push_back(row);
    }

    const auto norm = stats::make_normalization(c.family, c.scale, c.statistic == Statistic::A ? resolve_sigma(c, x0) : 0,
                                                x0);
    rep.summary["statistic"] = stats::statistic_name(c.statistic);
    rep.summary["included"] = values.size();
    rep.summary["excluded"] = excluded;
    rep.summary["log_log_scale"] = norm.log_log_scale;
    rep.summary["mean_shift"] = norm.mean_shift;
    if (values.empty()) {
        rep.flags.push_back("empty sample: every member was excluded");
    } else {
        res.sample.family = c.family;
        res.sample.statistic = c.statistic;
        res.sample.values = values;
        res.sample.ids = ids;
        res.sample.norm = norm;
        res.sample.excluded = excluded;
        if (values.size() >= 2) {
            rep.summary["distribution"] = to_json(stats::distribution_report(res.sample));
        } else {
            rep.flags.push_back("singleton sample: distribution statistics omitted");
        }
        if (c.statistic != Statistic::P)
            rep.summary["tail_check"] = to_json(stats::tail_bound_check(res.sample, {0.5, 1.0, 1.5}));
        if (c.statistic == Statistic::P) {
            rep.summary["predicted_variance_loglog_x"] = stats::moment_prediction(1, x0);
            rep.summary["predicted_fourth_moment"] = stats::moment_prediction(2, x0);
        }
    }
    if (excluded) rep.flags.push_back("excluded members: " + std::to_string(excluded));
    if (negative) rep.flags.push_back("negative central values (log|L| used): " + std::to_string(negative));

    const std::string report_path =
        (fs::path(c.out_dir) / (c.format == Format::table ? "report.txt" : "report.json")).string();
    atomic_write(report_path, render(rep, c.format));

    man.config = config_to_json(c);
    man.artifacts = {report_path, unit_dir};
    man.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
    man.cpu_seconds = double(std::clock() - cpu0) / CLOCKS_PER_SEC;

    json mj;
    mj["schema_version"] = kSchemaVersion;
    mj["code_version"] = kCodeVersion;
    mj["config"] = man.config;
    mj["started"] = started;
    mj["finished"] = iso_now();
    mj["wall_seconds"] = man.wall_seconds;
    mj["cpu_seconds"] = man.cpu_seconds;
    mj["resumed"] = man.resumed;
    mj["artifacts"] = man.artifacts;
    mj["members"] = json::array();
    for (const auto& m : man.members) {
        json e;
        e["id"] = m.id;
        e["status"] = m.status;
        if (!m.message.empty()) e["message"] = m.message;
        mj["members"].push_back(e);
    }
    atomic_write((fs::path(c.out_dir) / "manifest.json").string(), mj.dump(2) + "\n");
    return res;
}

}  // namespace lvlab::lab
