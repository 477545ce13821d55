#include "lvlab/cache.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lvlab/arith.hpp"
#include "lvlab/error.hpp"
#include "lvlab/report.hpp"

namespace lvlab::lab {

namespace fs = std::filesystem;

namespace {

json lvalue_to_json(const LValueRecord& r) {
    json j;
    j["version"] = r.version;
    j["d"] = r.d;
    j["s"] = {r.s.real(), r.s.imag()};
    j["method"] = r.method;
    j["value"] = {r.value.real(), r.value.imag()};
    j["est_error"] = r.est_error;
    return j;
}

LValueRecord lvalue_from_json(const json& j) {
    LValueRecord r;
    r.version = j.at("version").get<std::string>();
    r.d = j.at("d").get<std::int64_t>();
    r.s = {j.at("s").at(0).get<double>(), j.at("s").at(1).get<double>()};
    r.method = j.at("method").get<std::string>();
    r.value = {j.at("value").at(0).get<double>(), j.at("value").at(1).get<double>()};
    r.est_error = j.at("est_error").get<double>();
    return r;
}

std::string lvalue_path(const std::string& dir) { return (fs::path(dir) / "lvalues.jsonl").string(); }
std::string eigen_dir(const std::string& dir) { return (fs::path(dir) / "eigen").string(); }
std::string eigen_path(const std::string& dir, int k) {
    return (fs::path(eigen_dir(dir)) / ("k" + std::to_string(k) + ".json")).string();
}

std::vector<std::string> read_lines(const std::string& path) {
    std::vector<std::string> out;
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) out.push_back(line);
    return out;
}

std::string describe(const LValueRecord& r) {
    return "d=" + std::to_string(r.d) + " s=" + num_text(r.s.real()) + (r.s.imag() != 0 ? "+" + num_text(r.s.imag()) + "i" : "") +
           " " + r.method;
}

}  // namespace

LValueCache::LValueCache(std::string dir) : path_(lvalue_path(dir)) {
    for (const auto& line : read_lines(path_)) {
        try {
            auto r = lvalue_from_json(json::parse(line));
            if (r.version == kCodeVersion) {
                records_[{r.d, r.s.real(), r.s.imag(), r.method}] = r;
                continue;
            }
        } catch (const std::exception&) {
        }
        foreign_.push_back(line);
    }
}

std::optional<LValueRecord> LValueCache::find(std::int64_t d, quad::cplx s, const std::string& method) const {
    std::lock_guard lock(mu_);
    auto it = records_.find({d, s.real(), s.imag(), method});
    if (it == records_.end()) return std::nullopt;
    return it->second;
}

void LValueCache::put(const LValueRecord& r) {
    std::lock_guard lock(mu_);
    records_[{r.d, r.s.real(), r.s.imag(), r.method}] = r;
    dirty_ = true;
}

void LValueCache::flush() {
    std::lock_guard lock(mu_);
    if (!dirty_) return;
    std::string out;
    for (const auto& line : foreign_) out += line + "\n";
    for (const auto& [k, r] : records_) out += lvalue_to_json(r).dump() + "\n";
    atomic_write(path_, out);
    dirty_ = false;
}

std::size_t LValueCache::size() const {
    std::lock_guard lock(mu_);
    return records_.size();
}

std::vector<std::string> check_lvalue(const LValueRecord& r) {
    std::vector<std::string> bad;
    if (r.d < 1 || r.d % 2 == 0 || !arith::is_squarefree(std::uint64_t(r.d))) bad.push_back("d is not odd squarefree");
    if (r.method != "afe" && r.method != "hurwitz-oracle") bad.push_back("unknown method '" + r.method + "'");
    if (!std::isfinite(r.value.real()) || !std::isfinite(r.value.imag())) bad.push_back("non-finite value");
    if (!std::isfinite(r.est_error) || r.est_error < 0) bad.push_back("est_error not a non-negative number");
    if (r.s.imag() == 0 && std::abs(r.value.imag()) > std::max(1e-10, 10 * r.est_error))
        bad.push_back("imaginary part " + num_text(r.value.imag()) + " at real s");
    return bad;
}

std::vector<std::string> check_eigenforms(const std::vector<holo::HeckeEigenform>& forms) {
    std::vector<std::string> bad;
    for (const auto& f : forms) {
        const std::string tag = "form " + std::to_string(f.index) + ": ";
        if (f.lambda.size() < 2) {
            bad.push_back(tag + "no coefficients");
            continue;
        }
        if (std::abs(f.lambda[1] - 1) > 1e-9) bad.push_back(tag + "lambda(1) = " + num_text(f.lambda[1]));
        for (std::size_t n = 1; n < f.lambda.size(); ++n) {
            const double bound = arith::num_divisors(n) * (1 + 1e-9);
            if (!std::isfinite(f.lambda[n]) || std::abs(f.lambda[n]) > bound) {
                bad.push_back(tag + "lambda(" + std::to_string(n) + ") = " + num_text(f.lambda[n]) +
                              " violates |lambda(n)| <= d(n)");
                break;
            }
        }
    }
    return bad;
}

void save_eigenforms(const std::string& dir, const holo::EigenResult& r) {
    json j;
    j["version"] = kCodeVersion;
    j["k"] = r.report.k;
    j["N"] = r.forms.empty() ? 0 : r.forms[0].bound();
    json rep;
    rep["dim"] = r.report.dim;
    rep["conditioning"] = r.report.conditioning;
    rep["residuals"] = r.report.residuals;
    rep["combination_c"] = r.report.combination_c;
    rep["precision_bits"] = r.report.precision_bits;
    j["report"] = rep;
    j["forms"] = json::array();
    for (const auto& f : r.forms) {
        json fj;
        fj["index"] = f.index;
        fj["basis_residual"] = f.basis_residual;
        fj["lambda"] = std::vector<double>(f.lambda.begin() + 1, f.lambda.end());
        j["forms"].push_back(fj);
    }
    atomic_write(eigen_path(dir, r.report.k), j.dump() + "\n");
}

namespace {

holo::EigenResult eigen_from_json(const json& j) {
    holo::EigenResult r;
    r.report.k = j.at("k").get<int>();
    const auto& rep = j.at("report");
    r.report.dim = rep.at("dim").get<int>();
    r.report.conditioning = rep.at("conditioning").get<double>();
    r.report.residuals = rep.at("residuals").get<std::vector<double>>();
    r.report.combination_c = rep.at("combination_c").get<int>();
    r.report.precision_bits = rep.at("precision_bits").get<int>();
    for (const auto& fj : j.at("forms")) {
        holo::HeckeEigenform f;
        f.k = r.report.k;
        f.index = fj.at("index").get<int>();
        f.basis_residual = fj.at("basis_residual").get<double>();
        auto lam = fj.at("lambda").get<std::vector<double>>();
        f.lambda.assign(1, 0.0);
        f.lambda.insert(f.lambda.end(), lam.begin(), lam.end());
        r.forms.push_back(std::move(f));
    }
    return r;
}

}  // namespace

std::optional<holo::EigenResult> load_eigenforms(const std::string& dir, int k, std::size_t N) {
    const auto path = eigen_path(dir, k);
    if (!fs::exists(path)) return std::nullopt;
    try {
        const json j = json::parse(read_file(path));
        if (j.at("version").get<std::string>() != kCodeVersion) return std::nullopt;
        auto r = eigen_from_json(j);
        if (int(r.forms.size()) != holo::dim_cusp_forms(k)) return std::nullopt;
        if (!r.forms.empty() && r.forms[0].bound() < N) return std::nullopt;
        if (!check_eigenforms(r.forms).empty()) return std::nullopt;
        return r;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

holo::EigenResult eigenforms_cached(const std::string& dir, int k, std::size_t N) {
    if (!dir.empty())
        if (auto r = load_eigenforms(dir, k, N)) return *r;
    auto r = holo::hecke_eigenforms(k, N);
    if (!dir.empty()) save_eigenforms(dir, r);
    return r;
}

namespace {

quad::QuadLValue recompute(const LValueRecord& r) {
    const auto dq = quad::QuadraticDiscriminant::make(r.d);
    if (r.method == "hurwitz-oracle") return quad::l_value_oracle(dq, r.s);
    return quad::l_value_afe(dq, r.s);
}

}  // namespace

CacheStatus cache_admin(const std::string& command, const std::string& dir, bool force) {
    if (command != "verify" && command != "rebuild" && command != "gc")
        fail(ErrorKind::config, "cache: unknown command '" + command + "' (verify, rebuild, gc)");
    if (!fs::is_directory(dir)) fail(ErrorKind::config, "cache: directory " + dir + " does not exist");
    CacheStatus st;
    st.command = command;

    // L-value records
    const auto lpath = lvalue_path(dir);
    std::vector<std::string> kept;
    bool lchanged = false;
    for (const auto& line : read_lines(lpath)) {
        ++st.records;
        LValueRecord r;
        try {
            r = lvalue_from_json(json::parse(line));
        } catch (const std::exception& e) {
            st.violations.push_back({"lvalues.jsonl", line.substr(0, 80), std::string("unreadable: ") + e.what()});
            if (force && command != "verify") {
                ++st.removed;
                lchanged = true;
            } else {
                kept.push_back(line);
            }
            continue;
        }
        if (command == "gc" && r.version != kCodeVersion) {
            ++st.removed;
            lchanged = true;
            continue;
        }
        auto bad = check_lvalue(r);
        for (const auto& b : bad) st.violations.push_back({"lvalues.jsonl", describe(r), b});
        if (!bad.empty() && command == "rebuild") {
            try {
                auto v = recompute(r);
                r.value = v.value;
                r.est_error = v.est_error;
                r.version = kCodeVersion;
                ++st.rebuilt;
                lchanged = true;
            } catch (const Error& e) {
                st.violations.push_back({"lvalues.jsonl", describe(r), std::string("rebuild failed: ") + e.what()});
            }
        }
        kept.push_back(lvalue_to_json(r).dump());
    }
    if (lchanged) {
        std::string out;
        for (const auto& l : kept) out += l + "\n";
        atomic_write(lpath, out);
    }

    // eigenvalue files
    if (fs::is_directory(eigen_dir(dir))) {
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(eigen_dir(dir)))
            if (e.path().extension() == ".json") files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& p : files) {
            ++st.records;
            const std::string name = "eigen/" + p.filename().string();
            json j;
            holo::EigenResult r;
            try {
                j = json::parse(read_file(p.string()));
                r = eigen_from_json(j);
            } catch (const std::exception& e) {
                st.violations.push_back({name, "", std::string("unreadable: ") + e.what()});
                if (force && command != "verify") {
                    fs::remove(p);
                    ++st.removed;
                }
                continue;
            }
            if (command == "gc" && j.value("version", std::string()) != kCodeVersion) {
                fs::remove(p);
                ++st.removed;
                continue;
            }
            auto bad = check_eigenforms(r.forms);
            if (int(r.forms.size()) != holo::dim_cusp_forms(r.report.k))
                bad.push_back("holds " + std::to_string(r.forms.size()) + " forms, dim S_k = " +
                              std::to_string(holo::dim_cusp_forms(r.report.k)));
            for (const auto& b : bad) st.violations.push_back({name, "k=" + std::to_string(r.report.k), b});
            if (!bad.empty() && command == "rebuild") {
                const std::size_t N = j.value("N", std::size_t(0));
                save_eigenforms(dir, holo::hecke_eigenforms(r.report.k, std::max<std::size_t>(N, 64)));
                ++st.rebuilt;
            }
        }
    }

    if (st.rebuilt) st.status = "rebuilt";
    else if (st.removed) st.status = "collected";
    else if (!st.violations.empty()) st.status = "violations";
    else st.status = "clean";
    return st;
}

}  // namespace lvlab::lab
