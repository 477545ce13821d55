#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "lvlab/arith.hpp"
#include "lvlab/cache.hpp"
#include "lvlab/error.hpp"
#include "lvlab/experiment.hpp"
#include "lvlab/report.hpp"

using namespace lvlab;
namespace fs = std::filesystem;
using lab::json;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("lvlab-test-" + std::to_string(::getpid()) + "-" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) { return lab::read_file(p.string()); }

int run_cli(const std::string& args) {
    const std::string cmd = std::string(LVLAB_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

lab::ExperimentConfig quad_config(const fs::path& root, const std::string& out) {
    lab::ExperimentConfig c;
    c.family = lab::Family::quad;
    c.scale = 1000;
    c.statistic = lab::Statistic::P;
    c.out_dir = (root / out).string();
    c.cache_dir = (root / "cache").string();
    return c;
}

}  // namespace

TEST_CASE("quad smoke run covers every member") {
    const auto root = scratch("smoke");
    const auto c = quad_config(root, "out");
    const auto res = lab::run(c);
    const auto fam = arith::enumerate_discriminants(1000).members;
    REQUIRE(res.manifest.members.size() == fam.size());
    for (std::size_t i = 0; i < fam.size(); ++i) {
        CHECK(res.manifest.members[i].id == "d=" + std::to_string(fam[i]));
        CHECK(res.manifest.members[i].status == "ok");
    }
    CHECK(res.sample.values.size() == fam.size());
    CHECK(fs::exists(root / "out" / "report.json"));
    CHECK(fs::exists(root / "out" / "manifest.json"));
    const auto rep = json::parse(slurp(root / "out" / "report.json"));
    CHECK(rep["schema_version"] == lab::kSchemaVersion);
    CHECK(rep["kind"] == "distribution");
    CHECK(rep["rows"].size() == fam.size());
    const auto man = json::parse(slurp(root / "out" / "manifest.json"));
    CHECK(man.contains("wall_seconds"));
    CHECK(man["config"]["scale"] == 1000.0);
    fs::remove_all(root);
}

TEST_CASE("reproducible reports") {
    const auto root = scratch("repro");
    auto a = quad_config(root, "a");
    auto b = quad_config(root, "b");
    a.statistic = b.statistic = lab::Statistic::A;
    b.workers = 3;
    b.cache_dir = (root / "other-cache").string();
    lab::run(a);
    lab::run(b);
    CHECK(slurp(root / "a" / "report.json") == slurp(root / "b" / "report.json"));
    lab::run(a);
    CHECK(slurp(root / "a" / "report.json") == slurp(root / "b" / "report.json"));
    a.format = b.format = lab::Format::table;
    lab::run(a);
    lab::run(b);
    CHECK(slurp(root / "a" / "report.txt") == slurp(root / "b" / "report.txt"));
    fs::remove_all(root);
}

TEST_CASE("interrupted runs resume") {
    const auto root = scratch("resume");
    auto c = quad_config(root, "out");
    c.statistic = lab::Statistic::A;
    const auto first = lab::run(c);
    CHECK(first.manifest.resumed == 0);
    const std::string before = slurp(root / "out" / "report.json");
    const fs::path units = first.manifest.artifacts.at(1);
    std::size_t removed = 0, total = 0;
    for (const auto& e : fs::directory_iterator(units))
        if (total++ % 3 == 0) {
            fs::remove(e.path());
            ++removed;
        }
    const auto second = lab::run(c);
    CHECK(second.manifest.resumed == total - removed);
    CHECK(slurp(root / "out" / "report.json") == before);
    const auto third = lab::run(c);
    CHECK(third.manifest.resumed == total);
    fs::remove_all(root);
}

TEST_CASE("holo singleton sample") {
    const auto root = scratch("holo");
    lab::ExperimentConfig c;
    c.family = lab::Family::holo;
    c.scale = 12;
    c.statistic = lab::Statistic::B;
    c.out_dir = (root / "out").string();
    const auto res = lab::run(c);
    CHECK(res.manifest.members.size() == 1);
    CHECK(res.sample.values.size() == 1);
    bool singleton = false;
    for (const auto& f : res.report.flags) singleton |= f.find("singleton") != std::string::npos;
    CHECK(singleton);
    fs::remove_all(root);
}

TEST_CASE("configuration validation") {
    lab::ExperimentConfig c;
    c.family = lab::Family::holo;
    c.scale = 14;
    c.statistic = lab::Statistic::B;
    c.out_dir = scratch("cfg").string();
    try {
        lab::validate(c);
        FAIL("expected a config error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::config);
        CHECK(std::string(e.what()).find("central value L(1/2,f) = 0") != std::string::npos);
        CHECK(exit_code(e.kind()) == 2);
    }
    c.scale = 16;
    CHECK_NOTHROW(lab::validate(c));
    c.sigma_policy = lab::SigmaPolicy::zero_driven;
    CHECK_THROWS_AS(lab::validate(c), Error);
    c.sigma_policy = lab::SigmaPolicy::default_floor;
    c.out_dir = "/proc/lvlab-not-writable";
    CHECK_THROWS_AS(lab::validate(c), Error);
    CHECK(exit_code(ErrorKind::resource) == 3);
    CHECK(exit_code(ErrorKind::invariant) == 4);
}

TEST_CASE("x and sigma policies") {
    lab::ExperimentConfig c;
    c.scale = 1e5;
    lab::parse_x_policy("cube-root", c);
    CHECK(lab::resolve_x(c, 1e5) == doctest::Approx(std::cbrt(1e5)));
    lab::parse_x_policy("theorem-window", c);
    const double lc = std::log(1e5);
    CHECK(lab::resolve_x(c, 1e5) == doctest::Approx(std::exp(lc * std::pow(std::log(lc), -0.25))));
    lab::parse_x_policy("40", c);
    CHECK(lab::resolve_x(c, 1e5) == 40);
    CHECK(lab::resolve_sigma(c, 40) == doctest::Approx(4 / std::log(40.0)));
    lab::parse_sigma_policy("0.3", c);
    CHECK(lab::resolve_sigma(c, 40) == 0.3);
    CHECK_THROWS_AS(lab::parse_x_policy("sideways", c), Error);
    CHECK(lab::family_log_conductor(lab::Family::holo, 24) == doctest::Approx(2 * std::log(24.0)));

    lab::ExperimentConfig d;
    lab::config_from_json(lab::config_to_json(c), d);
    CHECK(lab::config_payload(d) == lab::config_payload(c));
}

TEST_CASE("cache verify, tamper, rebuild, gc") {
    const auto root = scratch("cache");
    const std::string dir = (root / "cache").string();
    fs::create_directories(dir);
    auto st = lab::cache_admin("gc", dir);
    CHECK(st.status == "clean");
    CHECK(st.removed == 0);

    const auto h = lab::eigenforms_cached(dir, 24, 100);
    auto c = quad_config(root, "out");
    c.statistic = lab::Statistic::A;
    lab::run(c);
    st = lab::cache_admin("verify", dir);
    CHECK(st.violations.empty());
    CHECK(st.status == "clean");
    CHECK(st.records > 100);
    CHECK(lab::cache_admin("gc", dir).status == "clean");

    // lambda(2) pushed past the Deligne bound d(2) = 2
    const auto path = root / "cache" / "eigen" / "k24.json";
    auto j = json::parse(slurp(path));
    j["forms"][0]["lambda"][1] = 2.5;
    lab::atomic_write(path.string(), j.dump());
    st = lab::cache_admin("verify", dir);
    REQUIRE(st.violations.size() == 1);
    CHECK(st.violations[0].reason.find("lambda(2)") != std::string::npos);
    CHECK(st.status == "violations");
    CHECK_FALSE(lab::load_eigenforms(dir, 24, 100).has_value());
    st = lab::cache_admin("rebuild", dir);
    CHECK(st.rebuilt == 1);
    CHECK(lab::cache_admin("verify", dir).violations.empty());
    const auto back = lab::load_eigenforms(dir, 24, 100);
    REQUIRE(back.has_value());
    CHECK(back->forms[0].lambda[2] == doctest::Approx(h.forms[0].lambda[2]).epsilon(1e-14));

    // a record from another code version and an unreadable line
    {
        std::ofstream out(root / "cache" / "lvalues.jsonl", std::ios::app);
        out << R"({"version":"lvlab-0.1","d":1,"s":[0.5,0],"method":"afe","value":[0.1,0],"est_error":0})" << "\n";
        out << "{not json\n";
    }
    st = lab::cache_admin("verify", dir);
    CHECK(st.violations.size() == 1);
    st = lab::cache_admin("gc", dir);
    CHECK(st.removed == 1);
    CHECK(st.status == "collected");
    CHECK(slurp(root / "cache" / "lvalues.jsonl").find("{not json") != std::string::npos);
    st = lab::cache_admin("gc", dir, true);
    CHECK(st.removed == 1);
    CHECK(slurp(root / "cache" / "lvalues.jsonl").find("{not json") == std::string::npos);
    CHECK(lab::cache_admin("verify", dir).status == "clean");

    CHECK_THROWS_AS(lab::cache_admin("shred", dir), Error);
    CHECK_THROWS_AS(lab::cache_admin("verify", (root / "missing").string()), Error);
    fs::remove_all(root);
}

TEST_CASE("L-value records are checked") {
    lab::LValueRecord r{lab::kCodeVersion, 15, {0.5, 0}, "afe", {0.8, 0}, 1e-12};
    CHECK(lab::check_lvalue(r).empty());
    r.d = 9;
    CHECK_FALSE(lab::check_lvalue(r).empty());
    r.d = 15;
    r.value = {0.8, 0.3};
    CHECK_FALSE(lab::check_lvalue(r).empty());
}

TEST_CASE("report rendering") {
    lab::Report r;
    r.kind = "demo";
    r.params["D"] = 10;
    r.columns = {"id", "value"};
    r.rows.push_back(json::array({"d=7", 0.25}));
    r.summary["count"] = 1;
    r.flags.push_back("tiny");
    const auto table = lab::render(r, lab::Format::table);
    CHECK(table.find("# demo (schema 1)") == 0);
    CHECK(table.find("d=7") != std::string::npos);
    CHECK(table.find("flag: tiny") != std::string::npos);
    const auto j = json::parse(lab::render(r, lab::Format::structured));
    CHECK(j["schema_version"] == 1);
    CHECK(j["rows"][0][1] == 0.25);
    CHECK(lab::num_text(0.1) == "0.1");
    CHECK(lab::num_text(std::numeric_limits<double>::infinity()) == "inf");
    CHECK_FALSE(lab::parse_format("yaml").has_value());
}

TEST_CASE("command-line exit codes and precedence") {
    const auto root = scratch("cli");
    const std::string out = (root / "o").string();
    CHECK(run_cli("distribution --family holo --scale 14 --statistic B --out " + out) == 2);
    CHECK(run_cli("distribution --format yaml --out " + out) == 2);
    CHECK(run_cli("no-such-command") == 2);
    CHECK(run_cli("cache verify --cache " + (root / "absent").string()) == 2);

    {
        std::ofstream cfg(root / "cfg.json");
        cfg << R"({"family": "quad", "scale": 500, "statistic": "P", "format": "structured"})";
    }
    CHECK(run_cli("primesums --config " + (root / "cfg.json").string() + " --out " + out) == 0);
    auto rep = json::parse(slurp(root / "o" / "report.json"));
    CHECK(rep["params"]["scale"] == 500.0);
    CHECK(run_cli("primesums --config " + (root / "cfg.json").string() + " --scale 700 --out " + out) == 0);
    rep = json::parse(slurp(root / "o" / "report.json"));
    CHECK(rep["params"]["scale"] == 700.0);
    CHECK(rep["rows"].size() == arith::enumerate_discriminants(700).members.size());
    fs::remove_all(root);
}
