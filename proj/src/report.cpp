#include "lvlab/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lvlab/error.hpp"

namespace lvlab::lab {

std::optional<Format> parse_format(std::string_view s) {
    if (s == "table") return Format::table;
    if (s == "structured" || s == "json") return Format::structured;
    return std::nullopt;
}

std::string num_text(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

json jnum(double v) {
    if (std::isfinite(v)) return v;
    return num_text(v);
}

std::string cell(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) return num_text(v.get<double>());
    if (v.is_null()) return "-";
    return v.dump();
}

void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it)
            flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
        return;
    }
    if (j.is_array() && std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); })) {
        std::string s;
        for (const auto& e : j) s += (s.empty() ? "" : " ") + cell(e);
        out.emplace_back(prefix, s);
        return;
    }
    if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
        return;
    }
    out.emplace_back(prefix, cell(j));
}

}  // namespace

json Report::to_json() const {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = kind;
    j["params"] = params;
    j["columns"] = columns;
    j["rows"] = json::array();
    for (const auto& r : rows) j["rows"].push_back(r);
    j["summary"] = summary;
    j["flags"] = flags;
    return j;
}

std::string render(const Report& r, Format f) {
    if (f == Format::structured) return r.to_json().dump(2) + "\n";
    std::ostringstream os;
    os << "# " << r.kind << " (schema " << kSchemaVersion << ")\n";
    std::vector<std::pair<std::string, std::string>> kv;
    flatten(r.params, "", kv);
    for (const auto& [k, v] : kv) os << "# " << k << ": " << v << "\n";

    if (!r.columns.empty()) {
        std::vector<std::vector<std::string>> cells;
        std::vector<std::size_t> width(r.columns.size());
        for (std::size_t c = 0; c < r.columns.size(); ++c) width[c] = r.columns[c].size();
        for (const auto& row : r.rows) {
            std::vector<std::string> line;
            for (std::size_t c = 0; c < r.columns.size(); ++c) {
                line.push_back(c < row.size() ? cell(row[c]) : "");
                width[c] = std::max(width[c], line.back().size());
            }
            cells.push_back(std::move(line));
        }
        auto emit = [&](const std::vector<std::string>& line) {
            for (std::size_t c = 0; c < line.size(); ++c) {
                os << line[c];
                if (c + 1 < line.size()) os << std::string(width[c] - line[c].size() + 2, ' ');
            }
            os << "\n";
        };
        emit(r.columns);
        for (const auto& line : cells) emit(line);
    }

    kv.clear();
    flatten(r.summary, "", kv);
    for (const auto& [k, v] : kv) os << k << ": " << v << "\n";
    for (const auto& fl : r.flags) os << "flag: " << fl << "\n";
    return os.str();
}

json to_json(const stats::DistributionReport& r) {
    json j;
    j["n"] = r.n;
    j["mean"] = jnum(r.moments[0]);
    json m = json::array();
    for (int k = 1; k < 6; ++k) m.push_back(jnum(r.moments[k]));
    j["central_moments_2_6"] = m;
    j["ks"] = jnum(r.ks);
    json tails = json::object();
    for (const auto& t : r.tails) tails[num_text(t.threshold)] = jnum(t.frequency);
    j["upper_tail"] = tails;
    json h;
    h["edges"] = json::array();
    for (double e : r.histogram.edges) h["edges"].push_back(jnum(e));
    h["counts"] = r.histogram.counts;
    j["histogram"] = h;
    return j;
}

json to_json(const stats::DensityTestResult& r) {
    json j;
    j["family"] = selberg::family_name(r.family);
    j["test_function"] = stats::test_function_name(r.test);
    j["conforming"] = r.conforming;
    j["members"] = r.members;
    j["scaling"] = jnum(r.scaling);
    j["empirical"] = jnum(r.empirical);
    j["predicted"] = jnum(r.predicted);
    j["relative_error"] = jnum(r.relative_error());
    j["tail_correction"] = jnum(r.tail_correction);
    return j;
}

json to_json(const std::vector<stats::TailCheck>& t) {
    json a = json::array();
    for (const auto& c : t) {
        json j;
        j["threshold"] = jnum(c.threshold);
        j["empirical"] = jnum(c.empirical);
        j["gaussian"] = jnum(c.gaussian);
        j["excess"] = jnum(c.excess);
        a.push_back(j);
    }
    return a;
}

json to_json(const stats::OrthogonalityAverage& o) {
    json j;
    j["members"] = o.members;
    j["empirical"] = jnum(o.empirical);
    j["predicted"] = jnum(o.predicted);
    j["deviation"] = jnum(o.deviation);
    return j;
}

void atomic_write(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path p(path);
    std::error_code ec;
    if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
    const fs::path tmp = p.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorKind::io, "cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) fail(ErrorKind::io, "write failed for " + tmp.string());
    }
    fs::rename(tmp, p, ec);
    if (ec) fail(ErrorKind::io, "rename " + tmp.string() + " -> " + p.string() + ": " + ec.message());
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace lvlab::lab
