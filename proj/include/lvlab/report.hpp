#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "lvlab/stats.hpp"

namespace lvlab::lab {

using json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;
// Cache records from other code versions are stale.
constexpr const char* kCodeVersion = "lvlab-1.0";

enum class Format { table, structured };

std::optional<Format> parse_format(std::string_view s);

// Shortest round-trip text for a double; "inf", "-inf", "nan" for the rest.
std::string num_text(double v);

// A tabular report with a structured twin:
// {"schema_version", "kind", "params", "columns", "rows", "summary", "flags"}.
struct Report {
    std::string kind;
    json params = json::object();
    std::vector<std::string> columns;
    std::vector<json> rows;  // each a json array matching columns
    json summary = json::object();
    std::vector<std::string> flags;

    json to_json() const;
};

std::string render(const Report& r, Format f);

json to_json(const stats::DistributionReport& r);
json to_json(const stats::DensityTestResult& r);
json to_json(const std::vector<stats::TailCheck>& t);
json to_json(const stats::OrthogonalityAverage& o);

// Write then rename, so readers never see a partial file.
void atomic_write(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace lvlab::lab
