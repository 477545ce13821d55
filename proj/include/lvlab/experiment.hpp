#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lvlab/report.hpp"
#include "lvlab/selberg.hpp"
#include "lvlab/stats.hpp"

namespace lvlab::lab {

using selberg::Family;
using stats::Statistic;

enum class XPolicy { explicit_value, theorem_window, cube_root };
enum class SigmaPolicy { default_floor, explicit_value, zero_driven };

struct ExperimentConfig {
    Family family = Family::quad;
    double scale = 1000;  // D, or the first k
    int k_max = 0;        // holo k-range end (inclusive); 0 for a single k
    Statistic statistic = Statistic::P;
    XPolicy x_policy = XPolicy::theorem_window;
    double x_value = 0;
    SigmaPolicy sigma_policy = SigmaPolicy::default_floor;
    double sigma_value = 0;
    int precision = 15;
    std::size_t sample_cap = 0;  // 0 keeps every member
    int workers = 1;
    std::string cache_dir;
    std::string out_dir = "lvlab-out";
    std::uint64_t seed = 1;
    Format format = Format::structured;
};

// Parses "theorem-window", "cube-root" or a number.
void parse_x_policy(const std::string& s, ExperimentConfig& c);
// Parses "default", "zero-driven" or a number.
void parse_sigma_policy(const std::string& s, ExperimentConfig& c);
std::string x_policy_text(const ExperimentConfig& c);
std::string sigma_policy_text(const ExperimentConfig& c);

// Throws ErrorKind::config on an inconsistent configuration.
void validate(const ExperimentConfig& c);

// Configuration fields that determine results (no paths, workers or format).
json config_payload(const ExperimentConfig& c);
json config_to_json(const ExperimentConfig& c);
// Applies the keys present in j on top of c.
void config_from_json(const json& j, ExperimentConfig& c);

// Family conductor C used by the x policy: D for quad, k^2 for holo.
double family_log_conductor(Family f, double scale);
double resolve_x(const ExperimentConfig& c, double scale);
double resolve_sigma(const ExperimentConfig& c, double x);

struct MemberStatus {
    std::string id;
    std::string status;  // ok | flagged | error
    std::string message;
};

struct ExperimentManifest {
    json config;
    std::vector<MemberStatus> members;
    std::vector<std::string> artifacts;
    std::size_t resumed = 0;
    double wall_seconds = 0;
    double cpu_seconds = 0;
};

struct ExperimentResult {
    ExperimentManifest manifest;
    Report report;
    stats::NormalizedSample sample;
};

// Work units land in out_dir/units-<hash>/ and are reused on the next run.
ExperimentResult run(const ExperimentConfig& c);

// Quad members of s(D), subsampled to cap with the seed (ascending order).
std::vector<std::int64_t> sample_members(std::int64_t D, std::size_t cap, std::uint64_t seed);

std::string fnv1a_hex(const std::string& s);

}  // namespace lvlab::lab
