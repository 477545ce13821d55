#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "lvlab/holo.hpp"
#include "lvlab/quad.hpp"

namespace lvlab::lab {

// Layout under the cache directory:
//   lvalues.jsonl        one L-value record per line
//   eigen/k<k>.json      Hecke eigenvalues of H_k

struct LValueRecord {
    std::string version;
    std::int64_t d = 0;
    quad::cplx s;
    std::string method;
    quad::cplx value;
    double est_error = 0;
};

class LValueCache {
public:
    explicit LValueCache(std::string dir);

    std::optional<LValueRecord> find(std::int64_t d, quad::cplx s, const std::string& method) const;
    void put(const LValueRecord& r);
    // Rewrites the file atomically with every record held.
    void flush();
    std::size_t size() const;

private:
    using Key = std::tuple<std::int64_t, double, double, std::string>;
    std::string path_;
    mutable std::mutex mu_;
    std::map<Key, LValueRecord> records_;
    std::vector<std::string> foreign_;  // lines kept verbatim (stale or unreadable)
    bool dirty_ = false;
};

// Per-record invariant failures; empty when the record is sound.
std::vector<std::string> check_lvalue(const LValueRecord& r);
std::vector<std::string> check_eigenforms(const std::vector<holo::HeckeEigenform>& forms);

void save_eigenforms(const std::string& dir, const holo::EigenResult& r);
// Loads H_k when cached with at least N coefficients and every form passes the checks.
std::optional<holo::EigenResult> load_eigenforms(const std::string& dir, int k, std::size_t N);

// H_k with N coefficients, through the cache when dir is non-empty.
holo::EigenResult eigenforms_cached(const std::string& dir, int k, std::size_t N);

struct CacheViolation {
    std::string file;
    std::string record;
    std::string reason;
};

struct CacheStatus {
    std::string command;
    std::size_t records = 0;
    std::vector<CacheViolation> violations;
    std::size_t rebuilt = 0;
    std::size_t removed = 0;
    std::string status;  // "clean", "violations", "rebuilt", "collected"
};

// command: verify | rebuild | gc. Unreadable records are removed only with force.
CacheStatus cache_admin(const std::string& command, const std::string& dir, bool force = false);

}  // namespace lvlab::lab
