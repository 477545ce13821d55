#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace lvlab::arith {

// Least-factor table is kept only up to this bound; primes above it come from
// a segmented sieve.
constexpr std::uint64_t kLeastFactorBound = 10'000'000;
constexpr std::size_t kDefaultMemoryBudget = std::size_t(1) << 30;

struct PrimeTable {
    std::uint64_t limit = 0;
    std::vector<std::uint32_t> primes;        // ascending, all primes <= limit
    std::vector<std::uint32_t> least_factor;  // index n <= min(limit, kLeastFactorBound)

    std::uint64_t factor_limit() const { return least_factor.empty() ? 0 : least_factor.size() - 1; }
    bool is_prime(std::uint64_t n) const;
    // Smallest prime divisor; needs n <= factor_limit().
    std::uint32_t least_prime_factor(std::uint64_t n) const;
    // If n = p^m with m >= 1, returns true and sets p, m.
    bool prime_power(std::uint64_t n, std::uint64_t* p, int* m) const;
};

std::size_t sieve_memory_estimate(std::uint64_t limit);

PrimeTable sieve(std::uint64_t limit, std::size_t memory_budget = kDefaultMemoryBudget);

// Primes up to sqrt(hi) by a plain sieve; helper for segmented iteration.
std::vector<std::uint32_t> small_primes(std::uint64_t limit);

// Calls fn(p) for every prime lo <= p <= hi in ascending order without
// storing them.
template <class F>
void for_each_prime(std::uint64_t lo, std::uint64_t hi, F&& fn) {
    if (hi < 2 || lo > hi) return;
    if (lo < 2) lo = 2;
    const auto base = small_primes(static_cast<std::uint64_t>(std::sqrt(double(hi))) + 2);
    constexpr std::uint64_t seg = 1 << 18;
    std::vector<unsigned char> mark(seg);
    for (std::uint64_t start = lo; start <= hi; start += seg) {
        std::uint64_t end = std::min(hi, start + seg - 1);
        std::fill(mark.begin(), mark.end(), 1);
        for (std::uint32_t p : base) {
            std::uint64_t pp = std::uint64_t(p) * p;
            if (pp > end) break;
            std::uint64_t first = std::max(pp, (start + p - 1) / p * p);
            for (std::uint64_t m = first; m <= end; m += p) mark[m - start] = 0;
        }
        for (std::uint64_t n = start; n <= end; ++n)
            if (mark[n - start]) fn(n);
    }
}

// Kronecker symbol (a/n), n >= 1.
int kronecker(std::int64_t a, std::int64_t n);

struct DiscriminantSet {
    std::int64_t D = 0;
    std::vector<std::int64_t> members;  // odd squarefree d with D/2 < d <= D
};

DiscriminantSet enumerate_discriminants(std::int64_t D);

bool is_squarefree(std::uint64_t n);
int num_divisors(std::uint64_t n);
bool is_perfect_square(std::uint64_t n);

struct PrimeLogSums {
    double sum_inv_p = 0;
    double sum_logsq_over_p = 0;
};

// Sums over primes p < x.
PrimeLogSums prime_log_sums(double x, const PrimeTable& table);

}  // namespace lvlab::arith
