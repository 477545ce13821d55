#include "lvlab/arith.hpp"

#include <string>

#include "lvlab/error.hpp"
#include "lvlab/numeric.hpp"

namespace lvlab::arith {

bool PrimeTable::is_prime(std::uint64_t n) const {
    if (n < 2) return false;
    if (n <= factor_limit()) return least_factor[n] == n;
    require(n <= limit, "is_prime: n beyond table limit");
    return std::binary_search(primes.begin(), primes.end(), static_cast<std::uint32_t>(n));
}

std::uint32_t PrimeTable::least_prime_factor(std::uint64_t n) const {
    require(n >= 2 && n <= factor_limit(), "least_prime_factor: n outside factor table");
    return least_factor[n];
}

bool PrimeTable::prime_power(std::uint64_t n, std::uint64_t* p, int* m) const {
    if (n < 2) return false;
    std::uint64_t q;
    if (n <= factor_limit()) {
        q = least_factor[n];
    } else {
        q = 0;
        for (std::uint32_t r : primes) {
            if (std::uint64_t(r) * r > n) break;
            if (n % r == 0) {
                q = r;
                break;
            }
        }
        if (q == 0) {
            require(n <= limit || std::uint64_t(primes.back()) * primes.back() >= n,
                    "prime_power: table too small to factor n");
            q = n;
        }
    }
    int e = 0;
    while (n % q == 0) {
        n /= q;
        ++e;
    }
    if (n != 1) return false;
    if (p) *p = q;
    if (m) *m = e;
    return true;
}

std::size_t sieve_memory_estimate(std::uint64_t limit) {
    double l = double(limit);
    double prime_count = l < 17 ? 8 : 1.2 * l / std::log(l);
    double lf = double(std::min<std::uint64_t>(limit, kLeastFactorBound) + 1);
    return static_cast<std::size_t>(4 * prime_count + 4 * lf + (1 << 20));
}

PrimeTable sieve(std::uint64_t limit, std::size_t memory_budget) {
    require(limit >= 2, "sieve: limit must be >= 2");
    if (limit >= (std::uint64_t(1) << 32))
        fail(ErrorKind::resource, "sieve: limit " + std::to_string(limit) + " exceeds 32-bit prime storage");
    std::size_t need = sieve_memory_estimate(limit);
    if (need > memory_budget)
        fail(ErrorKind::resource, "sieve: estimated " + std::to_string(need) + " bytes exceeds budget " +
                                      std::to_string(memory_budget));
    PrimeTable t;
    t.limit = limit;
    const std::uint64_t lf_lim = std::min(limit, kLeastFactorBound);
    t.least_factor.assign(lf_lim + 1, 0);
    for (std::uint64_t i = 2; i <= lf_lim; ++i) {
        if (t.least_factor[i] == 0) {
            t.least_factor[i] = static_cast<std::uint32_t>(i);
            t.primes.push_back(static_cast<std::uint32_t>(i));
        }
        const std::uint32_t lp = t.least_factor[i];
        for (std::uint32_t p : t.primes) {
            if (p > lp || i * p > lf_lim) break;
            t.least_factor[i * p] = p;
        }
    }
    if (limit > lf_lim)
        for_each_prime(lf_lim + 1, limit, [&](std::uint64_t p) { t.primes.push_back(static_cast<std::uint32_t>(p)); });
    return t;
}

std::vector<std::uint32_t> small_primes(std::uint64_t limit) {
    std::vector<std::uint32_t> out;
    if (limit < 2) return out;
    std::vector<bool> comp(limit + 1, false);
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (comp[i]) continue;
        out.push_back(static_cast<std::uint32_t>(i));
        for (std::uint64_t j = i * i; j <= limit; j += i) comp[j] = true;
    }
    return out;
}

int kronecker(std::int64_t a, std::int64_t n) {
    static constexpr int tab2[8] = {0, 1, 0, -1, 0, -1, 0, 1};
    require(n >= 1, "kronecker: n must be >= 1");
    if ((a & 1) == 0 && (n & 1) == 0) return 0;
    int k = 1;
    int v = 0;
    while ((n & 1) == 0) {
        n >>= 1;
        ++v;
    }
    if (v & 1) k = tab2[((a % 8) + 8) % 8];
    // Jacobi symbol (a/n) for odd n depends only on a mod n.
    std::int64_t b = n;
    std::int64_t x = a % b;
    if (x < 0) x += b;
    while (x != 0) {
        v = 0;
        while ((x & 1) == 0) {
            x >>= 1;
            ++v;
        }
        if (v & 1) k *= tab2[b & 7];
        if (x & b & 2) k = -k;
        std::int64_t r = x;
        x = b % r;
        b = r;
    }
    return b == 1 ? k : 0;
}

bool is_squarefree(std::uint64_t n) {
    if (n == 0) return false;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % (p * p) == 0) return false;
        if (n % p == 0) n /= p;
    }
    return true;
}

int num_divisors(std::uint64_t n) {
    int count = 1;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        count *= e + 1;
    }
    if (n > 1) count *= 2;
    return count;
}

bool is_perfect_square(std::uint64_t n) {
    auto r = static_cast<std::uint64_t>(std::sqrt(double(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r * r == n;
}

DiscriminantSet enumerate_discriminants(std::int64_t D) {
    require(D >= 2, "enumerate_discriminants: D must be >= 2");
    DiscriminantSet out;
    out.D = D;
    const std::int64_t lo = D / 2 + 1;
    std::vector<unsigned char> sf(static_cast<std::size_t>(D - lo + 1), 1);
    for (std::uint32_t p : small_primes(static_cast<std::uint64_t>(std::sqrt(double(D))) + 1)) {
        std::int64_t pp = std::int64_t(p) * p;
        if (pp > D) break;
        for (std::int64_t m = (lo + pp - 1) / pp * pp; m <= D; m += pp) sf[m - lo] = 0;
    }
    for (std::int64_t d = lo; d <= D; ++d)
        if ((d & 1) && sf[d - lo]) out.members.push_back(d);
    return out;
}

PrimeLogSums prime_log_sums(double x, const PrimeTable& table) {
    require(x >= 2, "prime_log_sums: x must be >= 2");
    require(double(table.limit) >= x, "prime_log_sums: prime table smaller than x");
    num::Neumaier<double> inv, logsq;
    for (std::uint32_t p : table.primes) {
        if (double(p) >= x) break;
        double lp = std::log(double(p));
        inv.add(1.0 / p);
        logsq.add(lp * lp / p);
    }
    return {inv.value(), logsq.value()};
}

}  // namespace lvlab::arith
