#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <unordered_map>
#include <vector>

#include "doctest.h"
#include "lvlab/arith.hpp"
#include "lvlab/error.hpp"

using namespace lvlab;

namespace {

// Lucy_Hedgehog prime counting: pi(n) from the values S(n/i).
std::int64_t lucy_pi(std::int64_t n) {
    const auto r = static_cast<std::int64_t>(std::sqrt(double(n)));
    std::vector<std::int64_t> V;
    for (std::int64_t i = 1; i <= r; ++i) V.push_back(n / i);
    for (std::int64_t v = V.back() - 1; v >= 1; --v) V.push_back(v);
    std::unordered_map<std::int64_t, std::int64_t> S;
    for (auto v : V) S[v] = v - 1;
    for (std::int64_t p = 2; p <= r; ++p) {
        if (S[p] <= S[p - 1]) continue;
        const std::int64_t sp = S[p - 1], p2 = p * p;
        for (auto v : V) {
            if (v < p2) break;
            S[v] -= S[v / p] - sp;
        }
    }
    return S[n];
}

bool slow_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t k = 2; k * k <= n; ++k)
        if (n % k == 0) return false;
    return true;
}

std::int64_t powmod(std::int64_t b, std::int64_t e, std::int64_t m) {
    std::int64_t r = 1 % m;
    b %= m;
    if (b < 0) b += m;
    for (; e; e >>= 1, b = b * b % m)
        if (e & 1) r = r * b % m;
    return r;
}

// Kronecker symbol from the factorisation of n: Euler's criterion at odd
// primes, the (a/2) rule at 2.
int kronecker_by_factoring(std::int64_t a, std::int64_t n) {
    int r = 1;
    std::int64_t m = n;
    for (std::int64_t p = 2; m > 1; ++p) {
        while (m % p == 0) {
            m /= p;
            int l;
            if (p == 2) {
                if (a % 2 == 0) l = 0;
                else {
                    const auto a8 = ((a % 8) + 8) % 8;
                    l = (a8 == 1 || a8 == 7) ? 1 : -1;
                }
            } else {
                const auto e = powmod(a, (p - 1) / 2, p);
                l = e == 0 ? 0 : (e == 1 ? 1 : -1);
            }
            r *= l;
        }
    }
    return r;
}

}  // namespace

TEST_CASE("sieve small limits") {
    auto t = arith::sieve(10);
    CHECK(t.primes == std::vector<std::uint32_t>{2, 3, 5, 7});
    CHECK(arith::sieve(2).primes == std::vector<std::uint32_t>{2});
    auto big = arith::sieve(5000);
    for (std::uint64_t n = 2; n <= 5000; ++n) {
        CHECK(big.is_prime(n) == slow_prime(n));
        const auto lf = big.least_prime_factor(n);
        CHECK(n % lf == 0);
        for (std::uint64_t k = 2; k < lf; ++k) CHECK(n % k != 0);
    }
    for (std::size_t i = 1; i < big.primes.size(); ++i) CHECK(big.primes[i - 1] < big.primes[i]);
}

TEST_CASE("sieve rejects bad limits") {
    CHECK_THROWS_AS(arith::sieve(1), Error);
    try {
        arith::sieve(std::uint64_t(1) << 40, 1 << 20);
        FAIL("expected a resource error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::resource);
    }
}

TEST_CASE("pi(10^7) against Lucy_Hedgehog") {
    const auto t = arith::sieve(10'000'000);
    CHECK(t.primes.size() == 664579);
    CHECK(lucy_pi(10'000'000) == 664579);
    std::uint64_t streamed = 0;
    arith::for_each_prime(1, 10'000'000, [&](std::uint64_t) { ++streamed; });
    CHECK(streamed == 664579);
    std::uint64_t window = 0;
    arith::for_each_prime(20'000'000, 30'000'000, [&](std::uint64_t) { ++window; });
    CHECK(std::int64_t(window) == lucy_pi(30'000'000) - lucy_pi(19'999'999));
}

TEST_CASE("prime powers") {
    const auto t = arith::sieve(2000);
    std::uint64_t p = 0;
    int m = 0;
    CHECK(t.prime_power(1024, &p, &m));
    CHECK(p == 2);
    CHECK(m == 10);
    CHECK(t.prime_power(1331, &p, &m));
    CHECK(p == 11);
    CHECK(m == 3);
    CHECK_FALSE(t.prime_power(6, &p, &m));
    CHECK_FALSE(t.prime_power(1, &p, &m));
}

TEST_CASE("kronecker examples") {
    CHECK(arith::kronecker(8, 7) == 1);
    CHECK(arith::kronecker(8, 3) == -1);
    CHECK(arith::kronecker(8, 2) == 0);
    CHECK(arith::kronecker(8, 1) == 1);
}

TEST_CASE("kronecker against factorisation oracle") {
    for (std::int64_t a = -100; a <= 1000; ++a)
        for (std::int64_t n = 1; n <= 1000; ++n) REQUIRE(arith::kronecker(a, n) == kronecker_by_factoring(a, n));
}

TEST_CASE("kronecker multiplicativity") {
    // a <= 1000 against m, n <= 100, then a <= 30 against m, n <= 1000
    for (std::int64_t a = 1; a <= 1000; ++a)
        for (std::int64_t m = 1; m <= 100; ++m)
            for (std::int64_t n = 1; n <= 100; ++n)
                REQUIRE(arith::kronecker(a, m * n) == arith::kronecker(a, m) * arith::kronecker(a, n));
    for (std::int64_t a = 1; a <= 30; ++a)
        for (std::int64_t m = 1; m <= 1000; ++m)
            for (std::int64_t n = 1; n <= 1000; ++n)
                REQUIRE(arith::kronecker(a, m * n) == arith::kronecker(a, m) * arith::kronecker(a, n));
}

TEST_CASE("chi_8d periodicity and squares") {
    for (auto d : arith::enumerate_discriminants(50).members) {
        const std::int64_t q = 8 * d;
        for (std::int64_t n = 1; n <= 2 * q; ++n) CHECK(arith::kronecker(q, n) == arith::kronecker(q, n + q));
        for (std::int64_t r = 1; r <= 200; ++r)
            if (std::gcd(r, q) == 1) CHECK(arith::kronecker(q, r * r) == 1);
    }
}

TEST_CASE("discriminant enumeration") {
    CHECK(arith::enumerate_discriminants(10).members == std::vector<std::int64_t>{7});
    CHECK(arith::enumerate_discriminants(20).members == std::vector<std::int64_t>{11, 13, 15, 17, 19});
    CHECK(arith::enumerate_discriminants(2).members.empty());

    auto direct = [](std::int64_t D) {
        std::vector<std::int64_t> out;
        for (std::int64_t d = D / 2 + 1; d <= D; ++d) {
            if (d % 2 == 0) continue;
            bool sf = true;
            for (std::int64_t k = 3; k * k <= d; k += 2)
                if (d % (k * k) == 0) sf = false;
            if (sf) out.push_back(d);
        }
        return out;
    };
    for (std::int64_t D : {3, 4, 99, 1000, 4321}) CHECK(arith::enumerate_discriminants(D).members == direct(D));
    CHECK(arith::enumerate_discriminants(100000).members.size() == 20260);
}

TEST_CASE("odd squarefree density") {
    const double n = double(arith::enumerate_discriminants(1'000'000).members.size());
    const double target = 4 / (std::numbers::pi * std::numbers::pi);
    CHECK(std::abs(n / 500000.0 - target) / target < 0.05);
}

TEST_CASE("prime log sums") {
    const auto t = arith::sieve(1'000'000);
    auto s = arith::prime_log_sums(10, t);
    CHECK(s.sum_inv_p == doctest::Approx(1.0 / 2 + 1.0 / 3 + 1.0 / 5 + 1.0 / 7).epsilon(1e-14));
    const double l2 = std::log(2.), l3 = std::log(3.), l5 = std::log(5.), l7 = std::log(7.);
    CHECK(s.sum_logsq_over_p == doctest::Approx(l2 * l2 / 2 + l3 * l3 / 3 + l5 * l5 / 5 + l7 * l7 / 7).epsilon(1e-14));
    auto z = arith::prime_log_sums(2, t);
    CHECK(z.sum_inv_p == 0);
    CHECK(z.sum_logsq_over_p == 0);
    // Meissel-Mertens constant
    const double M = 0.2614972128476427837554268386;
    CHECK(std::abs(arith::prime_log_sums(1e6, t).sum_inv_p - (std::log(std::log(1e6)) + M)) < 1e-3);
    CHECK_THROWS_AS(arith::prime_log_sums(2e6, t), Error);
}

TEST_CASE("divisor helpers") {
    CHECK(arith::num_divisors(1) == 1);
    CHECK(arith::num_divisors(12) == 6);
    CHECK(arith::num_divisors(1024) == 11);
    CHECK(arith::is_perfect_square(144));
    CHECK_FALSE(arith::is_perfect_square(143));
    CHECK(arith::is_squarefree(30));
    CHECK_FALSE(arith::is_squarefree(18));
}
