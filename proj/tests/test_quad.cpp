#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "lvlab/arith.hpp"
#include "lvlab/error.hpp"
#include "lvlab/quad.hpp"
#include "lvlab/selberg.hpp"
#include "lvlab/stats.hpp"

using namespace lvlab;
using quad::cplx;

namespace {

// chi_8 by residue class: +1 at 1, 7 and -1 at 3, 5 mod 8.
int chi8(long n) {
    switch (n % 8) {
        case 1: case 7: return 1;
        case 3: case 5: return -1;
        default: return 0;
    }
}

}  // namespace

TEST_CASE("discriminant validation") {
    CHECK(quad::QuadraticDiscriminant::make(15).q == 120);
    CHECK_THROWS_AS(quad::QuadraticDiscriminant::make(9), Error);
    CHECK_THROWS_AS(quad::QuadraticDiscriminant::make(6), Error);
    const auto dq = quad::QuadraticDiscriminant::make(15);
    const auto tab = dq.chi_table();
    for (long a = 0; a < dq.q; ++a) CHECK(tab[a] == arith::kronecker(120, a == 0 ? 120 : a));
    CHECK(dq.chi(dq.q - 1) == 1);
}

TEST_CASE("oracle at s = 2 against the summed series") {
    const auto dq = quad::QuadraticDiscriminant::make(1);
    long double direct = 0;
    for (long k = 200000; k >= 0; --k) {
        long double b = 0;
        for (long r : {1, 3, 5, 7}) b += chi8(r) / ((8.0L * k + r) * (8.0L * k + r));
        direct += b;
    }
    const auto v = quad::l_value_oracle(dq, 2.0, 15);
    CHECK(v.method == quad::Method::hurwitz_oracle);
    CHECK(std::abs(v.value.real() - double(direct)) < 1e-10);
    CHECK(std::abs(v.value.real() - std::numbers::pi * std::numbers::pi / (8 * std::sqrt(2.0))) < 1e-12);
    CHECK(v.est_error <= 1e-13);
}

TEST_CASE("oracle precision contract") {
    const auto dq = quad::QuadraticDiscriminant::make(1);
    const auto v = quad::l_value_oracle(dq, 0.5, 20);
    const auto w = quad::l_value_oracle(dq, 0.5, 40);
    CHECK(v.value.real() > 0);
    CHECK(v.est_error <= 1e-18);
    CHECK(std::abs(v.value.real() - w.value.real()) < 1e-15);
    CHECK(v.value.imag() == 0);
    CHECK_THROWS_AS(quad::l_value_oracle(dq, 0.5, quad::kOracleMaxPrecision + 1), Error);
}

TEST_CASE("afe at the central point") {
    const auto dq = quad::QuadraticDiscriminant::make(1);
    const auto a = quad::l_value_afe(dq, 0.5);
    const auto o = quad::l_value_oracle(dq, 0.5, 20);
    CHECK(a.method == quad::Method::afe);
    CHECK(std::abs(a.value.real() - o.value.real()) < 1e-10);
    // X(1/2) = 1: both halves coincide
    double sym = 0;
    for (int n = 1; n < 60; ++n) sym += chi8(n) / std::sqrt(double(n)) * boost::math::gamma_q(0.25, std::numbers::pi * n * n / 8);
    CHECK(std::abs(a.value.real() - 2 * sym) < 1e-12);
}

TEST_CASE("afe against oracle on s(200) at the decomposition point") {
    const double x = std::cbrt(200.0);
    const double s = 0.5 + 4 / std::log(x);
    for (auto d : arith::enumerate_discriminants(200).members) {
        const auto dq = quad::QuadraticDiscriminant::make(d);
        const double a = quad::l_value_afe(dq, s).value.real();
        const double o = quad::l_value_oracle(dq, s, 15).value.real();
        CHECK(std::abs(a - o) < 1e-8);
    }
}

TEST_CASE("afe against oracle on random points") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> dd(1, 10000);
    std::uniform_real_distribution<double> ss(0.4, 0.9), tt(-10, 10);
    int checked = 0;
    while (checked < 40) {
        const int d = dd(rng);
        if (d % 2 == 0 || !arith::is_squarefree(d)) continue;
        const auto dq = quad::QuadraticDiscriminant::make(d);
        const cplx s{ss(rng), checked % 2 ? tt(rng) : 0.0};
        const auto a = quad::l_value_afe(dq, s);
        const auto o = quad::l_value_oracle(dq, s, 15);
        CHECK(std::abs(a.value - o.value) < 1e-8);
        CHECK(a.est_error < 1e-9);
        ++checked;
    }
}

TEST_CASE("split point does not change the value") {
    const auto dq = quad::QuadraticDiscriminant::make(101);
    const cplx s{0.7, 3.0};
    const auto a = quad::l_value_afe(dq, s, cplx{1.0, 0.0}).value;
    const auto b = quad::l_value_afe(dq, s, cplx{1.7, 0.4}).value;
    CHECK(std::abs(a - b) < 1e-11);
}

TEST_CASE("functional equation of the completed L-function") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ss(0.05, 0.95), tt(-15, 15);
    const auto fam = arith::enumerate_discriminants(3000).members;
    for (int i = 0; i < 100; ++i) {
        const auto dq = quad::QuadraticDiscriminant::make(fam[(i * 37) % fam.size()]);
        const cplx s{ss(rng), i % 3 ? tt(rng) : 0.0};
        const auto L1 = quad::completed(dq, s, quad::l_value_afe(dq, s, cplx{1.3, 0.2}));
        const auto L2 = quad::completed(dq, 1.0 - s, quad::l_value_afe(dq, 1.0 - s, cplx{0.8, -0.1}));
        CHECK(std::abs(L1 - L2) / std::abs(L1) < 1e-8);
    }
}

TEST_CASE("hardy Z") {
    for (std::int64_t d : {1, 3, 5, 1001, 20011}) {
        const auto dq = quad::QuadraticDiscriminant::make(d);
        CHECK(std::abs(quad::hardy_z(dq, 0.0) - quad::l_value_oracle(dq, 0.5).value.real()) < 1e-10);
        for (double t : {0.3, 2.5, 7.1, 19.9, 44.0}) {
            const auto h = quad::hardy_z_full(dq, t);
            CHECK(std::abs(h.rotated.imag()) < 1e-8);
            CHECK(std::abs(quad::hardy_z(dq, -t) - h.z) < 1e-10);
            const auto L = quad::l_value_oracle(dq, cplx{0.5, t}).value;
            CHECK(std::abs(std::abs(h.z) - std::abs(L)) < 1e-9);
        }
    }
    CHECK_THROWS_AS(quad::hardy_z(quad::QuadraticDiscriminant::make(1), 61.0), Error);
}

TEST_CASE("theta scanner agrees with hardy Z") {
    for (std::int64_t d : {1, 7, 4001}) {
        const auto dq = quad::QuadraticDiscriminant::make(d);
        quad::ThetaScanner sc(dq);
        for (double t = 0.25; t < 30; t += 1.7) CHECK(std::abs(sc.z(t) - quad::hardy_z(dq, t)) < 1e-7);
    }
}

TEST_CASE("zeros of L(s, chi_8) against a fine grid") {
    const auto dq = quad::QuadraticDiscriminant::make(1);
    const auto zl = quad::find_zeros(dq, 15);
    int changes = 0;
    double prev = quad::hardy_z(dq, 0.0);
    for (int i = 1; i <= 15000; ++i) {
        const double z = quad::hardy_z(dq, i * 1e-3);
        if ((prev < 0) != (z < 0)) ++changes;
        prev = z;
    }
    CHECK(int(zl.ordinates.size()) == changes);
    CHECK(zl.gamma_min == zl.ordinates.front());
    for (std::size_t i = 0; i < zl.ordinates.size(); ++i) {
        CHECK(zl.ordinates[i] >= 1e-9);
        if (i) CHECK(zl.ordinates[i] > zl.ordinates[i - 1]);
        CHECK(std::abs(quad::hardy_z(dq, zl.ordinates[i])) < 1e-7);
    }
    // first zero of L(s, chi_8)
    CHECK(std::abs(zl.ordinates[0] - 4.8999739970) < 1e-8);
}

TEST_CASE("count check near 10^4") {
    auto fam = arith::enumerate_discriminants(10000).members;
    int good = 0, total = 0;
    for (auto it = fam.rbegin(); it != fam.rend() && total < 50; ++it, ++total) {
        const auto zl = quad::find_zeros(quad::QuadraticDiscriminant::make(*it), 10);
        if (std::abs(zl.count_check) <= 2) ++good;
        for (std::size_t i = 1; i < zl.ordinates.size(); ++i) CHECK(zl.ordinates[i] > zl.ordinates[i - 1]);
    }
    CHECK(good >= 48);
}

TEST_CASE("smooth zero count") {
    // theta(T)/pi grows like (T/2pi) log(qT/2pi e)
    const double T = 50;
    const double q = 8;
    CHECK(std::abs(quad::smooth_zero_count(8, T) - T / (2 * std::numbers::pi) * std::log(q * T / (2 * std::numbers::pi * std::exp(1.0)))) < 0.2);
}

TEST_CASE("gamma_min mass below 1/y stays under the expected zero count") {
    // P(gamma_min < a) <= E #{zeros in [0, a]}, scaled by log D / 2 pi
    const double D = 1e4;
    const double y = std::log(std::log(D));
    const double a = 1 / y;
    const auto fam = arith::enumerate_discriminants(std::int64_t(D)).members;
    std::vector<double> scaled;
    for (std::size_t i = 0; i < fam.size(); i += 10) {
        const auto zl = quad::find_zeros(quad::QuadraticDiscriminant::make(fam[i]), 6);
        const double g = zl.ordinates.empty() ? 6.0 : zl.gamma_min;
        scaled.push_back(g * std::log(D) / (2 * std::numbers::pi));
    }
    const double mass = stats::mass_below(scaled, a);
    const double bound = stats::expected_zero_count(stats::Symmetry::symplectic, a);
    const double slack = 3 * std::sqrt(bound * (1 - bound) / scaled.size());
    MESSAGE("gamma_min mass below 1/y = " << mass << ", W(Sp) count " << bound << ", n = " << scaled.size());
    CHECK(mass <= bound + slack);
}
