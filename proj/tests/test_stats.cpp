#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "lvlab/arith.hpp"
#include "lvlab/error.hpp"
#include "lvlab/holo.hpp"
#include "lvlab/numeric.hpp"
#include "lvlab/quad.hpp"
#include "lvlab/stats.hpp"

using namespace lvlab;
using stats::Family;
using stats::Statistic;

namespace {

double Phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// sup |F_n - Phi| by counting, O(N^2).
double brute_ks(const std::vector<double>& v) {
    const double n = double(v.size());
    double d = 0;
    for (double x : v) {
        int le = 0, lt = 0;
        for (double y : v) {
            if (y <= x) ++le;
            if (y < x) ++lt;
        }
        d = std::max({d, std::abs(le / n - Phi(x)), std::abs(lt / n - Phi(x))});
    }
    return d;
}

// Si(z) by its Taylor series.
double sine_integral(double z) {
    double term = z, sum = z;
    for (int k = 1; k < 60; ++k) {
        term *= -z * z / ((2.0 * k) * (2.0 * k + 1));
        sum += term / (2 * k + 1);
    }
    return sum;
}

}  // namespace

TEST_CASE("normalization") {
    const double D = 1e5;
    const auto norm = stats::make_normalization(Family::quad, D, 0.2, 100);
    const double lls = std::log(std::log(D));
    CHECK(norm.log_log_scale == doctest::Approx(lls));
    CHECK(norm.mean_shift == doctest::Approx(-0.5 * lls));
    auto s = stats::normalize({0.5 * lls, 0.5 * lls + std::sqrt(lls), -1.0}, Family::quad, Statistic::A, norm, 2);
    CHECK(s.values[0] == doctest::Approx(0).epsilon(1e-15));
    CHECK(s.values[1] == doctest::Approx(1).epsilon(1e-14));
    CHECK(s.excluded == 2);
    CHECK(s.values[2] == doctest::Approx((-1 - 0.5 * lls) / std::sqrt(lls)));

    const auto hn = stats::make_normalization(Family::holo, 12);
    CHECK(hn.mean_shift == doctest::Approx(0.5 * std::log(std::log(12.0))));
    const double raw = std::log(0.79220);
    auto h = stats::normalize({raw}, Family::holo, Statistic::B, hn);
    CHECK(h.values.size() == 1);
    CHECK(h.values[0] == doctest::Approx((raw + 0.5 * std::log(std::log(12.0))) / std::sqrt(std::log(std::log(12.0)))));
    CHECK_THROWS_AS(stats::normalize({}, Family::quad, Statistic::A, norm), Error);
}

TEST_CASE("KS statistic against brute force") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.3, 1.2);
    for (int n : {1, 2, 17, 500, 1000}) {
        std::vector<double> v(n);
        for (auto& x : v) x = g(rng);
        // ties
        if (n > 10) v[1] = v[2] = v[3];
        CHECK(std::abs(stats::ks_statistic(v) - brute_ks(v)) < 1e-12);
    }
    for (double c : {-0.7, 0.0, 1.3}) {
        const std::vector<double> v(50, c);
        CHECK(stats::ks_statistic(v) == doctest::Approx(std::max(Phi(c), 1 - Phi(c))).epsilon(1e-12));
    }
}

TEST_CASE("distribution report on a normal sample") {
    std::mt19937_64 rng(19);
    std::normal_distribution<double> g;
    std::vector<double> v(100000);
    for (auto& x : v) x = g(rng);
    const auto rep = stats::distribution_report(v);
    CHECK(rep.n == v.size());
    CHECK(rep.ks < 0.01);
    CHECK(rep.ks >= 0);
    CHECK(std::abs(rep.moments[0]) < 0.02);
    CHECK(std::abs(rep.moments[1] - 1) < 0.02);
    CHECK(std::abs(rep.moments[3] - 3) < 0.1);
    CHECK(std::abs(rep.moments[5] - 15) < 1.5);
    std::size_t total = 0;
    for (auto c : rep.histogram.counts) total += c;
    CHECK(total == v.size());
    CHECK(rep.histogram.edges.size() == rep.histogram.counts.size() + 1);
    REQUIRE(rep.tails.size() == 3);
    CHECK(rep.tails[1].threshold == 1);
    CHECK(std::abs(rep.tails[1].frequency - 0.158655) < 0.005);
}

TEST_CASE("moments by direct formula") {
    const std::vector<double> v{1, 2, 2, 3, 7, -1};
    const auto rep = stats::distribution_report(v);
    const double n = 6, mean = 14 / n;
    double c[7] = {};
    for (double x : v)
        for (int k = 2; k <= 6; ++k) c[k] += std::pow(x - mean, k);
    CHECK(rep.moments[0] == doctest::Approx(mean));
    CHECK(rep.moments[1] == doctest::Approx(c[2] / (n - 1)));
    for (int k = 3; k <= 6; ++k) CHECK(rep.moments[k - 1] == doctest::Approx(c[k] / n));
    CHECK_THROWS_AS(stats::distribution_report(std::vector<double>{1.0}), Error);
    const auto flat = stats::freedman_diaconis(std::vector<double>(10, 2.0));
    CHECK(flat.counts.size() == 1);
    CHECK(flat.counts[0] == 10);
}

TEST_CASE("moment prediction") {
    const double x = 1e6, ll = std::log(std::log(x));
    CHECK(stats::moment_prediction(1, x) == doctest::Approx(ll));
    CHECK(stats::moment_prediction(2, x) == doctest::Approx(3 * ll * ll));
    CHECK(stats::moment_prediction(3, x) == doctest::Approx(15 * ll * ll * ll));
    double df = 1;
    for (int m = 1; m <= 10; ++m) {
        df *= 2 * m - 1;
        CHECK(stats::moment_prediction(m, x) / std::pow(ll, m) == doctest::Approx(df).epsilon(1e-13));
        CHECK(stats::double_factorial_odd(m) == df);
    }
}

TEST_CASE("orthogonality averages") {
    const auto s5 = arith::enumerate_discriminants(100000);
    const auto one = stats::orthogonality_average(s5, 1);
    CHECK(one.empirical == 1);
    CHECK(one.predicted == 1);
    const auto nine = stats::orthogonality_average(s5, 9);
    CHECK(nine.predicted == doctest::Approx(0.75));
    CHECK(std::abs(nine.empirical - 0.75) < 0.01);
    CHECK(stats::orthogonality_average(s5, 225).predicted == doctest::Approx(0.75 * 5.0 / 6));
    CHECK(stats::orthogonality_average(s5, 4).predicted == 0);
    CHECK(stats::orthogonality_average(s5, 4).empirical == 0);
    CHECK(stats::orthogonality_average(s5, 7).predicted == 0);

    // non-square arguments shrink along D = 10^3, 10^4, 10^5
    for (std::uint64_t n : {3, 5, 7, 11}) {
        double prev = 2;
        for (std::int64_t D : {1000, 10000, 100000}) {
            const double a = std::abs(stats::orthogonality_average(arith::enumerate_discriminants(D), n).empirical);
            MESSAGE("n = " << n << ", D = " << D << ": |average| = " << a);
            CHECK(a < prev);
            prev = a;
        }
    }

    const auto h = holo::hecke_eigenforms(48, 64).forms;
    const auto h1 = stats::orthogonality_average(h, 1);
    CHECK(h1.empirical == 1);
    CHECK(h1.predicted == 1);
    CHECK(stats::orthogonality_average(h, 4).predicted == doctest::Approx(0.5));
    CHECK(stats::orthogonality_average(h, 9).predicted == doctest::Approx(1.0 / 3));
    CHECK(stats::orthogonality_average(h, 6).predicted == 0);
    CHECK_THROWS_AS(stats::orthogonality_average(h, 65), Error);
}

TEST_CASE("density kernels") {
    using stats::Symmetry;
    CHECK(stats::density_W(Symmetry::symplectic, 0) == 0);
    CHECK(stats::density_W(Symmetry::orthogonal_even, 0) == 2);
    for (double x = 0.05; x < 30; x += 0.37)
        for (auto s : {Symmetry::symplectic, Symmetry::orthogonal_even}) {
            CHECK(stats::density_W(s, x) == stats::density_W(s, -x));
            if (x >= 1) CHECK(std::abs(stats::density_W(s, x) - 1) <= 1 / (2 * std::numbers::pi * x));
        }
    for (double a : {0.1, 0.45, 1.0, 2.0}) {
        const double si = sine_integral(2 * std::numbers::pi * a) / (2 * std::numbers::pi);
        CHECK(stats::expected_zero_count(Symmetry::symplectic, a) == doctest::Approx(a - si).epsilon(1e-10));
        CHECK(stats::expected_zero_count(Symmetry::orthogonal_even, a) == doctest::Approx(a + si).epsilon(1e-10));
    }
}

TEST_CASE("test functions and predicted densities") {
    using stats::Symmetry;
    using stats::TestFunction;
    CHECK(stats::integral_phi(TestFunction::fejer) == doctest::Approx(1).epsilon(1e-8));
    // Parseval: the triangle against half the indicator of [-1, 1]
    CHECK(stats::predicted_density(TestFunction::fejer, Symmetry::symplectic) == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(stats::predicted_density(TestFunction::fejer, Symmetry::orthogonal_even) == doctest::Approx(1.5).epsilon(1e-8));
    CHECK(stats::conforming(TestFunction::fejer));
    CHECK_FALSE(stats::conforming(TestFunction::gaussian_cosine));
    CHECK(stats::test_function(TestFunction::fejer, 0) == 1);
    CHECK(stats::test_function(TestFunction::fejer, 1) == doctest::Approx(0).epsilon(1e-15));
    // int e^{-pi x^2} cos(pi x) dx = e^{-pi/4}
    CHECK(stats::integral_phi(TestFunction::gaussian_cosine) == doctest::Approx(std::exp(-std::numbers::pi / 4)).epsilon(1e-10));
}

TEST_CASE("smooth zero density integrates to the smooth count") {
    const double q = 8 * 40009.0;
    const double T = 25;
    double integral = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) integral += stats::smooth_zero_density(Family::quad, q, (i + 0.5) * T / n) * T / n;
    CHECK(integral == doctest::Approx(quad::smooth_zero_count(std::int64_t(q), T)).epsilon(1e-6));
}

TEST_CASE("one-level density: pure aggregation and tail correction") {
    const double D = 1e5;
    std::vector<stats::ZeroCoverage> lo, hi;
    for (std::int64_t d : {50021, 70001, 99991}) {
        const auto dq = quad::QuadraticDiscriminant::make(d);
        const auto z30 = quad::find_zeros(dq, 30);
        const auto z55 = quad::find_zeros(dq, 55);
        lo.push_back({"d=" + std::to_string(d), z30.ordinates, z30.T, double(dq.q)});
        hi.push_back({"d=" + std::to_string(d), z55.ordinates, z55.T, double(dq.q)});
    }
    const auto a = stats::one_level_density(lo, Family::quad, D);
    const auto b = stats::one_level_density(hi, Family::quad, D);
    CHECK(a.scaling == doctest::Approx(2 * std::numbers::pi));
    CHECK(a.predicted == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(b.tail_correction < a.tail_correction);
    // the zeros between 30 and 55 replace the smooth tail to within fluctuation
    CHECK(std::abs(a.empirical - b.empirical) < 0.01);

    auto shuffled = lo;
    std::reverse(shuffled.begin(), shuffled.end());
    for (auto& z : shuffled) std::reverse(z.ordinates.begin(), z.ordinates.end());
    CHECK(stats::one_level_density(shuffled, Family::quad, D).empirical == doctest::Approx(a.empirical).epsilon(1e-14));

    auto shallow = lo;
    const auto z3 = quad::find_zeros(quad::QuadraticDiscriminant::make(50021), 3);
    shallow[0] = {"d=50021", z3.ordinates, 3.0, 8 * 50021.0};
    try {
        stats::one_level_density(shallow, Family::quad, D);
        FAIL("expected a coverage error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::coverage);
    }
    const auto gc = stats::one_level_density(lo, Family::quad, D, stats::TestFunction::gaussian_cosine);
    CHECK_FALSE(gc.conforming);
}

TEST_CASE("tail checks") {
    const auto norm = stats::make_normalization(Family::quad, 1e5);
    std::vector<double> raw(1000);
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = std::sin(double(i));
    auto s = stats::normalize(raw, Family::quad, Statistic::B, norm);
    const auto t = stats::tail_bound_check(s, {0.0, 1.0});
    CHECK(t[0].gaussian == doctest::Approx(0.5));
    CHECK(t[1].gaussian == doctest::Approx(0.158655).epsilon(1e-6));
    double above = 0;
    for (double v : s.values) above += v > 1;
    CHECK(t[1].empirical == doctest::Approx(above / 1000));
    CHECK(t[1].excess == doctest::Approx(t[1].empirical - t[1].gaussian));
    auto p = s;
    p.statistic = Statistic::P;
    CHECK_THROWS_AS(stats::tail_bound_check(p, {1.0}), Error);
}

TEST_CASE("pearson and mass below") {
    CHECK(stats::pearson({1, 2, 3}, {2, 4, 6}) == doctest::Approx(1));
    CHECK(stats::pearson({1, 2, 3}, {3, 2, 1}) == doctest::Approx(-1));
    CHECK(stats::mass_below({1, 2, 3, 4}, 3) == doctest::Approx(0.5));
    CHECK_THROWS_AS(stats::pearson({1}, {1}), Error);
}
