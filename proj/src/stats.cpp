#include "lvlab/stats.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "lvlab/error.hpp"
#include "lvlab/numeric.hpp"

namespace lvlab::stats {

using num::pi;

namespace {

double gk(const std::function<double(double)>& f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 5, 1e-13);
}

}  // namespace

const char* statistic_name(Statistic s) {
    switch (s) {
        case Statistic::P: return "P";
        case Statistic::A: return "A";
        case Statistic::B: return "B";
    }
    return "?";
}

Normalization make_normalization(Family family, double scale, double sigma, double x) {
    require(scale > std::exp(1.0), "make_normalization: scale must exceed e");
    Normalization n;
    n.scale = scale;
    n.log_log_scale = std::log(std::log(scale));
    n.mean_shift = (family == Family::holo ? 0.5 : -0.5) * n.log_log_scale;
    n.sigma = sigma;
    n.x = x;
    return n;
}

NormalizedSample normalize(const std::vector<double>& raw, Family family, Statistic stat, const Normalization& norm,
                           std::size_t excluded, std::vector<std::string> ids) {
    require(!raw.empty(), "normalize: empty sample");
    require(ids.empty() || ids.size() == raw.size(), "normalize: ids and values differ in length");
    require(norm.log_log_scale > 0, "normalize: log log scale must be positive");
    NormalizedSample out;
    out.family = family;
    out.statistic = stat;
    out.norm = norm;
    out.excluded = excluded;
    out.ids = std::move(ids);
    const double root = std::sqrt(norm.log_log_scale);
    out.values.reserve(raw.size());
    for (double v : raw) {
        require(std::isfinite(v), "normalize: non-finite raw value");
        out.values.push_back((v + norm.mean_shift) / root);
    }
    return out;
}

double ks_statistic(std::vector<double> v) {
    require(!v.empty(), "ks_statistic: empty sample");
    std::sort(v.begin(), v.end());
    const double n = double(v.size());
    double d = 0;
    std::size_t i = 0;
    while (i < v.size()) {
        std::size_t j = i;
        while (j < v.size() && v[j] == v[i]) ++j;
        const double F = num::normal_cdf(v[i]);
        d = std::max(d, std::max(F - double(i) / n, double(j) / n - F));
        i = j;
    }
    return d;
}

namespace {

double mass_above(const std::vector<double>& values, double threshold) {
    const auto c = std::count_if(values.begin(), values.end(), [&](double v) { return v > threshold; });
    return double(c) / double(values.size());
}

double quantile(const std::vector<double>& sorted, double q) {
    const double pos = q * double(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - double(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

Histogram freedman_diaconis(const std::vector<double>& values) {
    require(!values.empty(), "freedman_diaconis: empty sample");
    std::vector<double> s = values;
    std::sort(s.begin(), s.end());
    const double lo = s.front(), hi = s.back();
    const double iqr = quantile(s, 0.75) - quantile(s, 0.25);
    const double h = 2 * iqr / std::cbrt(double(s.size()));
    Histogram out;
    if (hi == lo || h <= 0) {
        out.edges = {lo - 0.5, hi + 0.5};
        out.counts = {s.size()};
        return out;
    }
    const auto bins = static_cast<std::size_t>(std::clamp(std::ceil((hi - lo) / h), 1.0, 10000.0));
    const double w = (hi - lo) / double(bins);
    out.edges.resize(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b) out.edges[b] = lo + w * double(b);
    out.edges.back() = hi;
    out.counts.assign(bins, 0);
    for (double x : s) {
        auto b = static_cast<std::size_t>((x - lo) / w);
        out.counts[std::min(b, bins - 1)]++;
    }
    return out;
}

DistributionReport distribution_report(const std::vector<double>& values) {
    require(values.size() >= 2, "distribution_report: need at least two values");
    DistributionReport r;
    r.n = values.size();
    const double n = double(r.n);
    r.moments[0] = num::neumaier_sum(values) / n;
    for (int k = 2; k <= 6; ++k) {
        num::Neumaier<double> acc;
        for (double x : values) acc.add(std::pow(x - r.moments[0], k));
        r.moments[k - 1] = acc.value() / (k == 2 ? n - 1 : n);
    }
    r.ks = ks_statistic(values);
    r.histogram = freedman_diaconis(values);
    for (double A : {0.5, 1.0, 1.5}) r.tails.push_back({A, mass_above(values, A)});
    return r;
}

DistributionReport distribution_report(const NormalizedSample& sample) { return distribution_report(sample.values); }

double double_factorial_odd(int m) {
    double r = 1;
    for (int j = 1; j <= m; ++j) r *= 2 * j - 1;
    return r;
}

double moment_prediction(int m, double x) {
    require(m >= 1, "moment_prediction: m must be positive");
    require(x > std::exp(1.0), "moment_prediction: x must exceed e");
    // (2m)!/(2^m m!) = (2m-1)!!
    return double_factorial_odd(m) * std::pow(std::log(std::log(x)), m);
}

OrthogonalityAverage orthogonality_average(const arith::DiscriminantSet& family, std::uint64_t n) {
    require(!family.members.empty(), "orthogonality_average: empty family");
    require(n >= 1, "orthogonality_average: n must be positive");
    OrthogonalityAverage out;
    out.members = family.members.size();
    long long s = 0;
    for (auto d : family.members) s += arith::kronecker(8 * d, std::int64_t(n));
    out.empirical = double(s) / double(out.members);
    if (n % 2 == 1 && arith::is_perfect_square(n)) {
        double p = 1;
        std::uint64_t r = n;
        for (std::uint64_t q = 3; q * q <= r; q += 2)
            if (r % q == 0) {
                p *= double(q) / double(q + 1);
                while (r % q == 0) r /= q;
            }
        if (r > 1) p *= double(r) / double(r + 1);
        out.predicted = p;
    }
    out.deviation = out.empirical - out.predicted;
    return out;
}

OrthogonalityAverage orthogonality_average(const std::vector<holo::HeckeEigenform>& forms, std::uint64_t m) {
    require(!forms.empty(), "orthogonality_average: empty family");
    require(m >= 1, "orthogonality_average: m must be positive");
    OrthogonalityAverage out;
    out.members = forms.size();
    num::Neumaier<double> acc;
    for (const auto& f : forms) {
        require(m <= f.bound(), "orthogonality_average: lambda(m) beyond the computed range");
        acc.add(f.lambda[m]);
    }
    out.empirical = acc.value() / double(forms.size());
    if (arith::is_perfect_square(m)) out.predicted = 1 / std::sqrt(double(m));
    out.deviation = out.empirical - out.predicted;
    return out;
}

double density_W(Symmetry sym, double x) {
    const double s = num::sinc(2 * pi * x);
    return sym == Symmetry::symplectic ? 1 - s : 1 + s;
}

double expected_zero_count(Symmetry sym, double a) {
    require(a >= 0, "expected_zero_count: a must be non-negative");
    if (a == 0) return 0;
    double acc = 0;
    for (double lo = 0; lo < a; lo += 1) acc += gk([&](double x) { return density_W(sym, x); }, lo, std::min(a, lo + 1));
    return acc;
}

const char* test_function_name(TestFunction tf) {
    return tf == TestFunction::fejer ? "fejer" : "gaussian-cosine";
}

bool conforming(TestFunction tf) { return tf == TestFunction::fejer; }

double test_function(TestFunction tf, double x) {
    if (tf == TestFunction::fejer) {
        const double s = num::sinc(pi * x);
        return s * s;
    }
    return std::exp(-pi * x * x) * std::cos(pi * x);
}

namespace {

// 2 int_0^inf phi(x) g(x) dx for even phi; g -> 1 at infinity.
double even_integral(TestFunction tf, const std::function<double(double)>& g) {
    auto f = [&](double x) { return test_function(tf, x) * g(x); };
    if (tf == TestFunction::gaussian_cosine) {
        double acc = 0;
        for (int n = 0; n < 10; ++n) acc += gk(f, n, n + 1);
        return 2 * acc;
    }
    constexpr int N = 4000;
    num::Neumaier<double> acc;
    for (int n = 0; n < N; ++n) acc.add(gk(f, n, n + 1));
    // mean of sin^2 is 1/2 beyond N
    acc.add(1 / (2 * pi * pi * N));
    return 2 * acc.value();
}

}  // namespace

double integral_phi(TestFunction tf) {
    return even_integral(tf, [](double) { return 1.0; });
}

double predicted_density(TestFunction tf, Symmetry sym) {
    return even_integral(tf, [sym](double x) { return density_W(sym, x); });
}

double smooth_zero_density(Family family, double conductor, double t) {
    if (family == Family::quad)
        return (std::log(conductor / pi) + num::digamma({0.25, 0.5 * t}).real()) / (2 * pi);
    return (num::digamma({0.5 * conductor, t}).real() - std::log(2 * pi)) / pi;
}

namespace {

// 2 int_T^inf phi(c t) rho(t) dt: both signs of the ordinate.
double tail_correction(TestFunction tf, Family family, double conductor, double T, double c) {
    auto f = [&](double t) { return test_function(tf, c * t) * smooth_zero_density(family, conductor, t); };
    const double unit = 1 / c;
    const int steps = tf == TestFunction::fejer ? 200 : 10;
    num::Neumaier<double> acc;
    double t = T;
    for (int i = 0; i < steps; ++i, t += unit) acc.add(gk(f, t, t + unit));
    if (tf == TestFunction::fejer) {
        // phi averages 1/(2 pi^2 u^2) beyond; rho varies slowly
        acc.add(smooth_zero_density(family, conductor, t) / (2 * pi * pi * c * c * t));
    }
    return 2 * acc.value();
}

}  // namespace

DensityTestResult one_level_density(const std::vector<ZeroCoverage>& zeros, Family family, double scale,
                                    TestFunction tf, const DensityOptions& opt) {
    require(!zeros.empty(), "one_level_density: no zero lists");
    require(scale > 1, "one_level_density: scale must exceed 1");
    DensityTestResult r;
    r.family = family;
    r.test = tf;
    r.conforming = conforming(tf);
    r.scaling = family == Family::quad ? 2 * pi : pi;
    r.members = zeros.size();
    const double c = std::log(scale) / r.scaling;
    num::Neumaier<double> total, tails;
    for (const auto& z : zeros) {
        require(z.T > 0, "one_level_density: zero list without height");
        num::Neumaier<double> m;
        for (double g : z.ordinates) m.add(2 * test_function(tf, c * g));
        const double tail = tail_correction(tf, family, z.conductor, z.T, c);
        if (tail > opt.tail_budget)
            fail(ErrorKind::coverage, "one_level_density: " + z.id + " covered to T = " + std::to_string(z.T) +
                                          " leaves tail " + std::to_string(tail) + " above budget " +
                                          std::to_string(opt.tail_budget));
        m.add(tail);
        tails.add(tail);
        total.add(m.value());
    }
    r.empirical = total.value() / double(r.members);
    r.tail_correction = tails.value() / double(r.members);
    r.predicted = predicted_density(tf, family == Family::quad ? Symmetry::symplectic : Symmetry::orthogonal_even);
    return r;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    require(a.size() == b.size() && a.size() >= 2, "pearson: need two equal-length samples of size >= 2");
    const double n = double(a.size());
    const double ma = num::neumaier_sum(a) / n, mb = num::neumaier_sum(b) / n;
    num::Neumaier<double> sab, saa, sbb;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab.add((a[i] - ma) * (b[i] - mb));
        saa.add((a[i] - ma) * (a[i] - ma));
        sbb.add((b[i] - mb) * (b[i] - mb));
    }
    return sab.value() / std::sqrt(saa.value() * sbb.value());
}

double mass_below(const std::vector<double>& values, double threshold) {
    require(!values.empty(), "mass_below: empty sample");
    const auto c = std::count_if(values.begin(), values.end(), [&](double v) { return v < threshold; });
    return double(c) / double(values.size());
}

std::vector<TailCheck> tail_bound_check(const NormalizedSample& sample, const std::vector<double>& thresholds) {
    require(sample.statistic != Statistic::P, "tail_bound_check: statistic must be A or B");
    require(!sample.values.empty(), "tail_bound_check: empty sample");
    std::vector<TailCheck> out;
    for (double A : thresholds) {
        TailCheck t;
        t.threshold = A;
        t.empirical = mass_above(sample.values, A);
        t.gaussian = num::normal_sf(A);
        t.excess = t.empirical - t.gaussian;
        out.push_back(t);
    }
    return out;
}

}  // namespace lvlab::stats
