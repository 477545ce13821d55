#include "lvlab/numeric.hpp"

#include <limits>

#include "lvlab/error.hpp"

namespace lvlab {

const char* kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::precondition: return "precondition";
        case ErrorKind::numeric: return "numeric";
        case ErrorKind::resource: return "resource";
        case ErrorKind::conditioning: return "conditioning";
        case ErrorKind::rescan: return "rescan";
        case ErrorKind::coverage: return "coverage";
        case ErrorKind::sign: return "sign";
        case ErrorKind::config: return "config";
        case ErrorKind::invariant: return "invariant";
        case ErrorKind::io: return "io";
    }
    return "unknown";
}

int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::config: return 2;
        case ErrorKind::resource: return 3;
        case ErrorKind::invariant: return 4;
        default: return 1;
    }
}

}  // namespace lvlab

namespace lvlab::num {

namespace {

// B_{2j} for j = 1..8
constexpr double kBern[8] = {1.0 / 6,       -1.0 / 30, 1.0 / 42,          -1.0 / 30,
                             5.0 / 66,      -691.0 / 2730, 7.0 / 6, -3617.0 / 510};

bool is_nonpositive_integer(cplx z) {
    return z.imag() == 0 && z.real() <= 0 && z.real() == std::floor(z.real());
}

// Shift count so that z + n has Re >= 1 and |z + n| >= 15.
int stirling_shift(cplx z) {
    int n = 0;
    while (z.real() + n < 1.0 || std::abs(z + double(n)) < 15.0) ++n;
    return n;
}

double log_gamma_of(double x, int* sign) { return log_abs_gamma(x, sign); }
cplx log_gamma_of(cplx z, int* sign) {
    *sign = 1;
    return log_gamma(z);
}

template <class V>
V make_exp(V logv, int sign) {
    return double(sign) * std::exp(logv);
}

template <class V>
V gamma_q_impl(V a, V z) {
    using std::abs;
    constexpr double eps = 1e-17;
    constexpr double tiny = 1e-300;
    if (z == V(0)) {
        if (std::real(a) <= 0) fail(ErrorKind::numeric, "gamma_q: Q(a,0) diverges for Re a <= 0");
        return V(1);
    }
    if (abs(z) < abs(a) + 1.0) {
        V term(1), sum(1);
        int n = 1;
        for (; n < 200000; ++n) {
            term *= z / (a + double(n));
            sum += term;
            if (abs(term) < eps * abs(sum)) break;
        }
        if (n >= 200000) fail(ErrorKind::numeric, "gamma_q: series did not converge");
        int sg = 1;
        V lg = log_gamma_of(a + 1.0, &sg);
        V p = make_exp(a * std::log(z) - z - lg, sg) * sum;
        return V(1) - p;
    }
    V b = z + 1.0 - a;
    V c = V(1.0 / tiny);
    V d = V(1) / b;
    V h = d;
    int i = 1;
    for (; i < 200000; ++i) {
        V an = -double(i) * (double(i) - a);
        b += 2.0;
        d = an * d + b;
        if (abs(d) < tiny) d = V(tiny);
        c = b + an / c;
        if (abs(c) < tiny) c = V(tiny);
        d = V(1) / d;
        V del = d * c;
        h *= del;
        if (abs(del - 1.0) < eps) break;
    }
    if (i >= 200000) fail(ErrorKind::numeric, "gamma_q: continued fraction did not converge");
    int sg = 1;
    V lg = log_gamma_of(a, &sg);
    return make_exp(a * std::log(z) - z - lg, sg) * h;
}

}  // namespace

cplx log_gamma(cplx z) {
    if (is_nonpositive_integer(z)) fail(ErrorKind::numeric, "log_gamma: pole");
    int n = stirling_shift(z);
    cplx shift_sum(0);
    for (int j = 0; j < n; ++j) shift_sum += std::log(z + double(j));
    cplx w = z + double(n);
    cplx r = (w - 0.5) * std::log(w) - w + 0.5 * std::log(2 * pi);
    cplx winv = 1.0 / w, w2 = winv * winv, wp = winv;
    for (int j = 1; j <= 8; ++j) {
        r += kBern[j - 1] / (2.0 * j * (2.0 * j - 1)) * wp;
        wp *= w2;
    }
    return r - shift_sum;
}

double log_abs_gamma(double x, int* sign) {
    if (x <= 0 && x == std::floor(x)) fail(ErrorKind::numeric, "log_abs_gamma: pole");
    if (sign) {
        if (x > 0)
            *sign = 1;
        else
            *sign = (static_cast<long long>(std::floor(x)) % 2 == 0) ? 1 : -1;
    }
    return std::lgamma(x);
}

cplx digamma(cplx z) {
    if (is_nonpositive_integer(z)) fail(ErrorKind::numeric, "digamma: pole");
    int n = stirling_shift(z);
    cplx shift_sum(0);
    for (int j = 0; j < n; ++j) shift_sum += 1.0 / (z + double(j));
    cplx w = z + double(n);
    cplx r = std::log(w) - 0.5 / w;
    cplx w2 = 1.0 / (w * w), wp = w2;
    for (int j = 1; j <= 8; ++j) {
        r -= kBern[j - 1] / (2.0 * j) * wp;
        wp *= w2;
    }
    return r - shift_sum;
}

double gamma_q(double a, double z) {
    if (z < 0) fail(ErrorKind::precondition, "gamma_q: negative real argument");
    return gamma_q_impl<double>(a, z);
}

cplx gamma_q(cplx a, cplx z) { return gamma_q_impl<cplx>(a, z); }

cplx gamma_upper(cplx a, cplx z) { return gamma_q(a, z) * std::exp(log_gamma(a)); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_sf(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double sinc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

}  // namespace lvlab::num
