// Hurwitz-zeta oracle for L(s, chi_8d):
//   L(s) = sum_{n <= Nq} chi(n) n^{-s} + q^{-s} sum_a chi(a) zeta(s, N + a/q)
// with zeta(s, w) by Euler-Maclaurin.

#include <boost/math/special_functions/bernoulli.hpp>
#include <boost/multiprecision/mpfr.hpp>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "lvlab/error.hpp"
#include "lvlab/quad.hpp"

namespace lvlab::quad {

namespace {

using boost::multiprecision::mpfr_float;

template <class T>
struct Cx {
    T re{0}, im{0};
    Cx() = default;
    Cx(T r, T i) : re(std::move(r)), im(std::move(i)) {}
    Cx operator+(const Cx& o) const { return {re + o.re, im + o.im}; }
    Cx operator-(const Cx& o) const { return {re - o.re, im - o.im}; }
    Cx operator*(const Cx& o) const { return {re * o.re - im * o.im, re * o.im + im * o.re}; }
    Cx operator*(const T& k) const { return {re * k, im * k}; }
    Cx operator/(const Cx& o) const {
        T den = o.re * o.re + o.im * o.im;
        return {(re * o.re + im * o.im) / den, (im * o.re - re * o.im) / den};
    }
    Cx& operator+=(const Cx& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    T norm1() const {
        using std::abs;
        return abs(re) + abs(im);
    }
};

// w^{-s} for real w > 0, given log w.
template <class T>
Cx<T> pow_neg(const T& logw, const Cx<T>& s) {
    using std::cos;
    using std::exp;
    using std::sin;
    T mag = exp(-s.re * logw);
    T ang = -s.im * logw;
    return {mag * cos(ang), mag * sin(ang)};
}

template <class T>
T to_T(double x) {
    return T(x);
}

template <class T>
double to_d(const T& x) {
    return static_cast<double>(x);
}

template <class T>
std::string decimal_text(const T& x, int digits) {
    if constexpr (std::is_same_v<T, long double>) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.*Le", std::max(0, digits - 1), x);
        return buf;
    } else {
        return x.str(digits, std::ios_base::scientific);
    }
}

template <class T>
T epsilon_of() {
    if constexpr (std::is_same_v<T, long double>)
        return std::numeric_limits<long double>::epsilon();
    else
        return pow(T(10), -static_cast<int>(mpfr_float::default_precision()));
}

template <class T>
LWithDerivative hurwitz_eval(const QuadraticDiscriminant& dq, cplx s_in, int precision, bool want_deriv) {
    using std::abs;
    using std::exp;
    using std::log;
    using std::sqrt;
    const std::int64_t q = dq.q;
    const Cx<T> s{to_T<T>(s_in.real()), to_T<T>(s_in.imag())};
    const double sigma = s_in.real();
    const double abs_s = std::abs(s_in);
    const double ln10 = std::log(10.0);

    std::int64_t N = std::max<std::int64_t>(
        2, static_cast<std::int64_t>(std::ceil((abs_s + precision * ln10 + 10.0) / (2 * 3.141592653589793))));

    // Euler-Maclaurin coefficients c_j = B_{2j}/(2j)! (s)_{2j-1}; N grows until
    // the remainder bound at w = N reaches the target.
    const double target = std::pow(10.0, -(precision + 2)) / (std::pow(double(q), std::max(0.0, 1.0 - sigma)) + 1.0);
    std::vector<Cx<T>> c, cprime;
    double remainder = std::numeric_limits<double>::infinity();
    for (int attempt = 0; attempt < 12 && !(remainder < target); ++attempt) {
        if (attempt > 0) N = N + N / 2 + 1;
        if (double(N) * double(q) > 5e8)
            fail(ErrorKind::resource, "l_value_oracle: N*q = " + std::to_string(double(N) * double(q)) +
                                          " beyond the oracle budget");
        c.clear();
        cprime.clear();
        Cx<T> rising = s;  // (s)_1
        Cx<T> rising_dlog = Cx<T>{T(1), T(0)} / s;
        T fact2j = T(1);
        const T logN = log(T(N));
        double prev = std::numeric_limits<double>::infinity();
        for (int j = 1; j <= 400; ++j) {
            fact2j *= T(2 * j - 1) * T(2 * j);
            T b = boost::math::bernoulli_b2n<T>(j);
            Cx<T> cj = rising * (b / fact2j);
            c.push_back(cj);
            cprime.push_back(cj * rising_dlog);
            // next rising factorial (s)_{2j+1} and its log-derivative
            Cx<T> a1 = s + Cx<T>{T(2 * j - 1), T(0)};
            Cx<T> a2 = s + Cx<T>{T(2 * j), T(0)};
            rising = rising * a1 * a2;
            rising_dlog = rising_dlog + Cx<T>{T(1), T(0)} / a1 + Cx<T>{T(1), T(0)} / a2;
            // bound of the next term at w = N, then the remainder bound
            T bn = boost::math::bernoulli_b2n<T>(j + 1);
            T fn = fact2j * T(2 * j + 1) * T(2 * j + 2);
            T mag = abs(bn / fn) * sqrt(rising.re * rising.re + rising.im * rising.im);
            double next_term = to_d<T>(mag * exp(-(T(sigma) + T(2 * j + 1)) * logN));
            double ratio = std::abs(s_in + double(2 * j + 3)) / (sigma + 2 * j + 3);
            remainder = next_term * ratio;
            if (remainder < target) break;
            if (j > 3 && next_term > prev) break;  // past the smallest term
            prev = next_term;
        }
    }
    if (!(remainder < target))
        fail(ErrorKind::numeric, "l_value_oracle: Euler-Maclaurin tail did not converge (remainder " +
                                     std::to_string(remainder) + ")");

    const auto chi = dq.chi_table();
    Cx<T> sum, dsum;
    T abs_sum = T(0);

    const std::int64_t n_max = N * q;
    for (std::int64_t n = 1; n <= n_max; ++n) {
        int ch = chi[n % q];
        if (ch == 0) continue;
        T ln = log(T(n));
        Cx<T> term = pow_neg<T>(ln, s);
        abs_sum += abs(term.re) + abs(term.im);
        if (ch > 0) {
            sum += term;
            if (want_deriv) dsum = dsum - term * ln;
        } else {
            sum = sum - term;
            if (want_deriv) dsum = dsum + term * ln;
        }
    }

    const T logq = log(T(q));
    const Cx<T> qs = pow_neg<T>(logq, s);
    const Cx<T> one{T(1), T(0)};
    const Cx<T> sm1 = s - one;
    const Cx<T> inv_sm1 = one / sm1;
    Cx<T> tail, dtail;
    for (std::int64_t a = 1; a < q; ++a) {
        int ch = chi[a];
        if (ch == 0) continue;
        T w = T(N) + T(a) / T(q);
        T lw = log(w);
        Cx<T> ws = pow_neg<T>(lw, s);
        T w2inv = T(1) / (w * w);
        Cx<T> G = inv_sm1 * w + Cx<T>{T(0.5), T(0)};
        Cx<T> Gp = (inv_sm1 * inv_sm1) * (-w);
        T wp = w;  // w^{1-2j}
        for (std::size_t j = 0; j < c.size(); ++j) {
            wp *= w2inv;
            G += c[j] * wp;
            if (want_deriv) Gp += cprime[j] * wp;
        }
        Cx<T> term = ws * G;
        abs_sum += (ws * G).norm1() * (qs.norm1());
        if (ch > 0)
            tail += term;
        else
            tail = tail - term;
        if (want_deriv) {
            Cx<T> dterm = ws * (Gp - G * lw);
            if (ch > 0)
                dtail += dterm;
            else
                dtail = dtail - dterm;
        }
    }
    Cx<T> value = sum + qs * tail;
    LWithDerivative out;
    out.value = cplx(to_d<T>(value.re), to_d<T>(value.im));
    out.value_text = decimal_text<T>(value.re, precision);
    if (want_deriv) {
        Cx<T> d = dsum + qs * (dtail - tail * logq);
        out.derivative = cplx(to_d<T>(d.re), to_d<T>(d.im));
    }
    double round = to_d<T>(epsilon_of<T>() * abs_sum) * 4.0;
    out.est_error = remainder * double(q) * std::pow(double(q), -sigma) + round;
    return out;
}

LWithDerivative dispatch(const QuadraticDiscriminant& dq, cplx s, int precision, bool deriv) {
    require(!(s.real() == 1.0 && s.imag() == 0.0), "l_value_oracle: s = 1 excluded");
    require(precision >= 1 && precision <= kOracleMaxPrecision,
            "l_value_oracle: precision must be in [1, " + std::to_string(kOracleMaxPrecision) + "]");
    const double allowed = std::pow(10.0, -precision + 2);
    LWithDerivative r;
    bool done = false;
    // Long double first; the rounding estimate decides whether MPFR is needed.
    if (precision <= 17) {
        r = hurwitz_eval<long double>(dq, s, precision, deriv);
        done = r.est_error <= allowed;
    }
    if (!done) {
        const unsigned digits = static_cast<unsigned>(precision + 10 + std::ceil(std::log10(double(dq.q))));
        const unsigned saved = mpfr_float::default_precision();
        mpfr_float::default_precision(digits);
        try {
            r = hurwitz_eval<mpfr_float>(dq, s, precision, deriv);
        } catch (...) {
            mpfr_float::default_precision(saved);
            throw;
        }
        mpfr_float::default_precision(saved);
    }
    if (!(r.est_error <= allowed))
        fail(ErrorKind::numeric, "l_value_oracle: error estimate " + std::to_string(r.est_error) +
                                     " above requested precision " + std::to_string(precision));
    return r;
}

}  // namespace

QuadLValue l_value_oracle(const QuadraticDiscriminant& dq, cplx s, int precision) {
    auto r = dispatch(dq, s, precision, false);
    QuadLValue out;
    out.d = dq.d;
    out.s = s;
    out.value = s.imag() == 0 ? cplx(r.value.real(), 0.0) : r.value;
    out.method = Method::hurwitz_oracle;
    out.est_error = r.est_error;
    return out;
}

LWithDerivative l_derivative_oracle(const QuadraticDiscriminant& dq, cplx s, int precision) {
    return dispatch(dq, s, precision, true);
}

}  // namespace lvlab::quad
