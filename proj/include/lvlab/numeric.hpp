#pragma once

#include <cmath>
#include <complex>
#include <vector>

namespace lvlab::num {

using cplx = std::complex<double>;

constexpr double pi = 3.14159265358979323846;

// Compensated (Neumaier) accumulator.
template <class T>
struct Neumaier {
    T sum{0};
    T comp{0};

    void add(T v) {
        T t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    T value() const { return sum + comp; }
};

template <class T>
T neumaier_sum(const std::vector<T>& xs) {
    Neumaier<T> acc;
    for (const T& x : xs) acc.add(x);
    return acc.value();
}

// log Gamma on the branch continuous from the positive real axis (Re z > 0);
// elsewhere some branch of log Gamma (only exp() is meaningful).
cplx log_gamma(cplx z);

// log|Gamma(x)| and sign for real x not a non-positive integer.
double log_abs_gamma(double x, int* sign);

cplx digamma(cplx z);

// Normalised upper incomplete gamma Q(a, z) = Gamma(a, z) / Gamma(a).
// Series for |z| < |a| + 1, Lentz continued fraction otherwise.
double gamma_q(double a, double z);
cplx gamma_q(cplx a, cplx z);

// Unnormalised upper incomplete gamma Gamma(a, z).
cplx gamma_upper(cplx a, cplx z);

double normal_cdf(double x);
double normal_sf(double x);

// sin(x)/x with the limit at 0.
double sinc(double x);

}  // namespace lvlab::num
