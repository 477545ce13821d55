#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lvlab::quad {

using cplx = std::complex<double>;

struct QuadraticDiscriminant {
    std::int64_t d = 1;
    std::int64_t q = 8;

    // Validates d odd squarefree positive.
    static QuadraticDiscriminant make(std::int64_t d);
    int chi(std::int64_t n) const;
    // chi(a) for 0 <= a < q.
    std::vector<signed char> chi_table() const;
};

enum class Method { hurwitz_oracle, afe };

const char* method_name(Method m);

struct QuadLValue {
    std::int64_t d = 0;
    cplx s;
    cplx value;
    Method method = Method::afe;
    double est_error = 0;
};

// Configurable-precision Hurwitz/Euler-Maclaurin evaluation, O(q) cost.
constexpr int kOracleMaxPrecision = 60;

QuadLValue l_value_oracle(const QuadraticDiscriminant& dq, cplx s, int precision = 15);

// L(s) and L'(s) from the same Euler-Maclaurin expansion, differentiated termwise.
struct LWithDerivative {
    cplx value;
    cplx derivative;
    double est_error = 0;
    std::string value_text;  // real part to the requested significant digits
};
LWithDerivative l_derivative_oracle(const QuadraticDiscriminant& dq, cplx s, int precision = 15);

// The incomplete-gamma identity with split point delta (Re delta > 0).
// Without delta a rotation is chosen from Im s.
QuadLValue l_value_afe(const QuadraticDiscriminant& dq, cplx s, std::optional<cplx> delta = std::nullopt);

// (q/pi)^{s/2} Gamma(s/2), as a logarithm.
cplx log_gamma_factor(std::int64_t q, cplx s);
cplx completed(const QuadraticDiscriminant& dq, cplx s, const QuadLValue& lv);

double hardy_theta(std::int64_t q, double t);

constexpr double kDefaultSupportedHeight = 60.0;
constexpr std::int64_t kOracleModulusCutoff = 10'000;

struct HardyValue {
    double t = 0;
    cplx rotated;  // e^{i theta} L(1/2 + it) before the imaginary part is dropped
    double z = 0;
};

HardyValue hardy_z_full(const QuadraticDiscriminant& dq, double t, double supported_height = kDefaultSupportedHeight);
double hardy_z(const QuadraticDiscriminant& dq, double t, double supported_height = kDefaultSupportedHeight);

// Lambda(1/2 + it) as a cosine transform of the even function
// F(v) = e^{v/4} sum chi(n) exp(-pi n^2 e^v / q), trapezoid in v.
class ThetaScanner {
public:
    static constexpr double kMaxHeight = 32.0;

    explicit ThetaScanner(const QuadraticDiscriminant& dq, double step = 0.08);

    // Lambda(1/2 + it), real.
    double lambda(double t) const;
    // Hardy Z(t) recovered from Lambda.
    double z(double t) const;

private:
    QuadraticDiscriminant dq_;
    double h_;
    std::vector<long double> f_;
};

struct ZeroList {
    std::int64_t id = 0;
    double T = 0;
    std::vector<double> ordinates;
    double gamma_min = 0;
    int count_check = 0;
    double grid_step = 0;
};

// Main term of the number of zeros with 0 < gamma <= T, theta(T)/pi.
double smooth_zero_count(std::int64_t q, double T);

struct ZeroSearchOptions {
    double supported_height = kDefaultSupportedHeight;
    double tolerance = 1e-9;
    int max_refinements = 3;
    int rescan_threshold = -2;
};

ZeroList find_zeros(const QuadraticDiscriminant& dq, double T, const ZeroSearchOptions& opt = {});

// Zero search on an arbitrary real function with the same grid/bisection policy.
template <class Z>
std::vector<double> sign_change_zeros(Z&& z, double T, double step, double tol);

}  // namespace lvlab::quad

namespace lvlab::quad {

template <class Z>
std::vector<double> sign_change_zeros(Z&& z, double T, double step, double tol) {
    std::vector<double> out;
    const int n = static_cast<int>(std::ceil(T / step));
    double t0 = 0, z0 = z(0.0);
    for (int i = 1; i <= n; ++i) {
        double t1 = std::min(T, i * step);
        double z1 = z(t1);
        if ((z0 < 0 && z1 > 0) || (z0 > 0 && z1 < 0)) {
            double a = t0, b = t1, za = z0;
            while (b - a > tol) {
                double m = 0.5 * (a + b);
                double zm = z(m);
                if (zm == 0) {
                    a = b = m;
                    break;
                }
                if ((za < 0) == (zm < 0)) {
                    a = m;
                    za = zm;
                } else {
                    b = m;
                }
            }
            double g = 0.5 * (a + b);
            if (g >= 1e-9) out.push_back(g);
        } else if (z1 == 0 && t1 >= 1e-9) {
            out.push_back(t1);
        }
        t0 = t1;
        z0 = z1;
    }
    return out;
}

}  // namespace lvlab::quad
