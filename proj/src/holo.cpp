#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/multiprecision/mpfr.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "lvlab/arith.hpp"
#include "lvlab/error.hpp"
#include "lvlab/holo.hpp"
#include "lvlab/numeric.hpp"

namespace lvlab::holo {

namespace {

using boost::multiprecision::mpfr_float;
using num::pi;

class PrecisionScope {
public:
    explicit PrecisionScope(unsigned bits) : saved_(mpfr_float::default_precision()) {
        mpfr_float::default_precision(static_cast<unsigned>(std::ceil(bits * 0.30103)) + 2);
    }
    ~PrecisionScope() { mpfr_float::default_precision(saved_); }

private:
    unsigned saved_;
};

std::size_t max_bits(const IntMatrix& M) {
    std::size_t b = 0;
    for (const auto& row : M)
        for (const auto& x : row)
            if (x != 0) b = std::max<std::size_t>(b, msb(abs(x)) + 1);
    return b;
}

std::size_t max_bits(const std::vector<mpz_int>& v) {
    std::size_t b = 0;
    for (const auto& x : v)
        if (x != 0) b = std::max<std::size_t>(b, msb(abs(x)) + 1);
    return b;
}

// p(x) and p'(x), coefficients leading first.
void horner(const std::vector<mpfr_float>& c, const mpfr_float& x, mpfr_float& p, mpfr_float& dp) {
    p = c[0];
    dp = 0;
    for (std::size_t i = 1; i < c.size(); ++i) {
        dp = dp * x + p;
        p = p * x + c[i];
    }
}

int sgn(const mpfr_float& x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

mpfr_float root_in(const std::vector<mpfr_float>& c, mpfr_float lo, mpfr_float hi, unsigned bits) {
    mpfr_float plo, dlo, phi, dhi, pm, dm;
    horner(c, lo, plo, dlo);
    horner(c, hi, phi, dhi);
    int slo = sgn(plo), shi = sgn(phi);
    if (slo == 0) return lo;
    if (shi == 0) return hi;
    if (slo == shi) fail(ErrorKind::conditioning, "eigen solve: bracket without sign change (repeated root?)");
    for (int it = 0; it < 80; ++it) {
        mpfr_float m = (lo + hi) / 2;
        horner(c, m, pm, dm);
        int sm = sgn(pm);
        if (sm == 0) return m;
        if (sm == slo)
            lo = m;
        else
            hi = m;
    }
    mpfr_float x = (lo + hi) / 2;
    const mpfr_float tol = ldexp(mpfr_float(1), -static_cast<int>(bits) + 16);
    for (int it = 0; it < 200; ++it) {
        horner(c, x, pm, dm);
        int sm = sgn(pm);
        if (sm == 0) return x;
        if (sm == slo)
            lo = x;
        else
            hi = x;
        mpfr_float nx = dm != 0 ? mpfr_float(x - pm / dm) : mpfr_float((lo + hi) / 2);
        if (nx <= lo || nx >= hi) nx = (lo + hi) / 2;
        mpfr_float step = abs(nx - x);
        x = nx;
        if (step <= tol * (1 + abs(x))) break;
    }
    return x;
}

// All roots of a polynomial known to have only real simple roots in (-B, B),
// isolated by the derivative chain (Rolle).
std::vector<mpfr_float> real_roots(const std::vector<mpz_int>& poly, const mpfr_float& B, unsigned bits) {
    const std::size_t n = poly.size() - 1;
    std::vector<std::vector<mpfr_float>> chain(n);
    chain[0].reserve(n + 1);
    for (const auto& x : poly) chain[0].push_back(mpfr_float(x));
    for (std::size_t L = 1; L < n; ++L) {
        const auto& prev = chain[L - 1];
        const std::size_t m = prev.size() - 1;
        for (std::size_t i = 0; i < m; ++i) chain[L].push_back(prev[i] * mpfr_float(m - i));
    }
    std::vector<mpfr_float> roots{-chain[n - 1][1] / chain[n - 1][0]};
    for (std::size_t L = n - 1; L-- > 0;) {
        std::vector<mpfr_float> ends;
        ends.push_back(-B);
        for (auto& r : roots) ends.push_back(r);
        ends.push_back(B);
        std::vector<mpfr_float> next;
        for (std::size_t i = 0; i + 1 < ends.size(); ++i) next.push_back(root_in(chain[L], ends[i], ends[i + 1], bits));
        roots.swap(next);
    }
    return roots;
}

// Solve (M - lambda I) v = 0 with v[0] = 1.
std::vector<mpfr_float> eigenvector(const IntMatrix& M, const mpfr_float& lambda) {
    const std::size_t d = M.size();
    if (d == 1) return {mpfr_float(1)};
    // columns 1..d-1 unknown, rhs = -column 0
    std::vector<std::vector<mpfr_float>> A(d, std::vector<mpfr_float>(d));
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 1; j < d; ++j) {
            A[i][j - 1] = mpfr_float(M[i][j]);
            if (i == j) A[i][j - 1] -= lambda;
        }
        A[i][d - 1] = -mpfr_float(M[i][0]);
        if (i == 0) A[i][d - 1] += lambda;
    }
    const std::size_t u = d - 1;
    std::vector<std::size_t> rows(d);
    for (std::size_t i = 0; i < d; ++i) rows[i] = i;
    for (std::size_t col = 0; col < u; ++col) {
        std::size_t best = col;
        for (std::size_t r = col + 1; r < d; ++r)
            if (abs(A[rows[r]][col]) > abs(A[rows[best]][col])) best = r;
        std::swap(rows[col], rows[best]);
        const auto& piv = A[rows[col]];
        if (piv[col] == 0) fail(ErrorKind::conditioning, "eigenvector: singular reduced system");
        for (std::size_t r = col + 1; r < d; ++r) {
            mpfr_float f = A[rows[r]][col] / piv[col];
            if (f == 0) continue;
            for (std::size_t j = col; j <= u; ++j) A[rows[r]][j] -= f * piv[j];
        }
    }
    std::vector<mpfr_float> v(d);
    v[0] = 1;
    for (std::size_t col = u; col-- > 0;) {
        const auto& row = A[rows[col]];
        mpfr_float s = row[u];
        for (std::size_t j = col + 1; j < u; ++j) s -= row[j] * v[j + 1];
        v[col + 1] = s / row[col];
    }
    return v;
}

struct Attempt {
    std::vector<std::vector<double>> lambdas;
    std::vector<double> residuals;
    double min_gap = 0;
};

Attempt solve_once(int k, const std::vector<QExpansion>& basis, const IntMatrix& M, int c, unsigned bits) {
    const std::size_t d = basis.size();
    const std::size_t N = basis[0].bound();
    PrecisionScope scope(bits);
    const double half = (k - 1) / 2.0;
    mpfr_float B = 2 * pow(mpfr_float(2), mpfr_float(half));
    if (c) B += 2 * c * pow(mpfr_float(3), mpfr_float(half));
    B *= mpfr_float(1.01);

    const auto poly = charpoly(M);
    const auto roots = real_roots(poly, B, bits);
    Attempt out;
    out.min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < roots.size(); ++i)
        out.min_gap = std::min(out.min_gap, static_cast<double>((roots[i + 1] - roots[i]) / B));

    std::vector<mpfr_float> gval;  // basis coefficients as mpfr, [j * (N+1) + n]
    gval.reserve(d * (N + 1));
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t n = 0; n <= N; ++n) gval.push_back(mpfr_float(basis[j][n]));

    std::vector<mpfr_float> scale(N + 1);
    for (std::size_t n = 1; n <= N; ++n) scale[n] = exp(-mpfr_float(half) * log(mpfr_float(n)));

    for (const auto& root : roots) {
        auto v = eigenvector(M, root);
        std::vector<mpfr_float> lam(N + 1);
        for (std::size_t n = 1; n <= N; ++n) {
            mpfr_float a = 0;
            for (std::size_t j = 0; j < d; ++j) a += v[j] * gval[j * (N + 1) + n];
            lam[n] = a * scale[n];
        }
        double res = 0;
        for (int p : {2, 3, 5}) {
            for (std::size_t n = 1; n * p <= N; ++n) {
                mpfr_float r = lam[p] * lam[n] - lam[n * p];
                if (n % p == 0) r -= lam[n / p];
                res = std::max(res, static_cast<double>(abs(r)));
            }
        }
        std::vector<double> ld(N + 1, 0.0);
        for (std::size_t n = 1; n <= N; ++n) ld[n] = static_cast<double>(lam[n]);
        out.lambdas.push_back(std::move(ld));
        out.residuals.push_back(res);
    }
    return out;
}

}  // namespace

EigenResult hecke_eigenforms(int k, std::size_t N) {
    require(k >= 0 && k % 2 == 0, "hecke_eigenforms: k must be even");
    EigenResult out;
    out.report.k = k;
    const int d = dim_cusp_forms(k);
    out.report.dim = d;
    if (d == 0) return out;
    require(N >= std::size_t(2 * d + 2), "hecke_eigenforms: N must be >= 2 dim + 2");
    const std::size_t Nint = std::max<std::size_t>({N, std::size_t(3 * d), 10});
    const auto basis = miller_basis(k, Nint);
    const IntMatrix T2 = hecke_matrix(basis, 2);
    const IntMatrix T3 = hecke_matrix(basis, 3);
    std::size_t gbits = 0;
    for (const auto& g : basis) gbits = std::max(gbits, g.max_bits());

    for (int c = 0; c <= 5; ++c) {
        IntMatrix M = T2;
        if (c)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) M[i][j] += c * T3[i][j];
        const std::size_t mbits = max_bits(M);
        const std::size_t pbits = max_bits(charpoly(M));
        unsigned bits = static_cast<unsigned>(std::max(128 + 2 * gbits + mbits, pbits + 128));
        bool conditioned = true;
        for (int attempt = 0; attempt < 4; ++attempt, bits *= 2) {
            Attempt a;
            try {
                a = solve_once(k, basis, M, c, bits);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::conditioning) throw;
                conditioned = false;
                break;
            }
            if (d > 1 && a.min_gap < std::ldexp(1.0, -static_cast<int>(std::min(bits / 8, 900u)))) {
                conditioned = false;
                break;
            }
            const double worst = *std::max_element(a.residuals.begin(), a.residuals.end());
            if (worst > kCertificationTolerance) continue;
            std::vector<std::size_t> order(a.lambdas.size());
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
            std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
                if (a.lambdas[x][2] != a.lambdas[y][2]) return a.lambdas[x][2] < a.lambdas[y][2];
                return a.lambdas[x][3] < a.lambdas[y][3];
            });
            for (std::size_t i = 0; i < order.size(); ++i) {
                HeckeEigenform f;
                f.k = k;
                f.index = static_cast<int>(i);
                f.lambda = a.lambdas[order[i]];
                f.lambda.resize(N + 1);
                f.basis_residual = a.residuals[order[i]];
                out.report.residuals.push_back(f.basis_residual);
                out.forms.push_back(std::move(f));
            }
            double gap = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i + 1 < out.forms.size(); ++i)
                gap = std::min(gap, out.forms[i + 1].lambda[2] - out.forms[i].lambda[2]);
            out.report.conditioning = d > 1 ? gap : 0.0;
            out.report.combination_c = c;
            out.report.precision_bits = static_cast<int>(bits);
            return out;
        }
        if (conditioned)
            fail(ErrorKind::numeric, "hecke_eigenforms: k = " + std::to_string(k) +
                                         " certification residual above tolerance after precision doubling");
    }
    fail(ErrorKind::conditioning, "hecke_eigenforms: k = " + std::to_string(k) + " T_2 + c T_3 never separated");
}

cplx log_gamma_factor(int k, cplx s) { return -s * std::log(2 * pi) + num::log_gamma(s + 0.5 * (k - 1)); }

cplx completed(const HeckeEigenform& f, cplx s, cplx lvalue) { return std::exp(log_gamma_factor(f.k, s)) * lvalue; }

namespace {

cplx default_delta(cplx s) {
    const double t = s.imag();
    double phi = 0;
    if (std::abs(t) > 0) phi = std::copysign(std::max(0.0, pi / 2 - std::log(1e4) / std::abs(t)), t);
    return std::polar(1.0, phi);
}

bool is_central(cplx s) { return s.real() == 0.5 && s.imag() == 0.0; }

}  // namespace

std::size_t coefficient_demand(int k, cplx s) {
    const cplx delta = default_delta(s);
    const double w = std::abs(s + 0.5 * (k - 1)), wp = std::abs(1.0 - s + 0.5 * (k - 1));
    const double wr = s.real() + 0.5 * (k - 1), wpr = 1 - s.real() + 0.5 * (k - 1);
    for (std::size_t n = 1;; ++n) {
        const double z = 2 * pi * n * delta.real();
        if (z <= std::max(w, wp) + 10) continue;
        const double mag = 2 * std::sqrt(double(n)) * std::pow(double(n), std::abs(s.real()) + 1);
        const double q1 = num::gamma_q(std::max(wr, 0.5), z), q2 = num::gamma_q(std::max(wpr, 0.5), z);
        if (mag * std::max(q1, q2) * 1e4 < 1e-18) return n;
    }
}

HoloLValue l_value_holo(const HeckeEigenform& f, cplx s, std::optional<cplx> delta) {
    const int k = f.k;
    if (is_central(s) && k % 4 == 2)
        fail(ErrorKind::precondition,
             "l_value_holo: k = " + std::to_string(k) +
                 " is 2 mod 4, the root number is -1 and the central value L(1/2,f) = 0 is forced");
    const cplx dl = delta ? *delta : default_delta(s);
    require(dl.real() > 0, "l_value_holo: split point needs Re delta > 0");
    const double eps = (k % 4 == 0) ? 1.0 : -1.0;
    const cplx w = s + 0.5 * (k - 1), wp = 1.0 - s + 0.5 * (k - 1);
    HoloLValue out;
    out.s = s;
    const std::size_t N = f.bound();
    if (s.imag() == 0 && dl.imag() == 0) {
        const double sr = s.real(), d = dl.real();
        const double wr = w.real(), wpr = wp.real();
        const double X = std::exp((2 * sr - 1) * std::log(2 * pi) + std::lgamma(wpr) - std::lgamma(wr));
        num::Neumaier<double> s1, s2;
        double last = 0, abs_total = 0;
        for (std::size_t n = 1;; ++n) {
            if (n > N)
                fail(ErrorKind::precondition, "l_value_holo: insufficient eigenvalues, need more than " +
                                                  std::to_string(N) + " for k = " + std::to_string(k));
            const double z1 = 2 * pi * n * d, z2 = 2 * pi * n / d;
            const double ln = std::log(double(n));
            const double t1 = f.lambda[n] * std::exp(-sr * ln) * num::gamma_q(wr, z1);
            const double t2 = f.lambda[n] * std::exp((sr - 1) * ln) * num::gamma_q(wpr, z2);
            s1.add(t1);
            s2.add(t2);
            // Deligne-type bound for the size of this term
            const double bound = 2 * std::sqrt(double(n)) *
                                 (std::exp(-sr * ln) * num::gamma_q(wr, z1) +
                                  std::abs(X) * std::exp((sr - 1) * ln) * num::gamma_q(wpr, z2));
            last = bound;
            abs_total += std::abs(t1) + std::abs(X * t2);
            const double cur = s1.value() + eps * X * s2.value();
            if (z1 > std::abs(wr) + 10 && z2 > std::abs(wpr) + 10 && bound < 1e-18 * std::max(1e-300, std::abs(cur))) {
                out.terms = n;
                break;
            }
        }
        out.value = s1.value() + eps * X * s2.value();
        out.est_error = 10 * last + 4e-16 * abs_total;
        return out;
    }
    const cplx X = std::exp((2.0 * s - 1.0) * std::log(2 * pi) + num::log_gamma(wp) - num::log_gamma(w));
    cplx s1, s2;
    double last = 0, abs_total = 0;
    for (std::size_t n = 1;; ++n) {
        if (n > N)
            fail(ErrorKind::precondition, "l_value_holo: insufficient eigenvalues, need more than " +
                                              std::to_string(N) + " for k = " + std::to_string(k));
        const cplx z1 = 2 * pi * double(n) * dl, z2 = 2 * pi * double(n) / dl;
        const double ln = std::log(double(n));
        const cplx q1 = num::gamma_q(w, z1), q2 = num::gamma_q(wp, z2);
        const cplx t1 = f.lambda[n] * std::exp(-s * ln) * q1;
        const cplx t2 = f.lambda[n] * std::exp((s - 1.0) * ln) * q2;
        s1 += t1;
        s2 += t2;
        const double bound =
            2 * std::sqrt(double(n)) * (std::abs(std::exp(-s * ln) * q1) + std::abs(X * std::exp((s - 1.0) * ln) * q2));
        last = bound;
        abs_total += std::abs(t1) + std::abs(X * t2);
        const cplx cur = s1 + eps * X * s2;
        if (z1.real() > std::abs(w) + 10 && z2.real() > std::abs(wp) + 10 &&
            bound < 1e-18 * std::max(1e-300, std::abs(cur))) {
            out.terms = n;
            break;
        }
    }
    out.value = s1 + eps * X * s2;
    out.est_error = 10 * last + 4e-16 * abs_total;
    return out;
}

double mellin_oracle(const HeckeEigenform& f, double s) {
    const int k = f.k;
    const double half = 0.5 * (k - 1);
    const double w = s + half, wp = 1 - s + half;
    const double eps = (k % 4 == 0) ? 1.0 : -1.0;
    const std::size_t N = f.bound();
    // f(iy) for y >= 1: keep terms within e^{-80} of the largest at y = 1
    auto logterm = [&](double n) { return half * std::log(n) - 2 * pi * n; };
    const double peak = std::max(1.0, half / (2 * pi));
    const double top = std::max(logterm(std::floor(peak)), logterm(std::ceil(peak)));
    std::size_t nmax = static_cast<std::size_t>(std::ceil(peak));
    while (logterm(double(nmax)) > top - 80) ++nmax;
    require(nmax <= N, "mellin_oracle: need lambda(n) up to n = " + std::to_string(nmax));
    auto integrand = [&](double y) {
        const double ly = std::log(y);
        double acc = 0;
        for (std::size_t n = 1; n <= nmax; ++n) {
            const double base = half * std::log(double(n)) - 2 * pi * double(n) * y;
            acc += f.lambda[n] * (std::exp(base + (w - 1) * ly) + eps * std::exp(base + (wp - 1) * ly));
        }
        return acc;
    };
    boost::math::quadrature::exp_sinh<double> integrator;
    double err = 0;
    const double M = integrator.integrate(integrand, 1.0, std::numeric_limits<double>::infinity(), 1e-14, &err);
    return M / std::exp(-w * std::log(2 * pi) + std::lgamma(w));
}

}  // namespace lvlab::holo
