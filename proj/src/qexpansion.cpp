#include <string>

#include "lvlab/error.hpp"
#include "lvlab/holo.hpp"

namespace lvlab::holo {

QExpansion QExpansion::operator+(const QExpansion& o) const {
    QExpansion r(weight, std::min(bound(), o.bound()));
    for (std::size_t n = 0; n < r.coeffs.size(); ++n) r.coeffs[n] = coeffs[n] + o.coeffs[n];
    return r;
}

QExpansion QExpansion::operator-(const QExpansion& o) const {
    QExpansion r(weight, std::min(bound(), o.bound()));
    for (std::size_t n = 0; n < r.coeffs.size(); ++n) r.coeffs[n] = coeffs[n] - o.coeffs[n];
    return r;
}

QExpansion QExpansion::operator*(const QExpansion& o) const {
    const std::size_t N = std::min(bound(), o.bound());
    QExpansion r(weight + o.weight, N);
    for (std::size_t i = 0; i <= N; ++i) {
        if (coeffs[i] == 0) continue;
        const mpz_int& a = coeffs[i];
        for (std::size_t j = 0; i + j <= N; ++j) {
            if (o.coeffs[j] == 0) continue;
            r.coeffs[i + j] += a * o.coeffs[j];
        }
    }
    return r;
}

QExpansion QExpansion::scaled(const mpz_int& c) const {
    QExpansion r = *this;
    for (auto& x : r.coeffs) x *= c;
    return r;
}

std::size_t QExpansion::max_bits() const {
    std::size_t b = 0;
    for (const auto& x : coeffs)
        if (x != 0) b = std::max<std::size_t>(b, msb(abs(x)) + 1);
    return b;
}

namespace {

QExpansion eisenstein(int k, long long c, std::size_t N) {
    // 1 + c * sum sigma_{k-1}(n) q^n
    QExpansion e(k, N);
    std::vector<mpz_int> sigma(N + 1);
    for (std::size_t d = 1; d <= N; ++d) {
        mpz_int p = pow(mpz_int(d), static_cast<unsigned>(k - 1));
        for (std::size_t m = d; m <= N; m += d) sigma[m] += p;
    }
    e[0] = 1;
    for (std::size_t n = 1; n <= N; ++n) e[n] = sigma[n] * c;
    return e;
}

QExpansion power(const QExpansion& base, int e, std::size_t N) {
    QExpansion r(0, N);
    r[0] = 1;
    QExpansion b = base;
    while (e > 0) {
        if (e & 1) r = r * b;
        e >>= 1;
        if (e) b = b * b;
    }
    return r;
}

}  // namespace

QExpansion eisenstein_e4(std::size_t N) { return eisenstein(4, 240, N); }
QExpansion eisenstein_e6(std::size_t N) { return eisenstein(6, -504, N); }

QExpansion delta_series(std::size_t N) {
    QExpansion e4 = eisenstein_e4(N), e6 = eisenstein_e6(N);
    QExpansion num = e4 * e4 * e4 - e6 * e6;
    QExpansion d(12, N);
    for (std::size_t n = 0; n <= N; ++n) d[n] = num[n] / 1728;
    return d;
}

int dim_cusp_forms(int k) {
    require(k >= 0 && k % 2 == 0, "dim_cusp_forms: k must be even and non-negative");
    if (k < 12) return 0;
    if (k % 12 == 2) return k / 12 - 1;
    return k / 12;
}

std::vector<QExpansion> miller_basis(int k, std::size_t N) {
    require(k >= 0 && k % 2 == 0, "miller_basis: k must be even");
    const int d = dim_cusp_forms(k);
    if (d == 0) return {};
    require(N >= std::size_t(d) + 1, "miller_basis: N = " + std::to_string(N) + " below dim + 1 = " +
                                         std::to_string(d + 1));
    int rem = k - 12 * d;  // in {0, 4, 6, 8, 10, 14}
    int a = 0, b = 0;
    switch (rem) {
        case 0: break;
        case 4: a = 1; break;
        case 6: b = 1; break;
        case 8: a = 2; break;
        case 10: a = 1; b = 1; break;
        case 14: a = 2; b = 1; break;
        default: fail(ErrorKind::invariant, "miller_basis: unexpected residue " + std::to_string(rem));
    }
    const QExpansion e4 = eisenstein_e4(N), e6 = eisenstein_e6(N), delta = delta_series(N);
    const QExpansion e4a = power(e4, a, N);
    const QExpansion e6sq = e6 * e6;
    // E6^{2m + b} for m = 0..d-1
    std::vector<QExpansion> e6pow(d);
    e6pow[0] = power(e6, b, N);
    for (int m = 1; m < d; ++m) e6pow[m] = e6pow[m - 1] * e6sq;

    std::vector<QExpansion> g(d);
    QExpansion dj = delta;
    for (int j = 1; j <= d; ++j) {
        g[j - 1] = dj * e6pow[d - j] * e4a;
        g[j - 1].weight = k;
        if (j < d) dj = dj * delta;
    }
    for (int j = d - 1; j >= 0; --j) {
        for (int i = j + 1; i < d; ++i) {
            mpz_int c = g[j][i + 1];
            if (c != 0) {
                QExpansion t = g[i].scaled(c);
                for (std::size_t n = 0; n <= N; ++n) g[j][n] -= t[n];
            }
        }
    }
    for (int j = 0; j < d; ++j)
        if (g[j][j + 1] != 1) fail(ErrorKind::invariant, "miller_basis: leading coefficient is not 1");
    return g;
}

IntMatrix hecke_matrix(const std::vector<QExpansion>& basis, int p) {
    const std::size_t d = basis.size();
    IntMatrix M(d, std::vector<mpz_int>(d));
    if (d == 0) return M;
    const int k = basis[0].weight;
    require(basis[0].bound() >= d * std::size_t(p), "hecke_matrix: need N >= p * dim");
    const mpz_int pk = pow(mpz_int(p), static_cast<unsigned>(k - 1));
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t i = 0; i < d; ++i) {
            const std::size_t n = i + 1;
            mpz_int v = basis[j][n * p];
            if (n % p == 0) v += pk * basis[j][n / p];
            M[i][j] = v;
        }
    }
    return M;
}

std::vector<mpz_int> charpoly(const IntMatrix& A) {
    const std::size_t n = A.size();
    std::vector<mpz_int> v{1};
    for (std::size_t r = 0; r < n; ++r) {
        std::vector<mpz_int> t(r + 2);
        t[0] = 1;
        t[1] = -A[r][r];
        std::vector<mpz_int> X(r);
        for (std::size_t i = 0; i < r; ++i) X[i] = A[i][r];
        for (std::size_t kk = 2; kk < r + 2; ++kk) {
            mpz_int s = 0;
            for (std::size_t i = 0; i < r; ++i) s += A[r][i] * X[i];
            t[kk] = -s;
            std::vector<mpz_int> Y(r);
            for (std::size_t i = 0; i < r; ++i)
                for (std::size_t j = 0; j < r; ++j) Y[i] += A[i][j] * X[j];
            X.swap(Y);
        }
        std::vector<mpz_int> w(r + 2);
        for (std::size_t i = 0; i < r + 2; ++i)
            for (std::size_t j = 0; j <= std::min(i, r); ++j) w[i] += t[i - j] * v[j];
        v.swap(w);
    }
    return v;
}

}  // namespace lvlab::holo
