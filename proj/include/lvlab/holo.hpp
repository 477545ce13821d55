#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace lvlab::holo {

using boost::multiprecision::mpz_int;
using cplx = std::complex<double>;

// Truncated q-expansion a(0..N) with exact integer coefficients.
struct QExpansion {
    int weight = 0;
    std::vector<mpz_int> coeffs;

    QExpansion() = default;
    QExpansion(int k, std::size_t N) : weight(k), coeffs(N + 1) {}

    std::size_t bound() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }
    const mpz_int& operator[](std::size_t n) const { return coeffs[n]; }
    mpz_int& operator[](std::size_t n) { return coeffs[n]; }

    QExpansion operator+(const QExpansion& o) const;
    QExpansion operator-(const QExpansion& o) const;
    QExpansion operator*(const QExpansion& o) const;  // truncated to the shorter bound
    QExpansion scaled(const mpz_int& c) const;
    std::size_t max_bits() const;
};

QExpansion eisenstein_e4(std::size_t N);
QExpansion eisenstein_e6(std::size_t N);
QExpansion delta_series(std::size_t N);

// dim S_k(SL_2(Z)) for even k >= 0.
int dim_cusp_forms(int k);

// Echelon basis g_i = q^i + O(q^{dim+1}) of S_k.
std::vector<QExpansion> miller_basis(int k, std::size_t N);

using IntMatrix = std::vector<std::vector<mpz_int>>;

// Matrix of T_p on the echelon basis: M[i][j] = (T_p g_j)(i+1).
IntMatrix hecke_matrix(const std::vector<QExpansion>& basis, int p);

// det(xI - A), leading coefficient first (division-free Berkowitz).
std::vector<mpz_int> charpoly(const IntMatrix& A);

struct HeckeEigenform {
    int k = 0;
    int index = 0;                // position in H_k (ascending lambda(2), then lambda(3))
    std::vector<double> lambda;   // lambda[n] for 1 <= n <= N; lambda[0] unused
    double basis_residual = 0;    // T_3 / T_5 certification residual

    std::size_t bound() const { return lambda.empty() ? 0 : lambda.size() - 1; }
};

struct EigenbasisReport {
    int k = 0;
    int dim = 0;
    double conditioning = 0;  // smallest gap between normalised T_2 eigenvalues
    std::vector<double> residuals;
    int combination_c = 0;    // operator used: T_2 + c T_3
    int precision_bits = 0;
};

struct EigenResult {
    std::vector<HeckeEigenform> forms;
    EigenbasisReport report;
};

constexpr double kCertificationTolerance = 1e-8;

EigenResult hecke_eigenforms(int k, std::size_t N);

// Number of lambda(n) needed by l_value_holo at s.
std::size_t coefficient_demand(int k, cplx s);

struct HoloLValue {
    cplx s;
    cplx value;
    double est_error = 0;
    std::size_t terms = 0;
};

// Incomplete-gamma identity with split delta; root number i^k.
HoloLValue l_value_holo(const HeckeEigenform& f, cplx s, std::optional<cplx> delta = std::nullopt);

// log of (2 pi)^{-s} Gamma(s + (k-1)/2).
cplx log_gamma_factor(int k, cplx s);
cplx completed(const HeckeEigenform& f, cplx s, cplx lvalue);

// L(s, f) from quadrature of int_1^inf f(iy)(y^w + i^k y^{w'}) dy/y, real s.
double mellin_oracle(const HeckeEigenform& f, double s);

}  // namespace lvlab::holo
