#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lvlab/holo.hpp"
#include "lvlab/quad.hpp"

namespace lvlab::selberg {

enum class Family { quad, holo };

const char* family_name(Family f);

// One L-function of either family together with the family scale (D or k).
struct Member {
    Family family = Family::quad;
    quad::QuadraticDiscriminant dq;
    const holo::HeckeEigenform* form = nullptr;
    double scale = 0;

    static Member of(const quad::QuadraticDiscriminant& dq, double D);
    static Member of(const holo::HeckeEigenform& f);

    std::string id() const;
    // C = 8d or k^2, as a logarithm.
    double log_conductor() const;
    // log log D or log log k, the normalising scale of the statistics.
    double log_log_scale() const;
    // +1/2 log log k for holo, -1/2 log log D for quad.
    double mean_shift() const;
};

class SelbergWeight {
public:
    explicit SelbergWeight(double x);
    double x() const { return x_; }
    double log_x() const { return log_x_; }
    double operator()(double n) const;

private:
    double x_;
    double log_x_;
};

double weight_a_x(double x, std::uint64_t n);

struct LambdaCoefficient {
    Family family = Family::quad;
    std::uint64_t n = 0;
    double value = 0;
};

LambdaCoefficient lambda_coeff(const Member& m, std::uint64_t n);

struct SumOptions {
    bool log_weighted = false;
    // Sum n <= cutoff with unit weights instead of a_x over n <= x^3.
    std::optional<double> cutoff;
};

double truncated_sum(const Member& m, double x, double s, const SumOptions& opt = {});

struct ZeroPoint {
    double beta = 0;  // offset from the critical line
    double gamma = 0;
};

std::vector<ZeroPoint> critical_zeros(const quad::ZeroList& zl);

enum class SigmaSource { default_floor, zero_driven };

struct SigmaX {
    double x = 0;
    double sigma = 0;
    SigmaSource source = SigmaSource::default_floor;
};

bool in_region(const ZeroPoint& z, double x);
SigmaX sigma_x(const std::vector<ZeroPoint>& zeros, double x);

struct PrimeSumStat {
    std::string id;
    double x = 0;
    double P = 0;
    double prime_part = 0;
    double square_part = 0;
    double higher_part = 0;
    double core() const { return prime_part + square_part + higher_part; }
};

PrimeSumStat prime_sum_stat(const Member& m, double x);

// Real L(s) through the family's approximate functional equation.
double l_value_real(const Member& m, double s);

struct Decomposition {
    std::string id;
    double x = 0;
    double sigma = 0;
    double lhs = 0;
    double main = 0;
    double err1 = 0;
    double err2 = 0;
    double residual() const { return lhs - main; }
    double budget() const { return err1 + err2; }
};

// Throws ErrorKind::sign when L(1/2 + sigma) <= 0.
Decomposition decomposition_residual(const Member& m, double x,
                                     const std::optional<std::vector<ZeroPoint>>& zeros = std::nullopt);

struct ExplicitFormulaOptions {
    double tail_budget = 1e-6;
    bool enforce_tail = true;
    double stencil_step = 1e-4;
    int oracle_precision = 20;
};

struct ExplicitFormulaResult {
    double lhs = 0;          // -L'/L(1/2 + s) by finite differences
    double prime_sum = 0;
    double zero_sum = 0;     // already multiplied by -1/log^2 x
    double trivial_sum = 0;  // likewise
    double tail_bound = 0;   // bound on the omitted zeros above the list height
    double residual = 0;
};

ExplicitFormulaResult explicit_formula(const quad::QuadraticDiscriminant& dq, double x, double s,
                                       const quad::ZeroList& zeros, const ExplicitFormulaOptions& opt = {});

double explicit_formula_residual(const quad::QuadraticDiscriminant& dq, double x, double s,
                                 const quad::ZeroList& zeros, const ExplicitFormulaOptions& opt = {});

constexpr double kNearZeroCentral = 1e-12;

struct UpperBoundGap {
    std::string id;
    double gap = std::numeric_limits<double>::infinity();
    double sigma = 0;
    double log_central = 0;  // log |L(1/2)|
    bool near_zero = false;
    bool negative_central = false;
};

UpperBoundGap upper_bound_gap(const Member& m, double x,
                              const std::optional<std::vector<ZeroPoint>>& zeros = std::nullopt);

// 2 + (sigma^2 - 4 beta^2)/(beta^2 + gamma^2)
double bracket(double beta, double gamma, double sigma);
// Combined contribution of the zeros 1/2 +- beta + i gamma to the log sum.
double paired_zero_log(double beta, double gamma, double sigma);
// -1/2 sum log(((sigma - beta)^2 + gamma^2)/(beta^2 + gamma^2)) over the list.
double zero_contribution(const std::vector<ZeroPoint>& zeros, double sigma);

}  // namespace lvlab::selberg
