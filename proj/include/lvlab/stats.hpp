#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lvlab/arith.hpp"
#include "lvlab/holo.hpp"
#include "lvlab/selberg.hpp"

namespace lvlab::stats {

using selberg::Family;

enum class Statistic { P, A, B };

const char* statistic_name(Statistic s);

struct Normalization {
    double scale = 0;          // D or k
    double log_log_scale = 0;  // log log C used for the scale
    double mean_shift = 0;     // +1/2 log log k (holo) or -1/2 log log D (quad)
    double sigma = 0;          // offset from 1/2 for A; 0 for B and P
    double x = 0;              // prime-sum length for P; theorem-window x for A
};

struct NormalizedSample {
    Family family = Family::quad;
    Statistic statistic = Statistic::P;
    std::vector<double> values;
    std::vector<std::string> ids;
    Normalization norm;
    std::size_t excluded = 0;
};

Normalization make_normalization(Family family, double scale, double sigma = 0, double x = 0);

// (raw + mean_shift) / sqrt(log log scale), member by member.
NormalizedSample normalize(const std::vector<double>& raw, Family family, Statistic stat, const Normalization& norm,
                           std::size_t excluded = 0, std::vector<std::string> ids = {});

struct Histogram {
    std::vector<double> edges;
    std::vector<std::size_t> counts;
};

struct TailFrequency {
    double threshold = 0;
    double frequency = 0;
};

struct DistributionReport {
    std::size_t n = 0;
    double moments[6] = {};  // mean, then central moments 2..6 (m2 with n - 1)
    double ks = 0;
    Histogram histogram;
    std::vector<TailFrequency> tails;
};

double ks_statistic(std::vector<double> values);
Histogram freedman_diaconis(const std::vector<double>& values);
DistributionReport distribution_report(const NormalizedSample& sample);
DistributionReport distribution_report(const std::vector<double>& values);

// (2m)!/(2^m m!) (log log x)^m
double moment_prediction(int m, double x);
double double_factorial_odd(int m);

struct OrthogonalityAverage {
    double empirical = 0;
    double predicted = 0;
    double deviation = 0;
    std::size_t members = 0;
};

// (1/|s(D)|) sum chi_8d(n); prediction delta_{n = square} prod_{p | n} p/(p+1), zero for even n.
OrthogonalityAverage orthogonality_average(const arith::DiscriminantSet& family, std::uint64_t n);
// (1/|H_k|) sum lambda_f(m); prediction delta_{m = square} / sqrt(m).
OrthogonalityAverage orthogonality_average(const std::vector<holo::HeckeEigenform>& forms, std::uint64_t m);

enum class Symmetry { symplectic, orthogonal_even };

double density_W(Symmetry sym, double x);
// int_0^a W(x) dx, the expected number of scaled zeros in [0, a].
double expected_zero_count(Symmetry sym, double a);

enum class TestFunction { fejer, gaussian_cosine };

const char* test_function_name(TestFunction tf);
bool conforming(TestFunction tf);
double test_function(TestFunction tf, double x);
// int phi(x) W(x) dx over the real line.
double predicted_density(TestFunction tf, Symmetry sym);
double integral_phi(TestFunction tf);

struct ZeroCoverage {
    std::string id;
    std::vector<double> ordinates;  // positive ordinates up to T
    double T = 0;
    double conductor = 0;           // q = 8d or k
};

struct DensityOptions {
    double tail_budget = 0.02;  // largest tail correction allowed for a member
};

struct DensityTestResult {
    Family family = Family::quad;
    TestFunction test = TestFunction::fejer;
    double empirical = 0;
    double predicted = 0;
    double scaling = 0;  // 2 pi for quad, pi for holo
    double tail_correction = 0;  // mean over members, included in empirical
    std::size_t members = 0;
    bool conforming = true;
    double relative_error() const { return (empirical - predicted) / predicted; }
};

// Zero density of the completed L-function at height t (per unit t).
double smooth_zero_density(Family family, double conductor, double t);

DensityTestResult one_level_density(const std::vector<ZeroCoverage>& zeros, Family family, double scale,
                                    TestFunction tf = TestFunction::fejer, const DensityOptions& opt = {});

struct TailCheck {
    double threshold = 0;
    double empirical = 0;
    double gaussian = 0;
    double excess = 0;
};

std::vector<TailCheck> tail_bound_check(const NormalizedSample& sample, const std::vector<double>& thresholds);

double pearson(const std::vector<double>& a, const std::vector<double>& b);

// Fraction of values strictly below the threshold.
double mass_below(const std::vector<double>& values, double threshold);

}  // namespace lvlab::stats
