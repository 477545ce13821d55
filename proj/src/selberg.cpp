#include "lvlab/selberg.hpp"

#include <cmath>
#include <complex>

#include "lvlab/arith.hpp"
#include "lvlab/error.hpp"
#include "lvlab/numeric.hpp"

namespace lvlab::selberg {

using num::pi;

const char* family_name(Family f) { return f == Family::quad ? "quad" : "holo"; }

Member Member::of(const quad::QuadraticDiscriminant& dq, double D) {
    require(D >= dq.d, "Member: family scale D below d");
    Member m;
    m.family = Family::quad;
    m.dq = dq;
    m.scale = D;
    return m;
}

Member Member::of(const holo::HeckeEigenform& f) {
    Member m;
    m.family = Family::holo;
    m.form = &f;
    m.scale = f.k;
    return m;
}

std::string Member::id() const {
    if (family == Family::quad) return "d=" + std::to_string(dq.d);
    return "k=" + std::to_string(form->k) + "#" + std::to_string(form->index);
}

double Member::log_conductor() const {
    if (family == Family::quad) return std::log(double(dq.q));
    return 2 * std::log(double(form->k));
}

double Member::log_log_scale() const {
    require(scale > std::exp(1.0), "Member: scale too small for log log");
    return std::log(std::log(scale));
}

double Member::mean_shift() const {
    const double s = 0.5 * log_log_scale();
    return family == Family::holo ? s : -s;
}

SelbergWeight::SelbergWeight(double x) : x_(x) {
    require(x > 1, "SelbergWeight: x must exceed 1");
    log_x_ = std::log(x);
}

double SelbergWeight::operator()(double n) const {
    const double ln = std::log(n);
    if (ln <= log_x_) return 1.0;
    if (ln >= 3 * log_x_) return 0.0;
    const double L2 = 2 * log_x_ * log_x_;
    const double a = 3 * log_x_ - ln;  // log(x^3/n)
    if (ln <= 2 * log_x_) {
        const double b = 2 * log_x_ - ln;
        return (a * a - 2 * b * b) / L2;
    }
    return a * a / L2;
}

double weight_a_x(double x, std::uint64_t n) {
    require(n >= 1, "weight_a_x: n must be positive");
    return SelbergWeight(x)(double(n));
}

namespace {

bool factor_prime_power(std::uint64_t n, std::uint64_t* p, int* m) {
    if (n < 2) return false;
    std::uint64_t q = 0;
    for (std::uint64_t t = 2; t * t <= n; ++t)
        if (n % t == 0) {
            q = t;
            break;
        }
    if (q == 0) q = n;
    int e = 0;
    while (n % q == 0) {
        n /= q;
        ++e;
    }
    if (n != 1) return false;
    *p = q;
    *m = e;
    return true;
}

// Lambda(p^m) for the member; lam(p^m) read from the form when holo.
class LambdaSource {
public:
    explicit LambdaSource(const Member& m) : m_(m) {
        if (m.family == Family::quad && m.dq.q <= (std::int64_t(1) << 22)) table_ = m.dq.chi_table();
    }

    double operator()(std::uint64_t p, int e, std::uint64_t pe, std::uint64_t pe_2) const {
        const double lp = std::log(double(p));
        if (m_.family == Family::quad) {
            int c = table_.empty() ? m_.dq.chi(std::int64_t(p)) : table_[p % std::uint64_t(m_.dq.q)];
            if (c == 0) return 0.0;
            return ((e % 2 == 1) ? c : 1) * lp;
        }
        const auto& lam = m_.form->lambda;
        if (pe >= lam.size())
            fail(ErrorKind::precondition, m_.id() + ": lambda(" + std::to_string(pe) + ") not available (bound " +
                                              std::to_string(m_.form->bound()) + ")");
        double v = lam[pe];
        if (e >= 2) v -= lam[pe_2];
        return v * lp;
    }

private:
    const Member& m_;
    std::vector<signed char> table_;
};

}  // namespace

LambdaCoefficient lambda_coeff(const Member& m, std::uint64_t n) {
    LambdaCoefficient c;
    c.family = m.family;
    c.n = n;
    std::uint64_t p = 0;
    int e = 0;
    if (!factor_prime_power(n, &p, &e)) return c;
    std::uint64_t pe_2 = 1;
    for (int i = 0; i < e - 2; ++i) pe_2 *= p;
    c.value = LambdaSource(m)(p, e, n, pe_2);
    return c;
}

namespace {

// Calls fn(p, m, p^m, Lambda(p^m)) for prime powers p^m <= limit.
template <class F>
void for_each_prime_power(const Member& m, std::uint64_t limit, F&& fn) {
    const LambdaSource lambda(m);
    arith::for_each_prime(2, limit, [&](std::uint64_t p) {
        std::uint64_t pe = p, pe_2 = 1, prev = 1;
        for (int e = 1;; ++e) {
            fn(p, e, pe, lambda(p, e, pe, pe_2));
            if (pe > limit / p) break;
            pe_2 = prev;
            prev = pe;
            pe *= p;
        }
    });
}

std::uint64_t floor_limit(double v) {
    require(v < 1.8e19, "prime power limit out of range");
    // absorb rounding in x^3 for integral x
    return static_cast<std::uint64_t>(std::floor(v * (1 + 1e-14)));
}

}  // namespace

double truncated_sum(const Member& m, double x, double s, const SumOptions& opt) {
    const SelbergWeight a(x);
    const std::uint64_t limit = floor_limit(opt.cutoff ? *opt.cutoff : x * x * x);
    num::Neumaier<double> acc;
    for_each_prime_power(m, limit, [&](std::uint64_t p, int e, std::uint64_t pe, double lam) {
        if (lam == 0) return;
        const double w = opt.cutoff ? 1.0 : a(double(pe));
        if (w == 0) return;
        const double lpe = e * std::log(double(p));
        double t = lam * w * std::exp(-(0.5 + s) * lpe);
        if (opt.log_weighted) t /= lpe;
        acc.add(t);
    });
    return acc.value();
}

std::vector<ZeroPoint> critical_zeros(const quad::ZeroList& zl) {
    std::vector<ZeroPoint> out;
    out.reserve(2 * zl.ordinates.size());
    for (double g : zl.ordinates) {
        out.push_back({0.0, g});
        out.push_back({0.0, -g});
    }
    return out;
}

bool in_region(const ZeroPoint& z, double x) {
    const double lx = std::log(x);
    const double b = std::abs(z.beta);
    return b >= 2 / lx && std::abs(z.gamma) <= std::exp(3 * b * lx) / lx;
}

SigmaX sigma_x(const std::vector<ZeroPoint>& zeros, double x) {
    require(x > 1, "sigma_x: x must exceed 1");
    const double floor = 2 / std::log(x);
    double top = floor;
    for (const auto& z : zeros)
        if (in_region(z, x)) top = std::max(top, std::abs(z.beta));
    SigmaX out;
    out.x = x;
    out.sigma = 2 * top;
    out.source = top > floor ? SigmaSource::zero_driven : SigmaSource::default_floor;
    return out;
}

PrimeSumStat prime_sum_stat(const Member& m, double x) {
    require(x >= 2, "prime_sum_stat: x must be at least 2");
    PrimeSumStat out;
    out.id = m.id();
    out.x = x;
    num::Neumaier<double> parts[3];
    for_each_prime_power(m, floor_limit(x), [&](std::uint64_t p, int e, std::uint64_t pe, double lam) {
        if (lam == 0) return;
        parts[std::min(e, 3) - 1].add(lam / (std::sqrt(double(pe)) * e * std::log(double(p))));
    });
    out.prime_part = parts[0].value();
    out.square_part = parts[1].value();
    out.higher_part = parts[2].value();
    out.P = (out.core() + m.mean_shift()) / std::sqrt(m.log_log_scale());
    return out;
}

double l_value_real(const Member& m, double s) {
    if (m.family == Family::quad) return quad::l_value_afe(m.dq, {s, 0}).value.real();
    return holo::l_value_holo(*m.form, {s, 0}).value.real();
}

namespace {

double pick_sigma(const std::optional<std::vector<ZeroPoint>>& zeros, double x) {
    if (zeros) return sigma_x(*zeros, x).sigma;
    return 4 / std::log(x);
}

}  // namespace

Decomposition decomposition_residual(const Member& m, double x, const std::optional<std::vector<ZeroPoint>>& zeros) {
    Decomposition out;
    out.id = m.id();
    out.x = x;
    out.sigma = pick_sigma(zeros, x);
    const double L = l_value_real(m, 0.5 + out.sigma);
    if (!(L > 0))
        fail(ErrorKind::sign, m.id() + ": L(1/2 + sigma) = " + std::to_string(L) + " is not positive");
    out.lhs = std::log(L);
    out.main = truncated_sum(m, x, out.sigma, {.log_weighted = true});
    const double lx = std::log(x);
    out.err1 = std::abs(truncated_sum(m, x, out.sigma)) / lx;
    out.err2 = m.log_conductor() / lx;
    return out;
}

namespace {

using cplx = std::complex<double>;

// x^z (1 - x^z)^2 / (-z)^3 for z = rho - 1/2 - s
cplx zero_term(double lx, cplx z) {
    const cplx xz = std::exp(z * lx);
    const cplx one_minus = 1.0 - xz;
    const cplx mz = -z;
    return xz * one_minus * one_minus / (mz * mz * mz);
}

}  // namespace

ExplicitFormulaResult explicit_formula(const quad::QuadraticDiscriminant& dq, double x, double s,
                                       const quad::ZeroList& zeros, const ExplicitFormulaOptions& opt) {
    require(s > 0, "explicit_formula: s must be positive");
    require(x > 1, "explicit_formula: x must exceed 1");
    for (double g : zeros.ordinates) require(g != s, "explicit_formula: s coincides with a zero ordinate");
    const double lx = std::log(x);
    ExplicitFormulaResult r;

    const double h = opt.stencil_step;
    auto logL = [&](double t) {
        const auto v = quad::l_value_oracle(dq, {0.5 + t, 0}, opt.oracle_precision).value.real();
        return std::log(std::abs(v));
    };
    const double fp = (-logL(s + 2 * h) + 8 * logL(s + h) - 8 * logL(s - h) + logL(s - 2 * h)) / (12 * h);
    r.lhs = -fp;

    r.prime_sum = truncated_sum(Member::of(dq, double(dq.d)), x, s);

    num::Neumaier<double> zs;
    for (double g : zeros.ordinates) zs.add(2 * zero_term(lx, {-s, g}).real());
    r.zero_sum = -zs.value() / (lx * lx);

    // trivial zeros of an even character at 0, -2, -4, ...
    num::Neumaier<double> ts;
    for (int j = 0;; ++j) {
        const double z = -2.0 * j - 0.5 - s;
        if (j > 0 && std::exp(z * lx) < 1e-10) break;
        ts.add(zero_term(lx, {z, 0}).real());
    }
    r.trivial_sum = -ts.value() / (lx * lx);

    const double T = std::max(zeros.T, 1.0);
    const double xs = std::exp(-s * lx);
    const double density = (std::log(double(dq.q) * T / (2 * pi)) + 0.5) / (4 * pi * T * T);
    r.tail_bound = xs * (1 + xs) * (1 + xs) / (lx * lx) * 2 * density;
    if (opt.enforce_tail && r.tail_bound > opt.tail_budget)
        fail(ErrorKind::numeric, "explicit_formula: zero tail above T = " + std::to_string(zeros.T) + " is " +
                                     std::to_string(r.tail_bound) + ", above budget " +
                                     std::to_string(opt.tail_budget));

    r.residual = std::abs(r.lhs - (r.prime_sum + r.zero_sum + r.trivial_sum));
    return r;
}

double explicit_formula_residual(const quad::QuadraticDiscriminant& dq, double x, double s,
                                 const quad::ZeroList& zeros, const ExplicitFormulaOptions& opt) {
    return explicit_formula(dq, x, s, zeros, opt).residual;
}

UpperBoundGap upper_bound_gap(const Member& m, double x, const std::optional<std::vector<ZeroPoint>>& zeros) {
    UpperBoundGap out;
    out.id = m.id();
    out.sigma = pick_sigma(zeros, x);
    const bool forced_zero = m.family == Family::holo && m.form->k % 4 == 2;
    const double central = forced_zero ? 0.0 : l_value_real(m, 0.5);
    out.negative_central = central < 0;
    if (std::abs(central) < kNearZeroCentral) {
        out.near_zero = true;
        out.log_central = -std::numeric_limits<double>::infinity();
        return out;
    }
    out.log_central = std::log(std::abs(central));
    const double L = l_value_real(m, 0.5 + out.sigma);
    if (!(L > 0))
        fail(ErrorKind::sign, m.id() + ": L(1/2 + sigma) = " + std::to_string(L) + " is not positive");
    out.gap = std::log(L) + out.sigma * m.log_conductor() - out.log_central;
    return out;
}

double bracket(double beta, double gamma, double sigma) {
    const double r = beta * beta + gamma * gamma;
    require(r > 0, "bracket: zero at the origin");
    return 2 + (sigma * sigma - 4 * beta * beta) / r;
}

double paired_zero_log(double beta, double gamma, double sigma) {
    const double r = beta * beta + gamma * gamma;
    return std::log1p(sigma * sigma / r * bracket(beta, gamma, sigma));
}

double zero_contribution(const std::vector<ZeroPoint>& zeros, double sigma) {
    num::Neumaier<double> acc;
    for (const auto& z : zeros) {
        const double r = z.beta * z.beta + z.gamma * z.gamma;
        const double d = sigma - z.beta;
        acc.add(std::log((d * d + z.gamma * z.gamma) / r));
    }
    return -0.5 * acc.value();
}

}  // namespace lvlab::selberg
