#include "lvlab/quad.hpp"

#include <string>

#include "lvlab/arith.hpp"
#include "lvlab/error.hpp"
#include "lvlab/numeric.hpp"

namespace lvlab::quad {

using num::pi;

QuadraticDiscriminant QuadraticDiscriminant::make(std::int64_t d) {
    require(d >= 1 && (d & 1) && arith::is_squarefree(static_cast<std::uint64_t>(d)),
            "QuadraticDiscriminant: d = " + std::to_string(d) + " is not odd squarefree positive");
    return {d, 8 * d};
}

int QuadraticDiscriminant::chi(std::int64_t n) const {
    if (n <= 0) return 0;
    return arith::kronecker(q, n);
}

std::vector<signed char> QuadraticDiscriminant::chi_table() const {
    std::vector<signed char> t(static_cast<std::size_t>(q), 0);
    for (std::int64_t a = 1; a < q; ++a)
        if (a & 1) t[a] = static_cast<signed char>(arith::kronecker(q, a));
    return t;
}

const char* method_name(Method m) { return m == Method::afe ? "afe" : "hurwitz-oracle"; }

cplx log_gamma_factor(std::int64_t q, cplx s) {
    return 0.5 * s * std::log(double(q) / pi) + num::log_gamma(0.5 * s);
}

cplx completed(const QuadraticDiscriminant& dq, cplx s, const QuadLValue& lv) {
    return std::exp(log_gamma_factor(dq.q, s)) * lv.value;
}

namespace {

bool is_afe_pole(cplx s) {
    if (s.imag() != 0) return false;
    double x = s.real();
    if (x <= 0 && std::fmod(-x, 2.0) == 0) return true;   // Gamma(s/2)
    if (x >= 1 && std::fmod(x - 1, 2.0) == 0) return true;  // Gamma((1-s)/2)
    return false;
}

// Real path: s, delta real.
double afe_real(const QuadraticDiscriminant& dq, double s, double delta, double* est) {
    const double q = double(dq.q);
    const double a1 = 0.5 * s, a2 = 0.5 * (1 - s);
    int sg1 = 1, sg2 = 1;
    double lx = (0.5 - s) * std::log(q / pi) + num::log_abs_gamma(a2, &sg2) - num::log_abs_gamma(a1, &sg1);
    const double X = double(sg1 * sg2) * std::exp(lx);
    const bool central = (s == 0.5 && delta == 1.0);
    num::Neumaier<double> s1, s2;
    double abs_total = 0, last = 0;
    for (std::int64_t n = 1;; n += 2) {
        const double z1 = pi * double(n) * double(n) * delta / q;
        const double z2 = pi * double(n) * double(n) / (q * delta);
        int ch = dq.chi(n);
        double t1 = 0, t2 = 0;
        if (ch != 0) {
            double ln = std::log(double(n));
            t1 = ch * std::exp(-s * ln) * num::gamma_q(a1, z1);
            if (!central) t2 = ch * std::exp((s - 1) * ln) * num::gamma_q(a2, z2);
            s1.add(t1);
            s2.add(t2);
            abs_total += std::abs(t1) + std::abs(X * t2);
            last = std::abs(t1) + std::abs(X * t2);
        }
        if (z1 > std::abs(a1) + 10 && z2 > std::abs(a2) + 10 && ch != 0 &&
            last < 1e-18 * std::max(1e-300, std::abs(s1.value() + X * s2.value())))
            break;
        if (n > 400'000'000) fail(ErrorKind::numeric, "l_value_afe: term count exceeded");
    }
    *est = 10 * last + 4e-16 * abs_total;
    return central ? 2 * s1.value() : s1.value() + X * s2.value();
}

cplx afe_complex(const QuadraticDiscriminant& dq, cplx s, cplx delta, double* est) {
    const double q = double(dq.q);
    const cplx a1 = 0.5 * s, a2 = 0.5 * (1.0 - s);
    const cplx X = std::exp((0.5 - s) * std::log(q / pi) + num::log_gamma(a2) - num::log_gamma(a1));
    num::Neumaier<double> r1, i1, r2, i2;
    double abs_total = 0, last = 0;
    for (std::int64_t n = 1;; n += 2) {
        const cplx z1 = pi * double(n) * double(n) * delta / q;
        const cplx z2 = pi * double(n) * double(n) / (q * delta);
        int ch = dq.chi(n);
        if (ch != 0) {
            double ln = std::log(double(n));
            cplx t1 = double(ch) * std::exp(-s * ln) * num::gamma_q(a1, z1);
            cplx t2 = double(ch) * std::exp((s - 1.0) * ln) * num::gamma_q(a2, z2);
            r1.add(t1.real());
            i1.add(t1.imag());
            r2.add(t2.real());
            i2.add(t2.imag());
            last = std::abs(t1) + std::abs(X * t2);
            abs_total += last;
        }
        cplx cur = cplx(r1.value(), i1.value()) + X * cplx(r2.value(), i2.value());
        if (z1.real() > std::abs(a1) + 10 && z2.real() > std::abs(a2) + 10 && ch != 0 &&
            last < 1e-18 * std::max(1e-300, std::abs(cur)))
            break;
        if (n > 400'000'000) fail(ErrorKind::numeric, "l_value_afe: term count exceeded");
    }
    *est = 10 * last + 4e-16 * abs_total;
    return cplx(r1.value(), i1.value()) + X * cplx(r2.value(), i2.value());
}

}  // namespace

QuadLValue l_value_afe(const QuadraticDiscriminant& dq, cplx s, std::optional<cplx> delta) {
    require(!is_afe_pole(s), "l_value_afe: s is a pole of the gamma factors");
    cplx dl;
    if (delta) {
        dl = *delta;
        require(dl.real() > 0, "l_value_afe: split point needs Re delta > 0");
    } else {
        const double a_im = 0.5 * s.imag();
        double phi = 0;
        if (std::abs(a_im) > 0) phi = std::copysign(std::max(0.0, pi / 2 - std::log(1e4) / std::abs(a_im)), a_im);
        dl = std::polar(1.0, phi);
    }
    QuadLValue out;
    out.d = dq.d;
    out.s = s;
    out.method = Method::afe;
    if (s.imag() == 0 && dl.imag() == 0) {
        out.value = afe_real(dq, s.real(), dl.real(), &out.est_error);
    } else {
        out.value = afe_complex(dq, s, dl, &out.est_error);
    }
    if (!std::isfinite(out.value.real()) || !std::isfinite(out.value.imag()))
        fail(ErrorKind::numeric, "l_value_afe: non-finite value at s = (" + std::to_string(s.real()) + ", " +
                                     std::to_string(s.imag()) + ")");
    return out;
}

double hardy_theta(std::int64_t q, double t) {
    return num::log_gamma(cplx(0.25, 0.5 * t)).imag() - 0.5 * t * std::log(pi / double(q));
}

HardyValue hardy_z_full(const QuadraticDiscriminant& dq, double t, double supported_height) {
    require(std::abs(t) <= supported_height,
            "hardy_z: |t| = " + std::to_string(t) + " beyond supported height " + std::to_string(supported_height));
    const cplx s(0.5, t);
    QuadLValue lv = dq.q <= kOracleModulusCutoff ? l_value_oracle(dq, s, 12) : l_value_afe(dq, s);
    HardyValue h;
    h.t = t;
    h.rotated = std::polar(1.0, hardy_theta(dq.q, t)) * lv.value;
    h.z = h.rotated.real();
    return h;
}

double hardy_z(const QuadraticDiscriminant& dq, double t, double supported_height) {
    return hardy_z_full(dq, t, supported_height).z;
}

ThetaScanner::ThetaScanner(const QuadraticDiscriminant& dq, double step) : dq_(dq), h_(step) {
    const long double q = dq.q;
    const double V = std::log(20.0 * double(dq.q)) + 2.0;
    const int J = static_cast<int>(std::ceil(V / h_));
    const auto chi = dq.chi_table();
    f_.resize(J + 1);
    for (int j = 0; j <= J; ++j) {
        const long double v = (long double)j * h_;
        const long double c = (long double)pi * std::exp(v) / q;  // exponent per n^2
        const std::int64_t nmax = static_cast<std::int64_t>(std::sqrt(50.0L / c)) + 2;
        // exp(-c n^2) by the recurrence g(n+1) = g(n) r(n), r(n+1) = r(n) e^{-2c}
        long double g = std::exp(-c), r = std::exp(-3 * c);
        const long double r_step = std::exp(-2 * c);
        long double sum = 0;
        for (std::int64_t n = 1; n <= nmax; ++n) {
            int ch = chi[n % dq.q];
            if (ch) sum += ch * g;
            g *= r;
            r *= r_step;
        }
        f_[j] = std::exp(v / 4) * sum;
    }
}

double ThetaScanner::lambda(double t) const {
    long double acc = f_[0];
    const long double w = (long double)h_ * t / 2;
    for (std::size_t j = 1; j < f_.size(); ++j) acc += 2 * f_[j] * std::cos(w * (long double)j);
    return static_cast<double>(acc * h_);
}

double ThetaScanner::z(double t) const {
    const double mod_gamma = std::exp(num::log_gamma(cplx(0.25, 0.5 * t)).real());
    return lambda(t) / (std::pow(double(dq_.q) / pi, 0.25) * mod_gamma);
}

double smooth_zero_count(std::int64_t q, double T) { return hardy_theta(q, T) / pi; }

ZeroList find_zeros(const QuadraticDiscriminant& dq, double T, const ZeroSearchOptions& opt) {
    require(T > 0, "find_zeros: T must be positive");
    ZeroList out;
    out.id = dq.d;
    out.T = T;
    std::optional<ThetaScanner> scanner;
    if (T <= ThetaScanner::kMaxHeight)
        scanner.emplace(dq);
    else
        require(T <= opt.supported_height, "find_zeros: T beyond supported height");
    auto z = [&](double t) { return scanner ? scanner->lambda(t) : hardy_z(dq, t, opt.supported_height); };
    double step = pi / (2 * std::log(double(dq.q) * T + 10));
    const long expected = std::lround(smooth_zero_count(dq.q, T));
    for (int r = 0;; ++r) {
        out.ordinates = sign_change_zeros(z, T, step, opt.tolerance);
        out.grid_step = step;
        out.count_check = static_cast<int>(long(out.ordinates.size()) - expected);
        if (out.count_check >= opt.rescan_threshold) break;
        if (r >= opt.max_refinements)
            fail(ErrorKind::rescan, "find_zeros: d = " + std::to_string(dq.d) + " count_check " +
                                        std::to_string(out.count_check) + " after " + std::to_string(r) +
                                        " refinements");
        step /= 2;
    }
    out.gamma_min = out.ordinates.empty() ? 0.0 : out.ordinates.front();
    return out;
}

}  // namespace lvlab::quad
