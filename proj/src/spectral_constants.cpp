#include "fhlab/spectral_constants.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace fhlab {

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczosCoef = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

void require_dims(int N, double s) {
    if (!(s > 0.0 && s <= 1.0)) {
        throw std::domain_error("s must lie in (0,1]");
    }
    if (!(N >= 1 && N > 2.0 * s)) {
        std::ostringstream os;
        os << "need N > 2s, got N=" << N << " s=" << s;
        throw std::domain_error(os.str());
    }
}

}  // namespace

double gamma_fn(double x) {
    if (x <= 0.0 && x == std::floor(x)) {
        std::ostringstream os;
        os << "gamma pole at x=" << x;
        throw std::domain_error(os.str());
    }
    if (x < 0.5) {
        return std::numbers::pi / (std::sin(std::numbers::pi * x) * gamma_fn(1.0 - x));
    }
    x -= 1.0;
    double a = kLanczosCoef[0];
    const double t = x + kLanczosG + 0.5;
    for (std::size_t i = 1; i < kLanczosCoef.size(); ++i) {
        a += kLanczosCoef[i] / (x + static_cast<double>(i));
    }
    return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

double lambda_max(int N, double s) {
    require_dims(N, s);
    const double r = gamma_fn((N + 2.0 * s) / 4.0) / gamma_fn((N - 2.0 * s) / 4.0);
    return std::pow(2.0, 2.0 * s) * r * r;
}

double upsilon(double alpha, int N, double s) {
    require_dims(N, s);
    const double top = (N - 2.0 * s) / 2.0;
    if (!(alpha >= 0.0 && alpha < top)) {
        std::ostringstream os;
        os << "upsilon: alpha=" << alpha << " outside [0," << top << ")";
        throw std::domain_error(os.str());
    }
    const double num = gamma_fn((N + 2.0 * s + 2.0 * alpha) / 4.0) *
                       gamma_fn((N + 2.0 * s - 2.0 * alpha) / 4.0);
    const double den = gamma_fn((N - 2.0 * s - 2.0 * alpha) / 4.0) *
                       gamma_fn((N - 2.0 * s + 2.0 * alpha) / 4.0);
    return std::pow(2.0, 2.0 * s) * num / den;
}

double upsilon_inv(double lambda, int N, double s) {
    const double lam_max = lambda_max(N, s);
    if (!(lambda > 0.0 && lambda <= lam_max)) {
        std::ostringstream os;
        os << "upsilon_inv: lambda=" << lambda << " outside (0," << lam_max << "]";
        throw std::domain_error(os.str());
    }
    if (lambda == lam_max) return 0.0;
    const double tol = 1e-10 * lam_max;
    double lo = 0.0;
    double hi = (N - 2.0 * s) / 2.0 - 1e-14;
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double v = upsilon(mid, N, s);
        // Stop only well inside the tolerance so the round trip has headroom.
        if (std::abs(v - lambda) <= 0.01 * tol) break;
        if (v > lambda) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-16) break;
    }
    return mid;
}

ProblemSpec make_problem(int N, double s, double lambda, double p) {
    if (N < 2) throw std::invalid_argument("problem: N must be >= 2");
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("problem: s must lie in (0,1)");
    if (!(N > 2.0 * s)) throw std::invalid_argument("problem: need N > 2s");
    const double lam_max = lambda_max(N, s);
    if (!(lambda > 0.0 && lambda < lam_max)) {
        std::ostringstream os;
        os << "problem: lambda=" << lambda << " must lie strictly inside (0," << lam_max << ")";
        throw std::invalid_argument(os.str());
    }
    if (!(p > 1.0)) throw std::invalid_argument("problem: p must exceed 1");
    return ProblemSpec{N, s, lambda, p};
}

double kappa_s(double s) {
    return gamma_fn(1.0 - s) / (std::pow(2.0, 2.0 * s - 1.0) * gamma_fn(s));
}

double a_Ns(int N, double s) {
    return std::pow(2.0, 2.0 * s - 1.0) * std::pow(std::numbers::pi, -N / 2.0) *
           gamma_fn((N + 2.0 * s) / 2.0) / std::abs(gamma_fn(-s));
}

ExponentBundle exponents_at(int N, double s, double lambda) {
    ExponentBundle b;
    b.lambda_max = lambda_max(N, s);
    b.alpha = upsilon_inv(lambda, N, s);
    b.mu = (N - 2.0 * s) / 2.0 - b.alpha;
    b.p_plus = 1.0 + 2.0 * s / b.mu;
    b.fujita_F = 1.0 + 2.0 * s / (N + 2.0 - 2.0 * s - b.mu);
    b.fujita_F_tilde = 1.0 + 2.0 * s / (N - b.mu);
    b.fujita_F0 = 1.0 + 2.0 * s / (N + 2.0 - 2.0 * s);
    if (s < 1.0) {
        b.kappa_s = kappa_s(s);
        b.a_Ns = a_Ns(N, s);
    }
    return b;
}

ExponentBundle exponents(const ProblemSpec& spec) {
    make_problem(spec.N, spec.s, spec.lambda, spec.p);
    return exponents_at(spec.N, spec.s, spec.lambda);
}

Regime classify_regime(double p, const ExponentBundle& b) {
    if (std::abs(p - b.p_plus) <= 1e-12 * b.p_plus) return Regime::CriticalOpen;
    if (p <= b.fujita_F) return Regime::BlowUp;
    if (p < b.p_plus) return Regime::ConditionalGlobal;
    return Regime::NonExistence;
}

std::string to_string(Regime r) {
    switch (r) {
        case Regime::BlowUp: return "BlowUp";
        case Regime::ConditionalGlobal: return "ConditionalGlobal";
        case Regime::NonExistence: return "NonExistence";
        case Regime::CriticalOpen: return "CriticalOpen";
    }
    return "?";
}

}  // namespace fhlab
