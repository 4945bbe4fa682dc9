#include "fhlab/verifier.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <thread>

#include "fhlab/kernel_ops.hpp"
#include "fhlab/lattice.hpp"
#include "fhlab/spectral_constants.hpp"
#include "quadrature.hpp"

namespace fhlab {

// ---- test functions ----

double TestFunction::space(std::span<const double> x) const {
    double d2 = 0.0;
    for (int i = 0; i < N; ++i) d2 += (x[i] - center[i]) * (x[i] - center[i]);
    const double u = d2 / (width * width);
    if (family == Family::Bump) return u < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - u)) : 0.0;
    const double env = std::exp(-u);
    if (family == Family::Gaussian) return env;
    double mod = 1.0;
    for (std::size_t k = 0; k < waves.size(); ++k) {
        double arg = phases[k];
        for (int i = 0; i < N; ++i) arg += waves[k][i] * x[i];
        mod += amps[k] * std::cos(arg);
    }
    return env * mod;
}

double TestFunction::time(double t) const {
    const double u = (t - t_center) / t_width;
    if (family == Family::Bump) return std::abs(u) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - u * u)) : 0.0;
    return std::exp(-u * u);
}

double TestFunction::support_radius() const {
    double c = 0.0;
    for (double v : center) c += v * v;
    c = std::sqrt(c);
    return family == Family::Bump ? c + width : c + 5.0 * width;
}

double TestFunction::support_t0() const {
    return family == Family::Bump ? t_center - t_width : t_center - 6.5 * t_width;
}

double TestFunction::feature() const {
    if (family == Family::Bump) return 0.25 * width;
    double kmax = 0.0;
    for (const auto& k : waves) {
        double n = 0.0;
        for (double v : k) n += v * v;
        kmax = std::max(kmax, std::sqrt(n));
    }
    return kmax > 0.0 ? std::min(0.5 * width, 1.5 / kmax) : 0.5 * width;
}

TestFunction draw_test_function(int N, int index, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    TestFunction f;
    f.family = static_cast<Family>(index % 3);
    f.N = N;
    f.center.resize(N);
    for (double& c : f.center) c = U(rng) - 0.5;
    switch (f.family) {
        case Family::Gaussian:
            f.width = 0.7 + 0.7 * U(rng);
            f.t_width = 0.6 + 0.4 * U(rng);
            break;
        case Family::Bump:
            f.width = 1.5 + U(rng);
            f.t_width = 1.0 + 0.5 * U(rng);
            break;
        case Family::TrigEnvelope: {
            f.width = 1.0 + 0.5 * U(rng);
            f.t_width = 0.6 + 0.4 * U(rng);
            const int n = 3;
            double total = 0.0;
            for (int k = 0; k < n; ++k) {
                std::vector<double> w(N);
                for (double& v : w) v = 4.0 * U(rng) - 2.0;
                f.waves.push_back(w);
                f.amps.push_back(2.0 * U(rng) - 1.0);
                f.phases.push_back(2.0 * std::numbers::pi * U(rng));
                total += std::abs(f.amps.back());
            }
            const double scale = 0.5 * U(rng) / std::max(total, 1e-300);
            for (double& a : f.amps) a *= scale;
            break;
        }
    }
    return f;
}

// ---- radial kernel K(sigma) ----

namespace {

double sphere_area(int n) {  // |S^{n-1}|
    return 2.0 * std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0);
}

double hyp2f1_series(double a, double b, double c, double z) {
    double term = 1.0, acc = 1.0;
    for (int n = 0; n < 200000; ++n) {
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
        acc += term;
        if (std::abs(term) < 1e-17 * std::abs(acc)) break;
    }
    return acc;
}

}  // namespace

double radial_K(int N, double mu, double sigma) {
    if (N < 2) throw std::invalid_argument("radial_K: N must be >= 2");
    if (sigma < 0.0) throw std::domain_error("radial_K: sigma must be >= 0");
    auto f = [&](double th) {
        const double sh = std::sin(0.5 * th);
        const double q = (1.0 - sigma) * (1.0 - sigma) + 4.0 * sigma * sh * sh;
        if (q == 0.0) return 0.0;  // only reached when theta^2 underflows
        return std::pow(std::sin(th), N - 2.0) * std::pow(q, -mu / 2.0);
    };
    boost::math::quadrature::tanh_sinh<double> ts;
    return sphere_area(N - 1) * ts.integrate(f, 0.0, std::numbers::pi);
}

double radial_K_reference(int N, double mu, double sigma) {
    if (sigma == 1.0) {
        return sphere_area(N - 1) * std::pow(2.0, N - 2.0 - mu) *
               boost::math::beta((N - 1.0 - mu) / 2.0, (N - 1.0) / 2.0);
    }
    if (sigma > 1.0) return std::pow(sigma, -mu) * radial_K_reference(N, mu, 1.0 / sigma);
    return sphere_area(N) * hyp2f1_series(mu / 2.0, mu / 2.0 - N / 2.0 + 1.0, N / 2.0, sigma * sigma);
}

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
using SpaceFn = std::function<double(std::span<const double>)>;

constexpr double kPointwiseTol = 1e-8;
constexpr double kIntegralTol = 1e-3;

// integral over |x| < R of f(x) |x|^power, polar coordinates about the origin.
double polar_integral(int N, const SpaceFn& f, double R, double power) {
    const int nphi = 96;
    std::vector<std::array<double, 3>> dirs;
    std::vector<double> dw;
    if (N == 2) {
        for (int i = 0; i < nphi; ++i) {
            const double a = 2.0 * std::numbers::pi * i / nphi;
            dirs.push_back({std::cos(a), std::sin(a), 0.0});
            dw.push_back(2.0 * std::numbers::pi / nphi);
        }
    } else if (N == 3) {
        const auto& gl = detail::gauss_legendre(48);
        for (std::size_t j = 0; j < gl.x.size(); ++j) {
            const double c = gl.x[j], sn = std::sqrt(1.0 - c * c);
            for (int i = 0; i < nphi; ++i) {
                const double a = 2.0 * std::numbers::pi * i / nphi;
                dirs.push_back({sn * std::cos(a), sn * std::sin(a), c});
                dw.push_back(gl.w[j] * 2.0 * std::numbers::pi / nphi);
            }
        }
    } else {
        throw std::invalid_argument("polar_integral: N must be 2 or 3");
    }
    auto shell = [&](double rho) {
        if (rho <= 0.0) return 0.0;
        double acc = 0.0;
        std::array<double, 3> x{};
        for (std::size_t i = 0; i < dirs.size(); ++i) {
            for (int d = 0; d < N; ++d) x[d] = rho * dirs[i][d];
            acc += dw[i] * f(std::span<const double>(x.data(), N));
        }
        return acc * std::pow(rho, N - 1.0 + power);
    };
    return GK::integrate(shell, 0.0, R, 12, 1e-10);
}

struct SliceData {
    Lattice lat;
    Field a;
};

SliceData slice_of(const TestFunction& tf) {
    const int N = tf.N;
    Lattice lat = N == 2 ? make_lattice(2, 10.0, 128, 0.0, 8.0, 8, 2) : make_lattice(3, 8.0, 64, 0.0, 8.0, 8, 2);
    lat.K = 1;  // a single time slice
    return {lat, sample([&](std::span<const double> x, double) { return tf.space(x); }, lat)};
}

double lattice_dot(const Field& a, const Field& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) acc += a.values[i] * b.values[i];
    return acc * a.lat.cell_volume();
}

// Relative margin of a one-sided inequality lhs >= rhs.
double rel_margin(double big, double small) { return (big - small) / std::max(std::abs(big), 1e-300); }

struct Draws {
    std::mt19937_64 rng;
    Draws(std::uint64_t seed, const std::string& id) {
        std::uint64_t h = 1469598103934665603ull;
        for (char c : id) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ull;
        std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                         static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
        rng.seed(sq);
    }
};

CheckReport base(const std::string& id, double tol, const CheckConfig& cfg) {
    CheckReport r;
    r.id = id;
    r.tolerance = tol;
    r.worst_margin = std::numeric_limits<double>::infinity();
    r.params = {{"seed", cfg.seed}, {"functions", cfg.functions}};
    return r;
}

void finish(CheckReport& r) {
    r.passed = std::isfinite(r.worst_margin) ? r.worst_margin >= -r.tolerance : r.worst_margin > 0.0;
}

void take(CheckReport& r, double margin) {
    ++r.samples;
    if (std::isnan(margin)) margin = -std::numeric_limits<double>::infinity();
    r.worst_margin = std::min(r.worst_margin, margin);
}

void echo_problem(CheckReport& r, const CheckConfig& cfg, double lambda, double mu) {
    r.params["N"] = cfg.N;
    r.params["s"] = cfg.s;
    r.params["lambda"] = lambda;
    r.params["mu"] = mu;
}

// ---- integral inequalities ----

CheckReport check_hardy(const CheckConfig& cfg) {
    CheckReport r = base("hardy", kIntegralTol, cfg);
    Draws d(cfg.seed, r.id);
    const double Lam = lambda_max(cfg.N, cfg.s);
    r.params["N"] = cfg.N;
    r.params["s"] = cfg.s;
    r.params["Lambda"] = Lam;
    double worst_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < cfg.functions; ++i) {
        const TestFunction tf = draw_test_function(cfg.N, i, d.rng);
        const SliceData sd = slice_of(tf);
        const double form = lattice_dot(sd.a, apply_frac_laplacian(sd.a, cfg.s));
        const double hardy = Lam * polar_integral(cfg.N, [&](std::span<const double> x) {
            const double v = tf.space(x);
            return v * v;
        }, tf.support_radius(), -2.0 * cfg.s);
        worst_ratio = std::min(worst_ratio, form / hardy);
        take(r, rel_margin(form, hardy));
    }
    r.params["min_form_ratio"] = worst_ratio;
    finish(r);
    return r;
}

// Best separable extension phi(x) b(y), b = exp(-y^2/beta^2), of the weighted
// Dirichlet energy: (1/2) Gamma(1-s) s^{-s} (int a^2)^{1-s} (int |grad a|^2)^s.
double separable_energy(const SliceData& sd, double s) {
    const double A = lattice_dot(sd.a, sd.a);
    const double G = lattice_dot(sd.a, apply_frac_laplacian(sd.a, 1.0));
    return 0.5 * std::tgamma(1.0 - s) * std::pow(s, -s) * std::pow(A, 1.0 - s) * std::pow(G, s);
}

CheckReport extended_form(const std::string& id, const CheckConfig& cfg, double potential) {
    CheckReport r = base(id, kIntegralTol, cfg);
    Draws d(cfg.seed, r.id);
    for (int i = 0; i < cfg.functions; ++i) {
        const TestFunction tf = draw_test_function(cfg.N, i, d.rng);
        const SliceData sd = slice_of(tf);
        const double energy = separable_energy(sd, cfg.s);
        const double rhs = potential * polar_integral(cfg.N, [&](std::span<const double> x) {
            const double v = tf.space(x);
            return v * v;
        }, tf.support_radius(), -2.0 * cfg.s);
        take(r, rel_margin(energy, rhs));
    }
    return r;
}

CheckReport check_hardy_extended(const CheckConfig& cfg) {
    const double Lam = lambda_max(cfg.N, cfg.s);
    CheckReport r = extended_form("hardy_extended", cfg, kappa_s(cfg.s) * Lam);
    r.params["N"] = cfg.N;
    r.params["s"] = cfg.s;
    r.params["kappa_s"] = kappa_s(cfg.s);
    finish(r);
    return r;
}

// W = Phi_lambda, g = 0: the boundary potential f / Tr W = c |x|^{-2s}, with c read off
// the numerical Neumann datum of Phi at |x| = 1.
CheckReport check_picone(const CheckConfig& cfg) {
    const double lambda = cfg.lambda_fraction * lambda_max(cfg.N, cfg.s);
    const PhiProfile phi(lambda, cfg.N, cfg.s);
    const double s = cfg.s;
    auto neumann = [&](double y) { return 2.0 * s * (1.0 - phi.radial(1.0, y)) / std::pow(y, 2.0 * s); };
    const double y1 = 1e-2, y2 = 2e-2;
    const double e1 = std::pow(y1, 2.0 - 2.0 * s), e2 = std::pow(y2, 2.0 - 2.0 * s);
    const double c = (neumann(y1) * e2 - neumann(y2) * e1) / (e2 - e1);
    CheckReport r = extended_form("picone", cfg, c);
    echo_problem(r, cfg, lambda, phi.mu());
    r.params["trace_potential"] = c;
    r.params["kappa_s_lambda"] = kappa_s(s) * lambda;
    finish(r);
    return r;
}

// ---- algebraic inequalities ----

CheckReport check_algebra_ab(const CheckConfig& cfg) {
    CheckReport r = base("algebra_ab", kPointwiseTol, cfg);
    Draws d(cfg.seed, r.id);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const int pairs = 500;
    for (int i = 0; i < cfg.functions; ++i) {
        const double m = 1.0 + 3.0 * U(d.rng);
        double worst = std::numeric_limits<double>::infinity();
        for (int q = 0; q < pairs; ++q) {
            const double a = U(d.rng), b = U(d.rng);
            worst = std::min(worst, m * std::pow(a, m - 1.0) * (a - b) - (std::pow(a, m) - std::pow(b, m)));
        }
        take(r, worst);
    }
    r.params["pairs_per_draw"] = pairs;
    finish(r);
    return r;
}

// f(tau) = (tau+1)^s / (1 + tau^s) has supremum 1 on [0, inf): f(0) = 1, f -> 1 at infinity,
// and t -> t^s is subadditive.
CheckReport check_algebra_abs(const CheckConfig& cfg) {
    CheckReport r = base("algebra_abs", kPointwiseTol, cfg);
    Draws d(cfg.seed, r.id);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double sup_f = 0.0;
    for (int i = 0; i < cfg.functions; ++i) {
        const double s = 0.02 + 0.96 * U(d.rng);
        double grid_sup = 0.0;
        for (int k = 0; k <= 4000; ++k) {
            const double tau = std::pow(10.0, -12.0 + 24.0 * k / 4000.0);
            grid_sup = std::max(grid_sup, std::pow(tau + 1.0, s) / (1.0 + std::pow(tau, s)));
        }
        sup_f = std::max(sup_f, grid_sup);
        double worst = 1.0 - grid_sup;
        for (int q = 0; q < 500; ++q) {
            const double a = U(d.rng), b = U(d.rng);
            worst = std::min(worst, std::pow(a, s) + std::pow(b, s) - std::pow(a + b, s));
        }
        take(r, worst);
    }
    r.params["C"] = 1.0;
    r.params["sampled_sup_f"] = sup_f;
    finish(r);
    return r;
}

// ---- radial kernel ----

CheckReport check_radial_K(const CheckConfig& cfg) {
    CheckReport r = base("radial_K", kPointwiseTol, cfg);
    Draws d(cfg.seed, r.id);
    std::uniform_real_distribution<double> U(0.02, 0.98);
    std::vector<double> sig{0.0, 1.0};
    for (int k = -8; k <= 8; ++k) {
        for (double f : {1.0, 1.5}) {
            const double v = std::ldexp(f, k);
            if (std::abs(v - 1.0) > 1e-12) sig.push_back(v);
        }
    }
    for (double v : {0.9, 0.99, 0.999, 1.001, 1.01, 1.1}) sig.push_back(v);
    r.params["N"] = cfg.N;
    r.params["s"] = cfg.s;
    double global_sup = 0.0;
    for (int i = 0; i < cfg.functions; ++i) {
        const double lambda = U(d.rng) * lambda_max(cfg.N, cfg.s);
        const double mu = exponents_at(cfg.N, cfg.s, lambda).mu;
        double sup = 0.0, err = 0.0;
        for (double sg : sig) {
            const double K = radial_K(cfg.N, mu, sg);
            if (!std::isfinite(K)) sup = std::numeric_limits<double>::infinity();
            sup = std::max(sup, K);
            // series reference is only used where it converges quickly
            if (sg == 1.0 || sg <= 0.9 || sg >= 1.0 / 0.9) {
                const double ref = radial_K_reference(cfg.N, mu, sg);
                err = std::max(err, std::abs(K - ref) / ref);
            }
        }
        global_sup = std::max(global_sup, sup);
        take(r, std::isfinite(sup) ? -err : -std::numeric_limits<double>::infinity());
    }
    r.params["sup_K"] = global_sup;
    r.params["sigma_count"] = sig.size();
    finish(r);
    return r;
}

// ---- ground-state operator ----

LsOptions ls_options_for(const TestFunction& tf) {
    LsOptions o;
    o.feature = tf.feature();
    o.support_radius = tf.support_radius();
    o.support_t0 = tf.support_t0();
    return o;
}

double sampled_max(const TestFunction& tf, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    double m = tf(tf.center, tf.t_center);
    std::vector<double> x(tf.N);
    for (int q = 0; q < 2000; ++q) {
        for (int i = 0; i < tf.N; ++i) x[i] = tf.center[i] + tf.width * U(rng);
        m = std::max(m, tf(x, tf.t_center + 0.5 * tf.t_width * U(rng)));
    }
    return m;
}

std::vector<double> random_direction(int N, std::mt19937_64& rng) {
    std::normal_distribution<double> G;
    std::vector<double> u(N);
    double n = 0.0;
    do {
        n = 0.0;
        for (double& v : u) {
            v = G(rng);
            n += v * v;
        }
    } while (n < 1e-12);
    for (double& v : u) v /= std::sqrt(n);
    return u;
}

CheckReport check_kato(const CheckConfig& cfg) {
    CheckReport r = base("kato", kPointwiseTol, cfg);
    Draws d(cfg.seed, r.id);
    const double lambda = cfg.lambda_fraction * lambda_max(cfg.N, cfg.s);
    const double m = cfg.kato_m;
    if (!(m > 1.0)) throw std::invalid_argument("kato: m must exceed 1");
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const int points = 3;
    double mu = 0.0;
    for (int i = 0; i < cfg.functions; ++i) {
        const TestFunction tf = draw_test_function(cfg.N, i, d.rng);
        const double scale = 1.0 / sampled_max(tf, d.rng);
        const GroundStateOperator Ls(cfg.N, cfg.s, lambda, ls_options_for(tf));
        mu = Ls.mu();
        const SpaceTimeFn phi = [&](std::span<const double> x, double t) { return scale * tf(x, t); };
        const SpaceTimeFn phim = [&](std::span<const double> x, double t) { return std::pow(scale * tf(x, t), m); };
        double worst = std::numeric_limits<double>::infinity();
        for (int q = 0; q < points; ++q) {
            const std::vector<double> u = random_direction(cfg.N, d.rng);
            const double rad = 0.3 + 1.7 * U(d.rng);
            std::vector<double> x(cfg.N);
            for (int k = 0; k < cfg.N; ++k) x[k] = tf.center[k] + rad * u[k];
            const double t = tf.t_center + 0.3 * tf.t_width * (2.0 * U(d.rng) - 1.0);
            const double lhs = Ls.apply(phim, x, t);
            const double rhs = m * std::pow(phi(x, t), m - 1.0) * Ls.apply(phi, x, t);
            worst = std::min(worst, rhs - lhs);
        }
        take(r, worst);
    }
    echo_problem(r, cfg, lambda, mu);
    r.params["m"] = m;
    r.params["points_per_function"] = points;
    finish(r);
    return r;
}

// ||phi||_inf + ||grad_{x,t} phi||_inf + ||grad_x^2 phi||_inf, sampled by central differences.
double derivative_norm(const TestFunction& tf, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const int N = tf.N;
    const double h1 = 1e-5, h2 = 1e-3;
    double f0 = 0.0, g = 0.0, hs = 0.0;
    std::vector<double> x(N), xp(N);
    for (int q = 0; q < 1500; ++q) {
        for (int i = 0; i < N; ++i) x[i] = tf.center[i] + 1.2 * tf.width * U(rng);
        const double t = tf.t_center + 1.2 * tf.t_width * U(rng);
        const double v = tf(x, t);
        f0 = std::max(f0, std::abs(v));
        double g2 = std::pow((tf(x, t + h1) - tf(x, t - h1)) / (2.0 * h1), 2);
        double hf2 = 0.0;
        for (int i = 0; i < N; ++i) {
            xp = x;
            xp[i] += h1;
            const double a = tf(xp, t);
            xp[i] -= 2.0 * h1;
            g2 += std::pow((a - tf(xp, t)) / (2.0 * h1), 2);
            for (int j = 0; j < N; ++j) {
                auto at = [&](double di, double dj) {
                    xp = x;
                    xp[i] += di;
                    xp[j] += dj;
                    return tf(xp, t);
                };
                const double hij = (at(h2, h2) - at(h2, -h2) - at(-h2, h2) + at(-h2, -h2)) / (4.0 * h2 * h2);
                hf2 += hij * hij;
            }
        }
        g = std::max(g, std::sqrt(g2));
        hs = std::max(hs, std::sqrt(hf2));
    }
    return f0 + g + hs;
}

// Shells r = 2^{1-k}; the weighted sup |x|^mu |L^s phi| / D(phi) on the inner shells
// (r < 1/8) must not exceed twice its value on the outer ones.
CheckReport check_ls_bound(const CheckConfig& cfg) {
    CheckReport r = base("ls_bound", 0.0, cfg);
    Draws d(cfg.seed, r.id);
    const double lambda = cfg.lambda_fraction * lambda_max(cfg.N, cfg.s);
    double mu = 0.0, worst_C = 0.0;
    const int shells = 8, dirs = 1;
    for (int i = 0; i < cfg.functions; ++i) {
        TestFunction tf = draw_test_function(cfg.N, i, d.rng);
        const GroundStateOperator Ls(cfg.N, cfg.s, lambda, ls_options_for(tf));
        mu = Ls.mu();
        const double D = derivative_norm(tf, d.rng);
        const SpaceTimeFn phi = [&](std::span<const double> x, double t) { return tf(x, t); };
        std::vector<std::vector<double>> u;
        for (int q = 0; q < dirs; ++q) u.push_back(random_direction(cfg.N, d.rng));
        double inner = 0.0, outer = 0.0;
        for (int k = 0; k < shells; ++k) {
            const double rad = std::ldexp(1.0, 1 - k);
            for (const auto& dir : u) {
                std::vector<double> x(cfg.N);
                for (int j = 0; j < cfg.N; ++j) x[j] = rad * dir[j];
                const double v = std::pow(rad, mu) * std::abs(Ls.apply(phi, x, tf.t_center)) / D;
                if (!std::isfinite(v)) {
                    inner = std::numeric_limits<double>::infinity();
                } else if (rad < 0.125) {
                    inner = std::max(inner, v);
                } else {
                    outer = std::max(outer, v);
                }
            }
        }
        worst_C = std::max({worst_C, inner, outer});
        take(r, std::isfinite(inner) && outer > 0.0 ? 1.0 - inner / (2.0 * outer)
                                                    : -std::numeric_limits<double>::infinity());
    }
    echo_problem(r, cfg, lambda, mu);
    r.params["sup_C"] = worst_C;
    r.params["shells"] = shells;
    finish(r);
    return r;
}

// ---- Muckenhoupt weight |y|^{1-2s} Phi~^2 on balls B_r(c r u) in R^{N+1} ----

struct BallRule {
    std::vector<std::vector<double>> z;  // offsets in the unit ball
    std::vector<double> w;
};

// Gauss-Legendre in radius and polar angles, trapezoid in the azimuth.
BallRule unit_ball_rule(int D, int nr, int na, int nphi) {
    const auto& gr = detail::gauss_legendre(nr);
    const auto& ga = detail::gauss_legendre(na);
    BallRule br;
    const int polar = D - 2;
    std::vector<int> idx(polar, 0);
    for (int ir = 0; ir < nr; ++ir) {
        const double rho = 0.5 * (gr.x[ir] + 1.0), wr = 0.5 * gr.w[ir] * std::pow(rho, D - 1.0);
        std::fill(idx.begin(), idx.end(), 0);
        while (true) {
            std::vector<double> base(D, 0.0);
            double sinprod = 1.0, wa = wr;
            for (int p = 0; p < polar; ++p) {
                const double a = 0.5 * std::numbers::pi * (ga.x[idx[p]] + 1.0);
                wa *= 0.5 * std::numbers::pi * ga.w[idx[p]] * std::pow(std::sin(a), D - 2.0 - p);
                base[p] = sinprod * std::cos(a);
                sinprod *= std::sin(a);
            }
            for (int ip = 0; ip < nphi; ++ip) {
                const double ph = 2.0 * std::numbers::pi * (ip + 0.5) / nphi;
                std::vector<double> z = base;
                z[D - 2] = sinprod * std::cos(ph);
                z[D - 1] = sinprod * std::sin(ph);
                for (double& v : z) v *= rho;
                br.z.push_back(std::move(z));
                br.w.push_back(wa * 2.0 * std::numbers::pi / nphi);
            }
            int p = 0;
            while (p < polar && ++idx[p] == na) idx[p++] = 0;
            if (p == polar) break;
        }
    }
    return br;
}

CheckReport check_muckenhoupt(const CheckConfig& cfg) {
    CheckReport r = base("muckenhoupt", kIntegralTol, cfg);
    Draws d(cfg.seed, r.id);
    const double lambda = cfg.lambda_fraction * lambda_max(cfg.N, cfg.s);
    const PhiProfile phi(lambda, cfg.N, cfg.s);
    const int D = cfg.N + 1;
    const BallRule br = D == 3 ? unit_ball_rule(3, 20, 20, 24) : unit_ball_rule(4, 16, 14, 20);
    const double vol = std::pow(std::numbers::pi, D / 2.0) / std::tgamma(D / 2.0 + 1.0);
    const double s = cfg.s;
    std::uniform_real_distribution<double> U(0.0, 2.0);
    double vmax = 0.0;
    for (int i = 0; i < cfg.functions; ++i) {
        const double c = i == 0 ? 0.0 : U(d.rng);
        const std::vector<double> u = random_direction(D, d.rng);
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0, cs = std::numeric_limits<double>::infinity();
        for (int k = -4; k <= 4; ++k) {
            const double rad = std::ldexp(1.0, k);
            double I = 0.0, J = 0.0;
            for (std::size_t q = 0; q < br.w.size(); ++q) {
                // last coordinate is the extension variable y
                double r2 = 0.0;
                for (int j = 0; j < D - 1; ++j) {
                    const double xj = rad * (c * u[j] + br.z[q][j]);
                    r2 += xj * xj;
                }
                const double y = std::abs(rad * (c * u[D - 1] + br.z[q][D - 1]));
                const double P = phi.fast(std::sqrt(r2), y);
                const double wgt = std::pow(y, 1.0 - 2.0 * s) * P * P;
                const double dv = br.w[q] * std::pow(rad, D);
                I += dv * wgt;
                J += dv / wgt;
            }
            const double A2 = std::pow(rad, -2.0 * D) * I * J;
            lo = std::min(lo, A2);
            hi = std::max(hi, A2);
            cs = std::min(cs, A2 / (vol * vol) - 1.0);
        }
        vmax = std::max(vmax, hi);
        // finite, above the Cauchy-Schwarz floor |B_1|^2, and flat in r
        const double margin = std::isfinite(hi) ? std::min(cs, -(hi / lo - 1.0)) : -std::numeric_limits<double>::infinity();
        take(r, margin);
    }
    echo_problem(r, cfg, lambda, phi.mu());
    r.params["sup_A2"] = vmax;
    r.params["ball_nodes"] = br.w.size();
    finish(r);
    return r;
}

// ---- spectral identities and probes ----

CheckReport check_adjoint(const CheckConfig& cfg) {
    CheckReport r = base("adjoint", 1e-10, cfg);
    Draws d(cfg.seed, r.id);
    const Lattice lat = make_lattice(2, 6.0, 64, 3.0, 3.0, 64);
    for (int i = 0; i < cfg.functions; ++i) {
        const TestFunction a = draw_test_function(2, i, d.rng);
        const TestFunction b = draw_test_function(2, i + 1, d.rng);
        const Field fa = sample([&](std::span<const double> x, double t) { return a(x, t); }, lat);
        const Field fb = sample([&](std::span<const double> x, double t) { return b(x, t); }, lat);
        take(r, -adjoint_defect(fa, fb, cfg.s));
    }
    r.params["s"] = cfg.s;
    r.params["lattice"] = {{"N", 2}, {"L", 6.0}, {"M", 64}, {"T_neg", 3.0}, {"T", 3.0}, {"K", 64}};
    finish(r);
    return r;
}

CheckReport check_symbol(const CheckConfig& cfg) {
    CheckReport r = base("symbol", 1e-3, cfg);
    SymbolCheckConfig sc;
    sc.s = cfg.s;
    const SymbolCheckResult res = symbol_of_kernel_check(sc);
    r.samples = res.samples;
    r.worst_margin = -res.max_rel_error;
    r.params = {{"N", sc.N}, {"s", sc.s}, {"T", sc.T}, {"L", sc.L}, {"box", sc.box}};
    finish(r);
    return r;
}

CheckReport single(const std::string& id, double tol, double err, nlohmann::json params) {
    CheckReport r;
    r.id = id;
    r.tolerance = tol;
    r.samples = 1;
    r.worst_margin = -err;
    r.params = std::move(params);
    r.params["error"] = err;
    finish(r);
    return r;
}

CheckReport check_inversion(const CheckConfig& cfg) {
    InversionProbe pr;
    pr.s = cfg.s;
    return single("inversion", 1e-2, inversion_error(pr),
                  {{"N", pr.N}, {"s", pr.s}, {"M", pr.M}, {"K", pr.K}, {"L", pr.L}, {"T", pr.T}});
}

CheckReport check_semigroup(const CheckConfig&) {
    const Lattice lat = make_lattice(2, 8.0, 64, 0.0, 6.0, 64);
    return single("semigroup", 1e-2, semigroup_error(0.3, 0.2, lat),
                  {{"a", 0.3}, {"b", 0.2}, {"N", 2}, {"M", 64}, {"K", 64}});
}

CheckReport check_ground_state(const CheckConfig&) {
    GroundStateProbe pr;
    const GroundStateReport g = ground_state_residual(pr);
    CheckReport r = single("ground_state", 5e-2, g.residual,
                           {{"N", pr.N}, {"s", pr.s}, {"lambda_fraction", pr.lambda_fraction}, {"M", pr.M},
                            {"K", pr.K}, {"nodes", g.nodes}});
    r.samples = g.nodes;
    return r;
}

CheckReport check_radial_flap(const CheckConfig&) {
    RadialFlapProbe pr;
    return single("radial_flap", 5e-2, radial_flap_residual(pr),
                  {{"N", pr.N}, {"s", pr.s}, {"lambda_fraction", pr.lambda_fraction}, {"M", pr.M}, {"L", pr.L}});
}

// Margin is the unused fraction of the tighter of the two budgets.
CheckReport check_extension(const CheckConfig&) {
    ExtensionProbe pr;
    const ExtensionReport e = extension_check(pr);
    CheckReport r;
    r.id = "extension";
    r.tolerance = 0.0;
    r.samples = 2;
    r.worst_margin = 1.0 - std::max(e.trace_error / 2e-2, e.neumann_error / 5e-2);
    r.params = {{"N", pr.N},           {"s", pr.s},
                {"trace_error", e.trace_error}, {"neumann_error", e.neumann_error},
                {"trace_budget", 2e-2}, {"neumann_budget", 5e-2}};
    finish(r);
    return r;
}

using CheckFn = CheckReport (*)(const CheckConfig&);

const std::vector<std::pair<std::string, CheckFn>>& registry() {
    static const std::vector<std::pair<std::string, CheckFn>> reg{
        {"hardy", check_hardy},
        {"hardy_extended", check_hardy_extended},
        {"kato", check_kato},
        {"algebra_ab", check_algebra_ab},
        {"algebra_abs", check_algebra_abs},
        {"radial_K", check_radial_K},
        {"symbol", check_symbol},
        {"inversion", check_inversion},
        {"semigroup", check_semigroup},
        {"adjoint", check_adjoint},
        {"ground_state", check_ground_state},
        {"radial_flap", check_radial_flap},
        {"extension", check_extension},
        {"muckenhoupt", check_muckenhoupt},
        {"picone", check_picone},
        {"ls_bound", check_ls_bound},
    };
    return reg;
}

}  // namespace

const std::vector<std::string>& check_catalog() {
    static const std::vector<std::string> ids = [] {
        std::vector<std::string> v;
        for (const auto& e : registry()) v.push_back(e.first);
        return v;
    }();
    return ids;
}

bool is_check(const std::string& id) {
    const auto& c = check_catalog();
    return std::find(c.begin(), c.end(), id) != c.end();
}

CheckReport run_check(const std::string& id, const CheckConfig& cfg) {
    for (const auto& [name, fn] : registry()) {
        if (name == id) return fn(cfg);
    }
    throw UnknownCheck("unknown check id '" + id + "'");
}

std::vector<CheckReport> run_suite(const std::vector<std::string>& ids, const CheckConfig& cfg, int threads) {
    for (const auto& id : ids) {
        if (!is_check(id)) throw UnknownCheck("unknown check id '" + id + "'");
    }
    std::vector<CheckReport> out(ids.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < ids.size();) {
            try {
                out[i] = run_check(ids[i], cfg);
            } catch (const std::exception& e) {
                out[i].id = ids[i];
                out[i].passed = false;
                out[i].worst_margin = -std::numeric_limits<double>::infinity();
                out[i].params = {{"exception", e.what()}};
            }
        }
    };
    const int n = std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(1, ids.size())));
    std::vector<std::thread> pool;
    for (int k = 1; k < n; ++k) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return out;
}

nlohmann::json to_json(const CheckReport& r) {
    nlohmann::json j{{"id", r.id}, {"passed", r.passed}, {"samples", r.samples}, {"tolerance", r.tolerance},
                     {"params", r.params}};
    if (std::isfinite(r.worst_margin)) {
        j["worst_margin"] = r.worst_margin;
    } else {
        j["worst_margin"] = r.worst_margin > 0 ? "inf" : "-inf";
    }
    return j;
}

nlohmann::json to_json(const std::vector<CheckReport>& rs) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& r : rs) a.push_back(to_json(r));
    return a;
}

}  // namespace fhlab
