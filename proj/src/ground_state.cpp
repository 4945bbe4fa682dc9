#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/hypergeometric_1F1.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "fhlab/kernel_ops.hpp"
#include "fhlab/spectral_constants.hpp"
#include "quadrature.hpp"

namespace fhlab {

namespace {

constexpr double kGaussReach = 10.0;  // e^{-kGaussReach^2/4} is below double precision relevance

// Orthonormal frame with e[0] = x / |x|.
std::array<std::array<double, 3>, 3> frame(std::span<const double> x, double r) {
    std::array<std::array<double, 3>, 3> e{};
    const int N = static_cast<int>(x.size());
    for (int d = 0; d < N; ++d) e[0][d] = x[d] / r;
    if (N == 2) {
        e[1] = {-e[0][1], e[0][0], 0.0};
        return e;
    }
    // Pick the axis least aligned with e0, orthogonalize.
    int ax = 0;
    for (int d = 1; d < 3; ++d)
        if (std::abs(e[0][d]) < std::abs(e[0][ax])) ax = d;
    std::array<double, 3> v{};
    v[ax] = 1.0;
    const double pr = v[0] * e[0][0] + v[1] * e[0][1] + v[2] * e[0][2];
    double n = 0.0;
    for (int d = 0; d < 3; ++d) {
        v[d] -= pr * e[0][d];
        n += v[d] * v[d];
    }
    n = std::sqrt(n);
    for (int d = 0; d < 3; ++d) e[1][d] = v[d] / n;
    e[2] = {e[0][1] * e[1][2] - e[0][2] * e[1][1], e[0][2] * e[1][0] - e[0][0] * e[1][2],
            e[0][0] * e[1][1] - e[0][1] * e[1][0]};
    return e;
}

}  // namespace

GroundStateOperator::GroundStateOperator(int N, double s, double lambda, LsOptions opt)
    : N_(N), s_(s), lambda_(lambda), opt_(opt) {
    if (N != 2 && N != 3) throw std::invalid_argument("GroundStateOperator: N must be 2 or 3");
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("GroundStateOperator: s must lie in (0,1)");
    if (!(lambda >= 0.0 && lambda <= lambda_max(N, s)))
        throw std::invalid_argument("GroundStateOperator: lambda outside [0, Lambda]");
    mu_ = lambda == 0.0 ? 0.0 : exponents_at(N, s, lambda).mu;
    c_ = 1.0 / (std::pow(4.0 * std::numbers::pi, N / 2.0) * std::abs(gamma_fn(-s)));

    const auto& gh = detail::gauss_hermite(opt_.gh_points);
    const int n = opt_.gh_points;
    std::size_t total = 1;
    for (int d = 0; d < N; ++d) total *= static_cast<std::size_t>(n);
    gh_x_.resize(total * N);
    gh_w_.resize(total);
    for (std::size_t j = 0; j < total; ++j) {
        std::size_t jj = j;
        double w = 1.0;
        for (int d = 0; d < N; ++d) {
            const int i = static_cast<int>(jj % n);
            jj /= n;
            gh_x_[j * N + d] = gh.x[i];
            w *= gh.w[i];
        }
        gh_w_[j] = w;
    }
}

// (4 pi)^{N/2} * int_{tau_lo}^inf tau^{-1-s} E(r, tau) dtau, E = heat semigroup of |y|^{-mu}.
double GroundStateOperator::mass_tail(double r, double tau_lo) const {
    const double N = N_, s = s_, mu = mu_;
    const double pref = std::exp(std::lgamma((N - mu) / 2.0) - std::lgamma(N / 2.0));
    auto E = [&](double tau) {
        const double z = -r * r / (4.0 * tau);
        const double f = mu == 0.0 ? 1.0 : boost::math::hypergeometric_1F1(mu / 2.0, N / 2.0, z);
        return std::pow(4.0 * tau, -mu / 2.0) * pref * f;
    };
    const double rate = s + mu / 2.0;
    const double V = 40.0 / rate;
    auto g = [&](double v) {
        const double tau = tau_lo * std::exp(v);
        return std::pow(tau, -s) * E(tau);
    };
    double acc = 0.0;
    const int pieces = static_cast<int>(std::ceil(V));
    for (int i = 0; i < pieces; ++i) {
        acc += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, V * i / pieces,
                                                                             V * (i + 1) / pieces, 8, 1e-13);
    }
    // Beyond V the hypergeometric factor is 1 to within e^{-40}.
    acc += std::pow(tau_lo, -s) * std::pow(4.0 * tau_lo, -mu / 2.0) * pref * std::exp(-rate * V) / rate;
    return std::pow(4.0 * std::numbers::pi, N / 2.0) * acc;
}

// tau in (0, tau_s]: y = x + 2 sqrt(tau) zeta, Gauss-Hermite in zeta, Gauss-Legendre in u = tau^{1-s}.
double GroundStateOperator::near_field(const SpaceTimeFn& psi, std::span<const double> x, double t,
                                       double psi_x, double tau_s) const {
    const int N = N_;
    const auto& gl = detail::gauss_legendre(opt_.near_tau_nodes);
    const double U = std::pow(tau_s, 1.0 - s_);
    const std::size_t nodes = gh_w_.size();
    std::array<double, 3> y{};
    double acc = 0.0;
    for (std::size_t q = 0; q < gl.x.size(); ++q) {
        const double u = 0.5 * U * (gl.x[q] + 1.0);
        const double tau = std::pow(u, 1.0 / (1.0 - s_));
        const double st = 2.0 * std::sqrt(tau);
        double F = 0.0;
        for (std::size_t j = 0; j < nodes; ++j) {
            double y2 = 0.0;
            for (int d = 0; d < N; ++d) {
                y[d] = x[d] + st * gh_x_[j * N + d];
                y2 += y[d] * y[d];
            }
            const double wy = mu_ == 0.0 ? 1.0 : std::pow(y2, -mu_ / 2.0);
            F += gh_w_[j] * wy * (psi_x - psi(std::span<const double>(y.data(), N), t - tau));
        }
        acc += 0.5 * U * gl.w[q] * F / tau;
    }
    return acc * std::pow(4.0, N / 2.0) / (1.0 - s_);
}

// tau in [tau_lo, tau_hi]: polar quadrature of the y integral around the origin.
double GroundStateOperator::far_field(const SpaceTimeFn& psi, std::span<const double> x, double t,
                                      double psi_x, double tau_lo, double tau_hi) const {
    const int N = N_;
    double r = 0.0;
    for (double v : x) r += v * v;
    r = std::sqrt(r);
    const auto e = frame(x, r);
    const auto& glt = detail::gauss_legendre(opt_.tau_nodes);
    const auto& glp = detail::gauss_legendre(opt_.panel_nodes);
    const double R = opt_.support_radius;
    const int naz = N == 3 ? opt_.azimuth_nodes : 1;
    std::vector<double> caz(naz), saz(naz);
    for (int k = 0; k < naz; ++k) {
        caz[k] = std::cos(2.0 * std::numbers::pi * k / naz);
        saz[k] = std::sin(2.0 * std::numbers::pi * k / naz);
    }

    std::array<double, 3> y{};
    auto angular = [&](double rho, double tau, double t_eval) {
        // Integral over the sphere of radius rho of e^{-|x-y|^2/4tau} (psi_x - psi(y)).
        const double ex = (rho - r) * (rho - r) / (4.0 * tau);
        const double span = 2.0 * tau * kGaussReach * kGaussReach / 4.0 / (rho * r);
        const double amax = span >= 2.0 ? std::numbers::pi : std::acos(1.0 - span);
        const double wg = std::sqrt(tau / (rho * r));
        const double wcap = rho > R ? std::numbers::pi / 4.0
                                    : std::min(std::numbers::pi / 4.0, opt_.feature / rho);
        double width = std::min(wg, wcap);
        double a = 0.0, acc = 0.0;
        while (a < amax) {
            const double b = std::min(amax, a + width);
            for (std::size_t q = 0; q < glp.x.size(); ++q) {
                const double al = 0.5 * (b - a) * glp.x[q] + 0.5 * (b + a);
                const double ca = std::cos(al), sa = std::sin(al);
                const double g = std::exp(-ex - rho * r * (1.0 - ca) / (2.0 * tau));
                double inner = 0.0;
                if (N == 2) {
                    for (int sg : {-1, 1}) {
                        for (int d = 0; d < 2; ++d) y[d] = rho * (ca * e[0][d] + sg * sa * e[1][d]);
                        inner += psi_x - (rho > R ? 0.0 : psi(std::span<const double>(y.data(), 2), t_eval));
                    }
                } else {
                    for (int k = 0; k < naz; ++k) {
                        for (int d = 0; d < 3; ++d)
                            y[d] = rho * (ca * e[0][d] + sa * (caz[k] * e[1][d] + saz[k] * e[2][d]));
                        inner += psi_x - (rho > R ? 0.0 : psi(std::span<const double>(y.data(), 3), t_eval));
                    }
                    inner *= sa * 2.0 * std::numbers::pi / naz;
                }
                acc += 0.5 * (b - a) * glp.w[q] * g * inner;
            }
            a = b;
            width = std::min(2.0 * width, wcap);
        }
        return acc;
    };

    auto spatial = [&](double tau) {
        const double st = std::sqrt(tau);
        const double lo = std::max(0.0, r - kGaussReach * st);
        const double hi = r + kGaussReach * st;
        double acc = 0.0;
        double a = lo;
        const double t_eval = t - tau;
        while (a < hi) {
            const double h = a < R ? std::min(st, opt_.feature) : st;
            const double b = std::min(hi, a + h);
            auto plain = [&](double lo_, double hi_) {
                for (std::size_t q = 0; q < glp.x.size(); ++q) {
                    const double rho = 0.5 * (hi_ - lo_) * glp.x[q] + 0.5 * (hi_ + lo_);
                    acc += 0.5 * (hi_ - lo_) * glp.w[q] * std::pow(rho, N - 1.0 - mu_) * angular(rho, tau, t_eval);
                }
            };
            if (a == 0.0) {
                // Geometric panels toward the origin; psi may itself carry a power of |y|.
                const int levels = 8;
                double top = b;
                for (int l = 0; l < levels; ++l) {
                    plain(0.25 * top, top);
                    top *= 0.25;
                }
                // Innermost panel: rho^{N-1-mu} absorbed by w = rho^{N-mu}.
                const double p = N - mu_;
                const double W = std::pow(top, p);
                for (std::size_t q = 0; q < glp.x.size(); ++q) {
                    const double w = 0.5 * W * (glp.x[q] + 1.0);
                    const double rho = std::pow(w, 1.0 / p);
                    acc += 0.5 * W * glp.w[q] / p * angular(rho, tau, t_eval);
                }
            } else {
                plain(a, b);
            }
            a = b;
        }
        return acc;
    };

    const double decades = std::log10(tau_hi / tau_lo);
    const int panels = std::max(1, static_cast<int>(std::ceil(decades * opt_.panels_per_decade)));
    const double v0 = std::log(tau_lo), dv = (std::log(tau_hi) - v0) / panels;
    double acc = 0.0;
    for (int p = 0; p < panels; ++p) {
        for (std::size_t q = 0; q < glt.x.size(); ++q) {
            const double v = v0 + dv * (p + 0.5 * (glt.x[q] + 1.0));
            const double tau = std::exp(v);
            acc += 0.5 * dv * glt.w[q] * std::pow(tau, -N / 2.0 - s_) * spatial(tau);
        }
    }
    return acc;
}

double GroundStateOperator::apply(const SpaceTimeFn& psi, std::span<const double> x, double t) const {
    if (static_cast<int>(x.size()) != N_) throw std::invalid_argument("GroundStateOperator: dimension mismatch");
    if (!(opt_.support_t0 > -1e299))
        throw std::invalid_argument("GroundStateOperator: psi needs a finite support start in time");
    double r = 0.0;
    for (double v : x) r += v * v;
    r = std::sqrt(r);
    if (r == 0.0) throw std::domain_error("GroundStateOperator: x = 0 is singular");

    const double psi_x = psi(x, t);
    const double tau_s = opt_.near_ratio * r * r;
    const double tau_b = t - opt_.support_t0;
    double acc = near_field(psi, x, t, psi_x, tau_s);
    double tail_from = tau_s;
    if (tau_b > tau_s) {
        acc += far_field(psi, x, t, psi_x, tau_s, tau_b);
        tail_from = tau_b;
    }
    // psi(., t - tau) vanishes beyond tau_b: only the mass term survives.
    if (psi_x != 0.0) acc += psi_x * mass_tail(r, tail_from);
    if (!std::isfinite(acc)) throw std::runtime_error("GroundStateOperator: quadrature produced a non-finite value");
    return c_ * acc;
}

GroundStateReport ground_state_residual(const GroundStateProbe& pr) {
    const double lambda = pr.lambda_fraction * lambda_max(pr.N, pr.s);
    LsOptions ls = pr.ls;
    const double tc = pr.t_center, sig = pr.sigma;
    ls.support_t0 = tc - 7.0 * sig;
    const GroundStateOperator op(pr.N, pr.s, lambda, ls);
    const double mu = op.mu();

    auto phi = [=](std::span<const double> x, double t) {
        double r2 = 0.0;
        for (double v : x) r2 += v * v;
        return std::exp(-r2 - (t - tc) * (t - tc) / (sig * sig));
    };
    const SpaceTimeFn psi = [=](std::span<const double> x, double t) {
        double r2 = 0.0;
        for (double v : x) r2 += v * v;
        return std::pow(r2, mu / 2.0) * phi(x, t);
    };

    const Lattice lat = make_lattice(pr.N, pr.L, pr.M, pr.T_neg, pr.T, pr.K, pr.pad);
    const Field f = sample(phi, lat);
    SpectralOptions so;
    so.time_pad = pr.time_pad;
    const Field h = apply_Hs_spectral(f, pr.s, so);

    const int kc = static_cast<int>(std::lround((tc + lat.T_neg) / lat.ht));
    GroundStateReport rep;
    double max_lhs = 0.0, max_diff = 0.0;
    std::vector<double> x(pr.N);
    const std::size_t S = lat.slice_size();
    int counter = 0;
    for (int k = kc - pr.slices / 2; k < kc - pr.slices / 2 + pr.slices; ++k) {
        const double t = lat.t(k);
        for (std::size_t j = 0; j < S; ++j) {
            lat.coords(j, x.data());
            const double r = std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
            if (r < 0.5 || r > 2.0) continue;
            if (counter++ % pr.node_stride != 0) continue;
            const double lhs = h.at(k, j) - lambda * std::pow(r, -2.0 * pr.s) * f.at(k, j);
            const double rhs = op.apply(psi, x, t);
            max_lhs = std::max(max_lhs, std::abs(lhs));
            max_diff = std::max(max_diff, std::abs(lhs - rhs));
            ++rep.nodes;
        }
    }
    rep.residual = max_lhs > 0.0 ? max_diff / max_lhs : 0.0;
    return rep;
}

double RadialFlap::operator()(double r) const { return lambda * std::pow(r, -2.0 * s - mu); }

RadialFlap radial_power_flap(double mu, int N, double s) {
    const double top = (N - 2.0 * s) / 2.0;
    if (!(mu > 0.0 && mu <= top)) throw std::domain_error("radial_power_flap: mu outside (0, (N-2s)/2]");
    return RadialFlap{mu, upsilon(top - mu, N, s), N, s};
}

namespace {

// (-Delta)^s of h = (1 - chi(|y|)) |y|^{-mu} at a point with |x| = r well inside the
// cut radius: h vanishes near x, so only the (negative) far integral remains.
double cut_tail_correction(double r, int N, double s, double mu, double r_in, double r_out) {
    const double aNs = std::pow(2.0, 2.0 * s) * std::exp(std::lgamma((N + 2.0 * s) / 2.0)) /
                       (std::pow(std::numbers::pi, N / 2.0) * std::abs(gamma_fn(-s)));
    const double q = (N + 2.0 * s) / 2.0;
    const int na = 64;
    auto sphere = [&](double rho) {
        // Average over directions of |x - rho w|^{-N-2s} times |S^{N-1}|.
        double acc = 0.0;
        if (N == 2) {
            for (int k = 0; k < na; ++k) {
                const double a = 2.0 * std::numbers::pi * (k + 0.5) / na;
                acc += std::pow(r * r + rho * rho - 2.0 * r * rho * std::cos(a), -q);
            }
            return acc * 2.0 * std::numbers::pi / na;
        }
        // N = 3: closed form of the polar integral.
        const double A = r * r + rho * rho, B = 2.0 * r * rho;
        return 2.0 * std::numbers::pi * (std::pow(A - B, 1.0 - q) - std::pow(A + B, 1.0 - q)) / (B * (q - 1.0));
    };
    auto cut = [&](double rho) { return 1.0 - quintic_blend((rho - r_in) / (r_out - r_in)); };
    auto integrand = [&](double rho) { return cut(rho) * std::pow(rho, N - 1.0 - mu) * sphere(rho); };
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    double acc = GK::integrate(integrand, r_in, r_out, 10, 1e-12);
    // rho = r_out / v on (0, 1].
    acc += GK::integrate([&](double v) { return v > 0.0 ? integrand(r_out / v) * r_out / (v * v) : 0.0; }, 0.0,
                         1.0, 10, 1e-12);
    return -aNs * acc;
}

}  // namespace

double radial_flap_residual(const RadialFlapProbe& pr) {
    const double lambda = pr.lambda_fraction * lambda_max(pr.N, pr.s);
    const double mu = exponents_at(pr.N, pr.s, lambda).mu;
    const RadialFlap flap = radial_power_flap(mu, pr.N, pr.s);
    const double r_in = 0.6 * pr.L, r_out = 0.8 * pr.L;
    const Lattice lat = make_lattice(pr.N, pr.L, pr.M, 0.0, 1.0, 8);
    const Field g = sample(
        [&](std::span<const double> x, double) {
            double r2 = 0.0;
            for (double v : x) r2 += v * v;
            const double r = std::sqrt(r2);
            return std::pow(r, -mu) * quintic_blend((r - r_in) / (r_out - r_in));
        },
        lat);
    const Field out = apply_frac_laplacian(g, pr.s);
    std::vector<double> x(pr.N);
    double worst = 0.0;
    for (std::size_t j = 0; j < lat.slice_size(); ++j) {
        lat.coords(j, x.data());
        const double r = std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
        if (r < 0.5 || r > 2.0) continue;
        const double ref = flap(r) - cut_tail_correction(r, pr.N, pr.s, mu, r_in, r_out);
        worst = std::max(worst, std::abs(out.at(0, j) - ref) / std::abs(ref));
    }
    return worst;
}

}  // namespace fhlab
