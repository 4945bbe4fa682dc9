#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "fhlab/kernel_ops.hpp"
#include "fhlab/spectral_constants.hpp"
#include "spectral_apply.hpp"

namespace fhlab {

namespace {

using cplx = std::complex<double>;

// K_s(z) = int_0^inf e^{-z cosh u} cosh(s u) du for Re z > 0, |arg z| <= pi/4.
// The integrand is analytic in a strip of half-width pi/4, so the trapezoid rule
// with step 0.1 is accurate to far below double precision.
cplx bessel_k(double s, cplx z) {
    const double du = 0.1;
    const double re = z.real();
    const double reach = std::acosh(std::max(1.0, 45.0 / re)) + 2.0;
    const int n = static_cast<int>(std::ceil(reach / du));
    cplx acc = 0.5 * std::exp(-z);
    for (int k = 1; k <= n; ++k) {
        const double u = k * du;
        acc += std::exp(-z * std::cosh(u)) * std::cosh(s * u);
    }
    return acc * du;
}

// Fourier multiplier of the extension at height y: (2/Gamma(s)) c^{s/2} K_s(2 sqrt c), c = (a + i theta) y^2 / 4.
cplx extension_multiplier(double s, double y, double a, double theta) {
    if (a == 0.0 && theta == 0.0) return 1.0;
    const cplx c = cplx(a, theta) * (y * y / 4.0);
    const cplx rc = std::sqrt(c);
    return 2.0 / gamma_fn(s) * std::pow(rc, s) * bessel_k(s, 2.0 * rc);
}

}  // namespace

std::vector<Field> extend_parabolic(const Field& w, double s, const std::vector<double>& ys, int time_pad) {
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("extend_parabolic: s must lie in (0,1)");
    const double defect = causality_defect(w);
    if (defect > 1e-12) throw std::invalid_argument("extend_parabolic: w must vanish for t <= 0");
    std::vector<Field> out;
    out.reserve(ys.size());
    for (double y : ys) {
        if (!(y > 0.0)) throw std::invalid_argument("extend_parabolic: levels must be positive");
        out.push_back(detail::apply_multiplier(
            w, [=](double a, double th) { return extension_multiplier(s, y, a, th); },
            SpatialSymbol::Continuous, time_pad, 1e-10, "extend_parabolic"));
    }
    return out;
}

ExtensionReport extension_check(const ExtensionProbe& pr) {
    if (pr.ys.size() < 2) throw std::invalid_argument("extension_check: two levels required");
    const Lattice lat = make_lattice(pr.N, pr.L, pr.M, 0.0, pr.T, pr.K);
    const double t0 = 0.5 * pr.T, sig = pr.sigma;
    const Field w = make_causal(sample(
        [&](std::span<const double> x, double t) {
            double r2 = 0.0;
            for (double v : x) r2 += v * v;
            return std::exp(-r2 - (t - t0) * (t - t0) / (sig * sig));
        },
        lat));
    const auto W = extend_parabolic(w, pr.s, {pr.ys[0], pr.ys[1]});
    const Field h = apply_Hs_spectral(w, pr.s);
    const double ks = kappa_s(pr.s);
    const double y1 = pr.ys[0], y2 = pr.ys[1];
    const double den = std::pow(y2, 2.0 * pr.s) - std::pow(y1, 2.0 * pr.s);

    ExtensionReport rep;
    double tr = 0.0, ne = 0.0, ref = 0.0;
    const std::size_t S = lat.slice_size();
    for (int k = 0; k < lat.K; ++k) {
        const double t = lat.t(k);
        const bool t_in = t >= 0.125 * pr.T && t <= 0.875 * pr.T;
        for (std::size_t j = 0; j < S; ++j) {
            tr = std::max(tr, std::abs(W[0].at(k, j) - w.at(k, j)));
            if (!t_in || lat.radius(j) > 0.5 * pr.L) continue;
            const double est = -2.0 * pr.s * (W[1].at(k, j) - W[0].at(k, j)) / den;
            ne = std::max(ne, std::abs(est - ks * h.at(k, j)));
            ref = std::max(ref, std::abs(ks * h.at(k, j)));
        }
    }
    rep.trace_error = tr / w.max_abs();
    rep.neumann_error = ref > 0.0 ? ne / ref : 0.0;
    return rep;
}

}  // namespace fhlab
