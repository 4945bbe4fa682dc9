#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "fhlab/kernel_ops.hpp"
#include "fhlab/spectral_constants.hpp"
#include "quadrature.hpp"

namespace fhlab {

std::complex<double> kernel_symbol_closed_form(int N, double s, double xi2, double theta) {
    return std::pow(4.0 * std::numbers::pi, N / 2.0) * gamma_fn(s) *
           std::pow(std::complex<double>(xi2, theta), -s);
}

namespace {

// Trapezoid of e^{-z^2/4tau} cos(xi z) over |z| <= L on a grid through z = 0.
double axis_sum(double xi, double tau, double L, double hz) {
    const double h = std::min(hz, 0.5 * std::sqrt(tau));
    const double reach = std::min(L, 12.0 * std::sqrt(tau));
    const int n = static_cast<int>(std::floor(reach / h));
    double acc = 1.0;
    for (int i = 1; i <= n; ++i) {
        const double z = i * h;
        acc += 2.0 * std::exp(-z * z / (4.0 * tau)) * std::cos(xi * z);
    }
    return acc * h;
}

}  // namespace

SymbolCheckResult symbol_of_kernel_check(const SymbolCheckConfig& cfg) {
    const int N = cfg.N;
    const double s = cfg.s;

    // Sample box: integer lattice of spatial frequencies inside |xi| <= box,
    // times a set of temporal frequencies; the origin is excluded.
    std::vector<std::vector<double>> xis;
    const int nb = static_cast<int>(std::floor(cfg.box));
    std::vector<int> idx(N, 0);
    while (true) {
        double r2 = 0.0;
        for (int v : idx) r2 += double(v) * v;
        if (r2 <= cfg.box * cfg.box + 1e-12) {
            std::vector<double> xi(idx.begin(), idx.end());
            xis.push_back(xi);
        }
        int d = 0;
        while (d < N && ++idx[d] > nb) idx[d++] = 0;
        if (d == N) break;
    }
    const std::vector<double> thetas{-cfg.box, -cfg.box / 2, -1.0, -0.5, 0.0, 0.5, 1.0, cfg.box / 2, cfg.box};

    std::vector<double> comp;
    for (int v = 0; v <= nb; ++v) comp.push_back(v);

    // tau panels: singular first panel in u = tau^s, geometric growth, then uniform.
    std::vector<std::pair<double, double>> panels;
    const double tau1 = 1e-4;
    double a = tau1;
    while (a < cfg.T) {
        const double w = std::min({a, 0.25, cfg.T - a});
        panels.emplace_back(a, a + w);
        a += w;
    }
    const auto& gl = detail::gauss_legendre(8);

    const std::size_t nx = xis.size(), nt = thetas.size();
    std::vector<std::complex<double>> acc(nx * nt, 0.0);
    std::vector<double> S(comp.size());

    auto add_node = [&](double tau, double weight) {
        const double win = tau <= 0.5 * cfg.T ? 1.0 : quintic_blend((tau - 0.5 * cfg.T) / (0.5 * cfg.T));
        if (win == 0.0) return;
        for (std::size_t c = 0; c < comp.size(); ++c) S[c] = axis_sum(comp[c], tau, cfg.L, cfg.hz);
        const double base = weight * win * std::pow(tau, -N / 2.0 - 1.0 + s);
        for (std::size_t i = 0; i < nx; ++i) {
            double prod = base;
            for (int d = 0; d < N; ++d) prod *= S[static_cast<std::size_t>(xis[i][d])];
            for (std::size_t j = 0; j < nt; ++j) {
                acc[i * nt + j] += prod * std::polar(1.0, -thetas[j] * tau);
            }
        }
    };

    // First panel [0, tau1]: tau = u^{1/s}, d tau = (1/s) u^{1/s - 1} du.
    {
        const double U = std::pow(tau1, s);
        for (std::size_t q = 0; q < gl.x.size(); ++q) {
            const double u = 0.5 * U * (gl.x[q] + 1.0);
            const double tau = std::pow(u, 1.0 / s);
            const double jac = std::pow(u, 1.0 / s - 1.0) / s;
            add_node(tau, 0.5 * U * gl.w[q] * jac);
        }
    }
    for (const auto& [lo, hi] : panels) {
        for (std::size_t q = 0; q < gl.x.size(); ++q) {
            const double tau = 0.5 * (hi - lo) * gl.x[q] + 0.5 * (hi + lo);
            add_node(tau, 0.5 * (hi - lo) * gl.w[q]);
        }
    }

    SymbolCheckResult res;
    for (std::size_t i = 0; i < nx; ++i) {
        double xi2 = 0.0;
        for (double v : xis[i]) xi2 += v * v;
        for (std::size_t j = 0; j < nt; ++j) {
            if (xi2 == 0.0 && thetas[j] == 0.0) continue;
            const auto ref = kernel_symbol_closed_form(N, s, xi2, thetas[j]);
            res.max_rel_error = std::max(res.max_rel_error, std::abs(acc[i * nt + j] - ref) / std::abs(ref));
            ++res.samples;
        }
    }
    return res;
}

}  // namespace fhlab
