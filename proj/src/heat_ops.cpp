#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "fft.hpp"
#include "fhlab/kernel_ops.hpp"
#include "fhlab/spectral_constants.hpp"
#include "quadrature.hpp"
#include "spectral_apply.hpp"

namespace fhlab {

using detail::AlignedBuffer;
using detail::cplx;

double heat_kernel_Y(std::span<const double> z, double tau, int N, double s) {
    if (tau <= 0.0) return 0.0;
    double z2 = 0.0;
    for (double v : z) z2 += v * v;
    return std::exp(-z2 / (4.0 * tau)) /
           (gamma_fn(s) * std::pow(4.0 * std::numbers::pi, N / 2.0) * std::pow(tau, N / 2.0 + 1.0 - s));
}

std::complex<double> symbol_Hs(double xi2, double theta, double s) {
    if (xi2 == 0.0 && theta == 0.0) return {0.0, 0.0};
    return std::pow(cplx(xi2, theta), s);
}

namespace {

// |xi|^2 for every point of a padded spatial grid of size Mp^N (full layout).
std::vector<double> full_xi2(int N, int Mp, double hx, SpatialSymbol sym) {
    const auto ax = axis_symbol(Mp, hx, sym);
    std::size_t S = 1;
    for (int d = 0; d < N; ++d) S *= static_cast<std::size_t>(Mp);
    std::vector<double> a(S, 0.0);
    for (std::size_t j = 0; j < S; ++j) {
        std::size_t jj = j;
        double v = 0.0;
        for (int d = 0; d < N; ++d) {
            v += ax[jj % Mp];
            jj /= Mp;
        }
        a[j] = v;
    }
    return a;
}

// Same for the r2c half layout: last axis has Mp/2+1 entries.
std::vector<double> half_xi2(int N, int Mp, double hx, SpatialSymbol sym) {
    const auto ax = axis_symbol(Mp, hx, sym);
    const int Mh = Mp / 2 + 1;
    std::size_t S = Mh;
    for (int d = 0; d + 1 < N; ++d) S *= static_cast<std::size_t>(Mp);
    std::vector<double> a(S, 0.0);
    for (std::size_t j = 0; j < S; ++j) {
        std::size_t jj = j;
        double v = ax[jj % Mh];
        jj /= Mh;
        for (int d = 0; d + 1 < N; ++d) {
            v += ax[jj % Mp];
            jj /= Mp;
        }
        a[j] = v;
    }
    return a;
}

// Copies a physical slice into the corner of a zero padded spatial array.
void scatter_slice(std::span<const double> src, int N, int M, int Mp, double* dst) {
    const std::size_t S = src.size();
    for (std::size_t j = 0; j < S; ++j) {
        std::size_t jj = j, off = 0, stride = 1;
        for (int d = N - 1; d >= 0; --d) {
            off += (jj % M) * stride;
            jj /= M;
            stride *= Mp;
        }
        dst[off] = src[j];
    }
}

void gather_slice(const double* src, int N, int M, int Mp, double scale, std::span<double> dst) {
    for (std::size_t j = 0; j < dst.size(); ++j) {
        std::size_t jj = j, off = 0, stride = 1;
        for (int d = N - 1; d >= 0; --d) {
            off += (jj % M) * stride;
            jj /= M;
            stride *= Mp;
        }
        dst[j] = src[off] * scale;
    }
}

// Moments over [j h, (j+1) h] of tau^{s-1} e^{-a tau} against 1 and (tau - j h)/h.
void interval_moments(double a, double s, double h, int j, double& I0, double& I1) {
    if (j == 0) {
        if (a * h < 1e-300 || a == 0.0) {
            I0 = std::pow(h, s) / s;
            I1 = std::pow(h, s) / (s + 1.0);
            return;
        }
        I0 = std::pow(a, -s) * boost::math::tgamma_lower(s, a * h);
        I1 = std::pow(a, -s - 1.0) * boost::math::tgamma_lower(s + 1.0, a * h) / h;
        return;
    }
    const double lo = j * h;
    if (a * lo > 700.0) {
        I0 = I1 = 0.0;
        return;
    }
    const int panels = std::max(1, static_cast<int>(std::ceil(a * h / 2.0)));
    const double ph = h / panels;
    I0 = I1 = 0.0;
    for (int q = 0; q < panels; ++q) {
        const double a0 = lo + q * ph;
        I0 += detail::gl_integrate([&](double t) { return std::pow(t, s - 1.0) * std::exp(-a * t); },
                                   a0, a0 + ph, 16);
        I1 += detail::gl_integrate(
            [&](double t) { return std::pow(t, s - 1.0) * std::exp(-a * t) * (t - lo) / h; }, a0,
            a0 + ph, 16);
    }
}

// Sorts a and merges values equal to 1e-12 relative; returns group ids and values.
void group_values(const std::vector<double>& a, std::vector<int>& grp, std::vector<double>& gval) {
    std::vector<std::size_t> order(a.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a[i] < a[j]; });
    grp.assign(a.size(), 0);
    gval.clear();
    for (std::size_t i : order) {
        if (gval.empty() || a[i] - gval.back() > 1e-12 * std::max(1.0, gval.back())) gval.push_back(a[i]);
        grp[i] = static_cast<int>(gval.size() - 1);
    }
}

}  // namespace

namespace detail {

Field apply_multiplier(const Field& fld, const Multiplier& mult, SpatialSymbol sym, int time_pad,
                       double imag_tol, const char* who) {
    if (fld.side != Side::Physical) throw std::invalid_argument(std::string(who) + ": physical field required");
    if (time_pad < 1) throw std::invalid_argument(std::string(who) + ": time_pad must be >= 1");
    const Lattice& lat = fld.lat;
    const int N = lat.N, M = lat.M, Mp = M * lat.pad, K = lat.K, Kp = K * time_pad;
    std::size_t Sp = 1;
    for (int d = 0; d < N; ++d) Sp *= static_cast<std::size_t>(Mp);
    const std::size_t total = Sp * Kp;

    AlignedBuffer<cplx> buf(total), spec(total);
    {
        std::vector<double> tmp(Sp);
        for (int k = 0; k < K; ++k) {
            std::fill(tmp.begin(), tmp.end(), 0.0);
            scatter_slice(fld.slice(k), N, M, Mp, tmp.data());
            for (std::size_t j = 0; j < Sp; ++j) buf[k * Sp + j] = tmp[j];
        }
    }
    std::vector<int> dims{Kp};
    for (int d = 0; d < N; ++d) dims.push_back(Mp);
    dft_c2c(dims, buf.data(), spec.data(), -1);

    const auto a = full_xi2(N, Mp, lat.hx, sym);
    std::vector<int> grp;
    std::vector<double> gval;
    group_values(a, grp, gval);
    const auto th = angular_freqs(Kp, lat.ht);
    std::vector<cplx> mg(gval.size());
    for (int k = 0; k < Kp; ++k) {
        const bool nyquist = (Kp % 2 == 0) && k == Kp / 2;
        for (std::size_t q = 0; q < gval.size(); ++q) {
            mg[q] = mult(gval[q], th[k]);
            // The Nyquist bin is its own mirror; keep the Hermitian part.
            if (nyquist) mg[q] = cplx(mg[q].real(), 0.0);
        }
        for (std::size_t j = 0; j < Sp; ++j) spec[k * Sp + j] *= mg[grp[j]];
    }
    dft_c2c(dims, spec.data(), buf.data(), +1);

    Field out(lat);
    const double scale = 1.0 / static_cast<double>(total);
    double max_re = 0.0, max_im = 0.0;
    for (int k = 0; k < K; ++k) {
        auto sl = out.slice(k);
        for (std::size_t j = 0; j < sl.size(); ++j) {
            std::size_t jj = j, off = 0, stride = 1;
            for (int d = N - 1; d >= 0; --d) {
                off += (jj % M) * stride;
                jj /= M;
                stride *= Mp;
            }
            const cplx v = buf[k * Sp + off] * scale;
            sl[j] = v.real();
            max_re = std::max(max_re, std::abs(v.real()));
            max_im = std::max(max_im, std::abs(v.imag()));
        }
    }
    if (max_re > 0.0 && max_im > imag_tol * max_re) {
        std::ostringstream os;
        os << who << ": imaginary residue " << max_im / max_re << " exceeds " << imag_tol;
        throw std::runtime_error(os.str());
    }
    return out;
}

Field apply_space_multiplier(const Field& fld, const std::function<double(double)>& m, SpatialSymbol sym) {
    const Lattice& lat = fld.lat;
    const int N = lat.N, M = lat.M, Mp = M * lat.pad;
    std::vector<int> dims(N, Mp);
    std::size_t Sp = 1;
    for (int d = 0; d < N; ++d) Sp *= static_cast<std::size_t>(Mp);
    const auto a = half_xi2(N, Mp, lat.hx, sym);
    std::vector<double> mv(a.size());
    for (std::size_t p = 0; p < a.size(); ++p) mv[p] = m(a[p]);
    AlignedBuffer<double> rbuf(Sp);
    AlignedBuffer<cplx> cbuf(a.size());
    Field out(lat);
    for (int k = 0; k < lat.K; ++k) {
        rbuf.zero();
        scatter_slice(fld.slice(k), N, M, Mp, rbuf.data());
        dft_r2c(dims, rbuf.data(), cbuf.data());
        for (std::size_t p = 0; p < a.size(); ++p) cbuf[p] *= mv[p];
        dft_c2r(dims, cbuf.data(), rbuf.data());
        gather_slice(rbuf.data(), N, M, Mp, 1.0 / static_cast<double>(Sp), out.slice(k));
    }
    return out;
}

}  // namespace detail

Field apply_Hs_spectral(const Field& fld, double s, const SpectralOptions& opt) {
    return detail::apply_multiplier(
        fld, [s](double xi2, double th) { return symbol_Hs(xi2, th, s); }, opt.symbol, opt.time_pad,
        opt.imag_tol, "apply_Hs_spectral");
}

Field apply_frac_laplacian(const Field& fld, double s, SpatialSymbol sym) {
    return detail::apply_space_multiplier(fld, [s](double xi2) { return std::pow(xi2, s); }, sym);
}

double quintic_blend(double u) {
    if (u <= 0.0) return 1.0;
    if (u >= 1.0) return 0.0;
    return 1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
}

Field apply_Js(const Field& g, double s, const JsOptions& opt) {
    if (g.side != Side::Physical) throw std::invalid_argument("apply_Js: physical field required");
    if (!(s > 0.0)) throw std::invalid_argument("apply_Js: s must be positive");
    const double defect = causality_defect(g);
    if (defect > opt.causal_tol) {
        std::ostringstream os;
        os << "apply_Js: non-causal input (relative mass " << defect << " on t <= 0)";
        throw std::invalid_argument(os.str());
    }
    const Lattice& lat = g.lat;
    const int N = lat.N, M = lat.M, Mp = M * lat.pad, K = lat.K;
    const double h = lat.ht;
    Field out(lat);

    int first = K;
    for (int k = 0; k < K; ++k) {
        if (!lat.nonpositive_time(k)) {
            first = k;
            break;
        }
    }
    if (first == K) return out;

    std::vector<int> dims(N, Mp);
    std::size_t Sp = 1;
    for (int d = 0; d < N; ++d) Sp *= static_cast<std::size_t>(Mp);
    const auto a = half_xi2(N, Mp, lat.hx, opt.symbol);
    const std::size_t H = a.size();

    // Group equal |xi|^2 values so weights are computed once per group.
    std::vector<int> grp;
    std::vector<double> gval;
    group_values(a, grp, gval);
    const std::size_t G = gval.size();
    const int lags = K - first;
    std::vector<double> W(static_cast<std::size_t>(lags) * G);
    const double inv_gamma = 1.0 / gamma_fn(s);
    for (std::size_t q = 0; q < G; ++q) {
        double prev_I1 = 0.0;
        for (int m = 0; m < lags; ++m) {
            double I0, I1;
            interval_moments(gval[q], s, h, m, I0, I1);
            W[m * G + q] = ((I0 - I1) + prev_I1) * inv_gamma;
            prev_I1 = I1;
        }
    }
    std::vector<double> Wd(static_cast<std::size_t>(lags) * H);
    for (int m = 0; m < lags; ++m) {
        for (std::size_t p = 0; p < H; ++p) Wd[m * H + p] = W[m * G + grp[p]];
    }

    std::vector<cplx> gh(static_cast<std::size_t>(lags) * H);
    AlignedBuffer<double> rbuf(Sp);
    AlignedBuffer<cplx> cbuf(H);
    for (int k = first; k < K; ++k) {
        rbuf.zero();
        scatter_slice(g.slice(k), N, M, Mp, rbuf.data());
        detail::dft_r2c(dims, rbuf.data(), cbuf.data());
        std::copy(cbuf.data(), cbuf.data() + H, gh.begin() + (k - first) * H);
    }
    const double scale = 1.0 / static_cast<double>(Sp);
    for (int k = first; k < K; ++k) {
        cbuf.zero();
        cplx* acc = cbuf.data();
        for (int j = first; j <= k; ++j) {
            const double* w = Wd.data() + static_cast<std::size_t>(k - j) * H;
            const cplx* src = gh.data() + static_cast<std::size_t>(j - first) * H;
            for (std::size_t p = 0; p < H; ++p) acc[p] += w[p] * src[p];
        }
        detail::dft_c2r(dims, cbuf.data(), rbuf.data());
        gather_slice(rbuf.data(), N, M, Mp, scale, out.slice(k));
    }
    return out;
}

double inversion_error(const InversionProbe& pr) {
    const Lattice lat = make_lattice(pr.N, pr.L, pr.M, 0.0, pr.T, pr.K);
    const double t0 = 0.5 * pr.T;
    const double sig = pr.sigma;
    const Field phi = sample(
        [&](std::span<const double> x, double t) {
            double r2 = 0.0;
            for (double v : x) r2 += v * v;
            return std::exp(-r2 - (t - t0) * (t - t0) / (sig * sig));
        },
        lat);
    SpectralOptions so;
    so.symbol = pr.symbol;
    const Field h = make_causal(apply_Hs_spectral(phi, pr.s, so));
    JsOptions jo;
    jo.symbol = pr.symbol;
    const Field back = apply_Js(h, pr.s, jo);
    double err = 0.0;
    for (std::size_t i = 0; i < back.values.size(); ++i) {
        err = std::max(err, std::abs(back.values[i] - phi.values[i]));
    }
    return err / phi.max_abs();
}

double semigroup_error(double a, double b, const Lattice& lat) {
    const double tc = lat.t(0) + 0.35 * (lat.T + lat.T_neg);
    const Field g = make_causal(sample(
        [&](std::span<const double> x, double t) {
            double r2 = 0.0;
            for (double v : x) r2 += v * v;
            return std::exp(-r2 - 4.0 * (t - tc) * (t - tc));
        },
        lat));
    const Field lhs = apply_Js(apply_Js(g, b), a);
    const Field rhs = apply_Js(g, a + b);
    double err = 0.0;
    for (std::size_t i = 0; i < lhs.values.size(); ++i) {
        err = std::max(err, std::abs(lhs.values[i] - rhs.values[i]));
    }
    return err / rhs.max_abs();
}

namespace {

// Index reversal in every axis: x -> -x on the staggered grid, t -> const - t.
Field reflect(const Field& f) {
    Field out(f.lat);
    const Lattice& lat = f.lat;
    const std::size_t S = lat.slice_size();
    for (int k = 0; k < lat.K; ++k) {
        for (std::size_t j = 0; j < S; ++j) {
            out.values[(lat.K - 1 - k) * S + (S - 1 - j)] = f.values[k * S + j];
        }
    }
    return out;
}

double dot(const Field& a, const Field& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) acc += a.values[i] * b.values[i];
    return acc * a.lat.cell_volume() * a.lat.ht;
}

}  // namespace

double adjoint_defect(const Field& phi, const Field& psi, double s) {
    const Field hphi = apply_Hs_spectral(phi, s);
    const double lhs = dot(hphi, psi);
    const Field rphi = reflect(phi);
    const Field hrpsi = apply_Hs_spectral(reflect(psi), s);
    const double rhs = dot(rphi, hrpsi);
    const double scale = std::sqrt(dot(hphi, hphi) * dot(psi, psi));
    return scale > 0.0 ? std::abs(lhs - rhs) / scale : 0.0;
}

}  // namespace fhlab
