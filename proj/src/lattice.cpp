#include "fhlab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "fft.hpp"

namespace fhlab {

using detail::AlignedBuffer;
using detail::cplx;

namespace {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::vector<int> full_dims(const Lattice& lat) {
    std::vector<int> dims{lat.K};
    for (int d = 0; d < lat.N; ++d) dims.push_back(lat.M);
    return dims;
}

}  // namespace

std::size_t Lattice::slice_size() const {
    std::size_t n = 1;
    for (int d = 0; d < N; ++d) n *= static_cast<std::size_t>(M);
    return n;
}

void Lattice::coords(std::size_t j, double* xs) const {
    for (int d = N - 1; d >= 0; --d) {
        xs[d] = x(static_cast<int>(j % M));
        j /= M;
    }
}

double Lattice::radius(std::size_t j) const {
    double r2 = 0.0;
    for (int d = 0; d < N; ++d) {
        const double xd = x(static_cast<int>(j % M));
        r2 += xd * xd;
        j /= M;
    }
    return std::sqrt(r2);
}

double Lattice::cell_volume() const { return std::pow(hx, N); }

Lattice make_lattice(int N, double L, int M, double T_neg, double T, int K, int pad) {
    if (N < 1 || N > 4) throw std::invalid_argument("lattice: N must lie in 1..4");
    if (M < 8 || !is_pow2(M)) {
        std::ostringstream os;
        os << "lattice: M=" << M << " must be a power of two >= 8";
        throw std::invalid_argument(os.str());
    }
    if (K < 8) throw std::invalid_argument("lattice: K must be >= 8");
    if (!(L > 0.0) || !(T + T_neg > 0.0) || T_neg < 0.0) {
        throw std::invalid_argument("lattice: extents must be positive");
    }
    if (pad < 2) throw std::invalid_argument("lattice: padding factor must be >= 2");
    Lattice lat;
    lat.N = N;
    lat.L = L;
    lat.M = M;
    lat.T_neg = T_neg;
    lat.T = T;
    lat.K = K;
    lat.hx = 2.0 * L / M;
    lat.ht = (T + T_neg) / K;
    lat.pad = pad;
    return lat;
}

Field::Field(const Lattice& l) : lat(l), side(Side::Physical), values(l.size(), 0.0) {}

std::span<double> Field::slice(int k) {
    return {values.data() + k * lat.slice_size(), lat.slice_size()};
}

std::span<const double> Field::slice(int k) const {
    return {values.data() + k * lat.slice_size(), lat.slice_size()};
}

double Field::max_abs() const {
    double m = 0.0;
    if (side == Side::Physical) {
        for (double v : values) m = std::max(m, std::abs(v));
    } else {
        for (const auto& v : spectrum) m = std::max(m, std::abs(v));
    }
    return m;
}

Field sample(const SpaceTimeFn& f, const Lattice& lat) {
    Field out(lat);
    const std::size_t S = lat.slice_size();
    std::vector<double> xs(lat.N);
    for (int k = 0; k < lat.K; ++k) {
        const double t = lat.t(k);
        for (std::size_t j = 0; j < S; ++j) {
            lat.coords(j, xs.data());
            const double v = f(xs, t);
            if (!std::isfinite(v)) {
                std::ostringstream os;
                os << "sample: non-finite value at slice " << k << ", node " << j;
                throw std::runtime_error(os.str());
            }
            out.values[k * S + j] = v;
        }
    }
    return out;
}

Field transform(const Field& fld, Direction dir) {
    const Lattice& lat = fld.lat;
    const std::size_t n = lat.size();
    const double norm = 1.0 / std::sqrt(static_cast<double>(n));
    AlignedBuffer<cplx> in(n), out(n);
    Field res;
    res.lat = lat;
    if (dir == Direction::Forward) {
        if (fld.side != Side::Physical) throw std::invalid_argument("transform: forward needs a physical field");
        for (std::size_t i = 0; i < n; ++i) in[i] = fld.values[i];
        detail::dft_c2c(full_dims(lat), in.data(), out.data(), -1);
        res.side = Side::Spectral;
        res.spectrum.resize(n);
        for (std::size_t i = 0; i < n; ++i) res.spectrum[i] = out[i] * norm;
    } else {
        if (fld.side != Side::Spectral) throw std::invalid_argument("transform: inverse needs a spectral field");
        for (std::size_t i = 0; i < n; ++i) in[i] = fld.spectrum[i];
        detail::dft_c2c(full_dims(lat), in.data(), out.data(), +1);
        res.side = Side::Physical;
        res.values.resize(n);
        for (std::size_t i = 0; i < n; ++i) res.values[i] = out[i].real() * norm;
    }
    return res;
}

Field make_causal(const Field& fld) {
    Field out = fld;
    for (int k = 0; k < fld.lat.K; ++k) {
        if (fld.lat.nonpositive_time(k)) {
            auto sl = out.slice(k);
            std::fill(sl.begin(), sl.end(), 0.0);
        }
    }
    return out;
}

double causality_defect(const Field& fld) {
    const double m = fld.max_abs();
    if (m == 0.0) return 0.0;
    double d = 0.0;
    for (int k = 0; k < fld.lat.K; ++k) {
        if (!fld.lat.nonpositive_time(k)) continue;
        for (double v : fld.slice(k)) d = std::max(d, std::abs(v));
    }
    return d / m;
}

double weighted_integral(const Field& fld, double a, double p, int k) {
    if (fld.side != Side::Physical) throw std::invalid_argument("weighted_integral: physical field required");
    if (k < 0 || k >= fld.lat.K) throw std::out_of_range("weighted_integral: slice index");
    const bool integer_p = p == std::floor(p);
    const auto sl = fld.slice(k);
    double sum = 0.0;
    for (std::size_t j = 0; j < sl.size(); ++j) {
        const double v = sl[j];
        if (v == 0.0) continue;
        if (v < 0.0 && !integer_p) {
            std::ostringstream os;
            os << "weighted_integral: negative value " << v << " with fractional p at node " << j;
            throw std::domain_error(os.str());
        }
        sum += std::pow(fld.lat.radius(j), a) * std::pow(v, p);
    }
    return sum * fld.lat.cell_volume();
}

GraphNorm graph_norm(const Field& fld, double s) {
    if (fld.side != Side::Physical) throw std::invalid_argument("graph_norm: physical field required");
    const Lattice& lat = fld.lat;
    GraphNorm g;
    double sq = 0.0;
    for (double v : fld.values) sq += v * v;
    const double dv = lat.cell_volume() * lat.ht;
    g.l2 = std::sqrt(sq * dv);

    const Field spec = transform(fld, Direction::Forward);
    const auto xi2 = axis_symbol(lat.M, lat.hx, SpatialSymbol::Continuous);
    const auto th = angular_freqs(lat.K, lat.ht);
    const std::size_t S = lat.slice_size();
    double acc = 0.0;
    for (int k = 0; k < lat.K; ++k) {
        for (std::size_t j = 0; j < S; ++j) {
            double a = 0.0;
            std::size_t jj = j;
            for (int d = 0; d < lat.N; ++d) {
                a += xi2[jj % lat.M];
                jj /= lat.M;
            }
            const double mag = std::pow(std::hypot(th[k], a), s);
            acc += mag * std::norm(spec.spectrum[k * S + j]);
        }
    }
    g.multiplier_seminorm = std::pow(2.0 * std::numbers::pi, lat.N + 1) * dv * acc;
    return g;
}

void write_csv(const Field& fld, std::ostream& os) {
    if (fld.side != Side::Physical) throw std::invalid_argument("write_csv: physical field required");
    const Lattice& lat = fld.lat;
    for (int d = 0; d < lat.N; ++d) os << 'i' << d << ',';
    os << 'k';
    for (int d = 0; d < lat.N; ++d) os << ",x" << d;
    os << ",t,value\n";
    const std::size_t S = lat.slice_size();
    std::vector<int> idx(lat.N);
    os.precision(17);
    for (int k = 0; k < lat.K; ++k) {
        for (std::size_t j = 0; j < S; ++j) {
            std::size_t jj = j;
            for (int d = lat.N - 1; d >= 0; --d) {
                idx[d] = static_cast<int>(jj % lat.M);
                jj /= lat.M;
            }
            for (int d = 0; d < lat.N; ++d) os << idx[d] << ',';
            os << k;
            for (int d = 0; d < lat.N; ++d) os << ',' << lat.x(idx[d]);
            os << ',' << lat.t(k) << ',' << fld.values[k * S + j] << '\n';
        }
    }
}

std::vector<double> angular_freqs(int n, double h) {
    std::vector<double> f(n);
    const double base = 2.0 * std::numbers::pi / (n * h);
    for (int i = 0; i < n; ++i) {
        const int m = i <= (n - 1) / 2 ? i : i - n;
        f[i] = base * m;
    }
    // Nyquist bin for even n carries the negative frequency
    return f;
}

std::vector<double> axis_symbol(int n, double h, SpatialSymbol sym) {
    const auto f = angular_freqs(n, h);
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        if (sym == SpatialSymbol::Continuous) {
            out[i] = f[i] * f[i];
        } else {
            const double sn = std::sin(0.5 * f[i] * h);
            out[i] = 4.0 / (h * h) * sn * sn;
        }
    }
    return out;
}

}  // namespace fhlab
