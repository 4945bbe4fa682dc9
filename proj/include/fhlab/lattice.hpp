#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace fhlab {

// Uniform space-time grid on [-L,L]^N x [-T_neg, T).
// Spatial nodes are staggered by hx/2 so no node sits at x = 0.
// Time nodes are t_k = -T_neg + k*ht, k = 0..K-1.
struct Lattice {
    int N = 2;
    double L = 8.0;
    int M = 64;
    double T_neg = 0.0;
    double T = 4.0;
    int K = 64;
    double hx = 0.25;
    double ht = 0.0625;
    int pad = 2;  // zero-padding factor used by spectral operators

    std::size_t slice_size() const;
    std::size_t size() const { return slice_size() * static_cast<std::size_t>(K); }
    double x(int i) const { return -L + (i + 0.5) * hx; }
    double t(int k) const { return -T_neg + k * ht; }
    // t_k <= 0 up to rounding
    bool nonpositive_time(int k) const { return t(k) <= 1e-9 * ht; }
    void coords(std::size_t j, double* xs) const;
    double radius(std::size_t j) const;
    double cell_volume() const;
};

Lattice make_lattice(int N, double L, int M, double T_neg, double T, int K, int pad = 2);

enum class Side { Physical, Spectral };
enum class Direction { Forward, Inverse };

// Time-major storage: value(k, j) = values[k * slice_size + j].
struct Field {
    Lattice lat;
    Side side = Side::Physical;
    std::vector<double> values;
    std::vector<std::complex<double>> spectrum;

    Field() = default;
    explicit Field(const Lattice& l);

    double& at(int k, std::size_t j) { return values[k * lat.slice_size() + j]; }
    double at(int k, std::size_t j) const { return values[k * lat.slice_size() + j]; }
    std::span<double> slice(int k);
    std::span<const double> slice(int k) const;
    double max_abs() const;
};

using SpaceTimeFn = std::function<double(std::span<const double>, double)>;

Field sample(const SpaceTimeFn& f, const Lattice& lat);
Field transform(const Field& fld, Direction dir);
// Zeroes every slice with t <= 0.
Field make_causal(const Field& fld);
// Largest |value| on t <= 0 slices relative to the overall maximum.
double causality_defect(const Field& fld);

double weighted_integral(const Field& fld, double a, double p, int k);

struct GraphNorm {
    double l2 = 0.0;
    double multiplier_seminorm = 0.0;
};

GraphNorm graph_norm(const Field& fld, double s);

// Columns: i0..i{N-1}, k, x0..x{N-1}, t, value.
void write_csv(const Field& fld, std::ostream& os);

enum class SpatialSymbol { Continuous, Lattice };

// Angular frequencies 2*pi*fftfreq(n, h).
std::vector<double> angular_freqs(int n, double h);
// Per-axis contribution to |xi|^2 for the chosen symbol.
std::vector<double> axis_symbol(int n, double h, SpatialSymbol sym);

}  // namespace fhlab
