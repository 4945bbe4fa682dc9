#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "fhlab/lattice.hpp"

namespace fhlab {

// Causal kernel of J_s: e^{-|z|^2/4tau} / (Gamma(s) (4 pi)^{N/2} tau^{N/2+1-s}), zero for tau <= 0.
double heat_kernel_Y(std::span<const double> z, double tau, int N, double s);

// Principal branch of (i theta + xi2)^s.
std::complex<double> symbol_Hs(double xi2, double theta, double s);

struct SpectralOptions {
    SpatialSymbol symbol = SpatialSymbol::Continuous;
    int time_pad = 2;
    double imag_tol = 1e-10;
};

Field apply_Hs_spectral(const Field& fld, double s, const SpectralOptions& opt = {});

// Slice-wise |xi|^{2s}; agrees with apply_Hs_spectral on time-constant input.
Field apply_frac_laplacian(const Field& fld, double s, SpatialSymbol sym = SpatialSymbol::Continuous);

struct JsOptions {
    SpatialSymbol symbol = SpatialSymbol::Lattice;
    double causal_tol = 1e-12;
};

// Causal Volterra convolution with the J_s kernel. Time integration uses
// product weights against the piecewise-linear interpolant of g; the first
// step [0, ht] is integrated in closed form through incomplete gamma values.
Field apply_Js(const Field& g, double s, const JsOptions& opt = {});

// ---- property probes shared by tests, verifier and acceptance ----

struct InversionProbe {
    int N = 2;
    double s = 0.5;
    double L = 8.0;
    int M = 64;
    double T = 6.0;
    int K = 64;
    double sigma = 0.7;  // time width of the Gaussian
    SpatialSymbol symbol = SpatialSymbol::Continuous;
};

// ||J_s(H^s phi) - phi||_inf / ||phi||_inf for a space-time Gaussian.
double inversion_error(const InversionProbe& pr);

// ||J_a(J_b g) - J_{a+b} g||_inf / ||J_{a+b} g||_inf for a causal Gaussian bump.
double semigroup_error(double a, double b, const Lattice& lat);

// Relative defect of <H^s phi, psi> = <phi(-.), H^s(psi(-.))>.
double adjoint_defect(const Field& phi, const Field& psi, double s);

// ---- kernel symbol ----

struct SymbolCheckConfig {
    int N = 2;
    double s = 0.5;
    double T = 400.0;     // tau truncation, tapered over [T/2, T]
    double L = 160.0;     // spatial truncation per axis
    double hz = 0.125;    // base spatial step, refined to sqrt(tau)/2 for small tau
    double box = 4.0;     // |xi|, |theta| <= box
};

struct SymbolCheckResult {
    double max_rel_error = 0.0;
    int samples = 0;
};

SymbolCheckResult symbol_of_kernel_check(const SymbolCheckConfig& cfg);

// (4 pi)^{N/2} Gamma(s) (xi2 + i theta)^{-s}.
std::complex<double> kernel_symbol_closed_form(int N, double s, double xi2, double theta);

// ---- ground-state operator ----

struct LsOptions {
    int gh_points = 10;          // Gauss-Hermite nodes per axis, near field
    int near_tau_nodes = 16;     // Gauss-Legendre nodes in u = tau^{1-s}
    double near_ratio = 1.0 / 36.0;  // near field is tau < near_ratio * |x|^2
    int panels_per_decade = 4;   // log-tau panels, far field
    int tau_nodes = 6;
    int panel_nodes = 6;         // Gauss-Legendre nodes per radial/angular panel
    int azimuth_nodes = 12;      // N = 3 only
    double feature = 0.5;        // length scale on which psi varies
    double support_radius = 6.0; // psi treated as zero outside this ball
    double support_t0 = -1e300;  // psi treated as zero for times below this
};

// L^s built for one (N, s, mu); the far-field mass of |y|^{-mu} against the
// heat kernel is handled in closed form, so every quadrature weight enters as
// w_i (psi(x,t) - psi(y_i, t - tau_i)) with w_i >= 0.
class GroundStateOperator {
public:
    GroundStateOperator(int N, double s, double lambda, LsOptions opt = {});
    double apply(const SpaceTimeFn& psi, std::span<const double> x, double t) const;
    double mu() const { return mu_; }
    double lambda() const { return lambda_; }
    int N() const { return N_; }
    double s() const { return s_; }

private:
    double near_field(const SpaceTimeFn& psi, std::span<const double> x, double t, double psi_x,
                      double tau_s) const;
    double far_field(const SpaceTimeFn& psi, std::span<const double> x, double t, double psi_x,
                     double tau_lo, double tau_hi) const;
    double mass_tail(double r, double tau_lo) const;
    int N_;
    double s_;
    double lambda_;
    double mu_;
    double c_;
    LsOptions opt_;
    std::vector<double> gh_x_, gh_w_;
};

struct GroundStateReport {
    double residual = 0.0;  // max |LHS - RHS| / max |LHS| on the annulus
    int nodes = 0;
};

struct GroundStateProbe {
    int N = 2;
    double s = 0.5;
    double lambda_fraction = 0.5;
    double L = 8.0;
    int M = 128;
    double T_neg = 0.0;
    double T = 8.0;
    int K = 32;
    double sigma = 0.8;    // time width of phi
    double t_center = 4.0;
    int pad = 2;           // spatial zero padding of the spectral side
    int time_pad = 4;      // time periodization dominates the residual at 2
    int slices = 1;        // slices around t_center that are compared
    int node_stride = 1;
    LsOptions ls;
};

GroundStateReport ground_state_residual(const GroundStateProbe& pr);

// ---- radial identity ----

struct RadialFlap {
    double mu = 0.0;
    double lambda = 0.0;
    int N = 0;
    double s = 0.0;
    double operator()(double r) const;  // lambda r^{-2s-mu}
};

RadialFlap radial_power_flap(double mu, int N, double s);

struct RadialFlapProbe {
    int N = 2;
    double s = 0.5;
    double lambda_fraction = 0.5;
    double L = 16.0;
    int M = 256;
};

// Spectral fractional Laplacian of the cut-off |x|^{-mu} against the closed form on 0.5 <= |x| <= 2.
double radial_flap_residual(const RadialFlapProbe& pr);

// Quintic blend: 1 for u <= 0, 0 for u >= 1.
double quintic_blend(double u);

// ---- parabolic extension ----

std::vector<Field> extend_parabolic(const Field& w, double s, const std::vector<double>& ys,
                                    int time_pad = 2);

struct ExtensionReport {
    double trace_error = 0.0;
    double neumann_error = 0.0;
};

struct ExtensionProbe {
    int N = 2;
    double s = 0.5;
    double L = 8.0;
    int M = 64;
    double T = 8.0;
    int K = 64;
    double sigma = 0.8;
    std::vector<double> ys{1e-2, 2e-2};
};

ExtensionReport extension_check(const ExtensionProbe& pr);

// ---- Phi_lambda ----

class PhiProfile {
public:
    PhiProfile(double lambda, int N, double s);
    // Value at (x, y); y = 0 returns |x|^{-mu} exactly.
    double operator()(std::span<const double> x, double y) const;
    double radial(double r, double y) const;
    // Tabulated form Phi(z) = |z|^{-mu} g(v), v = (y/|z|)^{2s}, cubic B-spline in v.
    double fast(double r, double y) const;
    double mu() const { return mu_; }
    double lambda() const { return lambda_; }
    int N() const { return N_; }
    double s() const { return s_; }

private:
    double poisson(double r, double y) const;
    void build_table();
    double lambda_, s_, mu_, cP_;
    int N_;
    struct Table;
    std::shared_ptr<const Table> table_;
};

}  // namespace fhlab
