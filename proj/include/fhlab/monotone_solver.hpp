#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fhlab/lattice.hpp"
#include "fhlab/spectral_constants.hpp"

namespace fhlab {

// eta_n: 1 on B_n x (1/(n+1), n+1), 0 outside B_{n+1} x (1/(n+2), n+2),
// quintic blends in |x| over [n, n+1] and in t over the two gaps.
double cutoff_eta(int n, double r, double t);
Field cutoff_field(int n, const Lattice& lat);

// Truncated right-hand side. n = 0 gives eta_0 f/(1+f); n >= 1 gives
// eta_n (lambda w/(1+w/n)/(|x|+1/n)^{2s} + w^p/(1+w^p/n) + f/(1+f/n)).
// Negative entries of w or f below 1e-14 of their max are treated as rounding and clamped.
Field rhs_truncated(const Field& w, const Field& f, const ProblemSpec& spec, int n);

enum class Schedule { Geometric, Linear };

struct IterationState {
    int iteration = 0;  // index k of w_k
    int n = 0;          // truncation level used to produce w_k
    Field w;
    std::vector<double> M;     // blow-up functional per slice
    bool monotone = true;
    double max_decrease = 0.0;  // largest w_{k-1} - w_k, relative to max |w_k|
};

struct SolverOptions {
    int max_iter = 64;
    double tol = 1e-6;           // relative sup-difference for convergence
    double escape_factor = 10.0;
    double cap = 1e6;            // multiple of the first iterate's peak M
    double t_ref = 1.0;          // growth factor is max_{t >= t_ref} M(t) / M(t_ref)
    double mono_slack = 1e-12;
    Schedule schedule = Schedule::Geometric;
    const Field* ceiling = nullptr;  // optional pointwise upper bound to audit
};

enum class Verdict { ConvergedBelowCap, NormEscape, Stalled };
std::string to_string(Verdict v);

IterationState initial_state(const Field& f, const ProblemSpec& spec);
// One step w_{k+1} = J_s(rhs_truncated(w_k, f, n_{k+1})). Throws std::runtime_error on a
// monotonicity violation beyond the slack.
IterationState iterate(const IterationState& st, const Field& f, const ProblemSpec& spec,
                       const SolverOptions& opt = {});

struct TrajectoryReport {
    Verdict verdict = Verdict::Stalled;
    int n_final = 0;
    int iterations = 0;
    std::vector<std::pair<double, double>> M_curve;  // (t, M) of the last iterate
    double growth_factor = 0.0;
    double escape_time = -1.0;  // first t with M(t)/M(t_ref) >= escape factor, -1 if none
    double final_norm = 0.0;    // sup norm of the last iterate
    double max_decrease = 0.0;  // worst monotonicity defect over the run
    double causality_defect = 0.0;
    long ceiling_violations = 0;
    double ceiling_worst = 0.0;  // max (w - ceiling) / max ceiling
    std::vector<double> sup_diff;
    nlohmann::json params;
};

TrajectoryReport run(const ProblemSpec& spec, const Field& f, const SolverOptions& opt = {},
                     const std::function<void(const IterationState&)>& observer = {});

nlohmann::json to_json(const TrajectoryReport& rep);

// M(t_k) = sum |x|^{-mu} w^p hx^N per slice.
std::vector<double> blowup_functional(const Field& w, double mu, double p);

struct SingularityFit {
    double slope = 0.0;
    double band = 0.0;  // two standard deviations of the per-slice slopes
    int slices = 0;
};

// Least-squares slope of log w against log |x| for r_lo <= |x| <= r_hi, averaged over slices in [t_lo, t_hi].
SingularityFit singularity_profile(const Field& w, double t_lo, double t_hi, double r_lo = 0.2,
                                   double r_hi = 1.0);

// A exp(-|x|^2) sin^2(pi t) on 0 < t < 1, zero elsewhere.
Field bump_forcing(const Lattice& lat, double amplitude);

}  // namespace fhlab
