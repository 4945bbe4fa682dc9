#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fhlab/kernel_ops.hpp"
#include "fhlab/lattice.hpp"
#include "fhlab/spectral_constants.hpp"

namespace fhlab {

struct XiGrid {
    double lo = 1e-6;
    double hi = 50.0;
    int count = 400;
};

struct SupersolutionCertificate {
    ProblemSpec spec;
    double eps = 0.0;
    double lambda1 = 0.0;
    double mu1 = 0.0;
    double theta = 0.0;             // s/(p-1) - mu1/2
    double interior_margin = 0.0;   // -theta - mu1 + (N+2-2s)/2
    double boundary_min_gap = 0.0;  // min over the grid of (lambda1-lambda) xi^e - eps^{p-1} e^{-(p-1)xi^2/4}
    double data_gap = 0.0;          // same with (lambda1-lambda)/2: room left for the forcing
    double delta1 = 0.0;            // eps (lambda1 - lambda) / 2
    XiGrid grid;
    int search_k = 0;  // lambda1 = lambda + (Lambda - lambda)/4 * 2^{-k}
    int search_j = 0;  // eps = eps0 * 2^{-j}
};

class SearchExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SearchBudget {
    int max_k = 24;
    int max_j = 48;
    double eps0 = 1.0;
    XiGrid grid;
};

// U(x, y, t) = eps (1+t)^{-theta} Phi_{lambda1}(x, y) e^{-|z|^2/4(t+1)}.
double supersol_value(const SupersolutionCertificate& cert, std::span<const double> x, double y, double t);
// The y = 0 trace u_{eps,lambda1}.
double supersol_trace(const SupersolutionCertificate& cert, std::span<const double> x, double t);
// Trace on a lattice; zero for t <= 0.
Field supersol_trace_field(const SupersolutionCertificate& cert, const Lattice& lat);

double interior_sign_check(const SupersolutionCertificate& cert);

struct GapReport {
    double min_gap = 0.0;
    double argmin = 0.0;
    double exponent = 0.0;     // p mu1 - mu1 - 2s
    bool zero_limit_ok = false;  // LHS does not vanish as xi -> 0
    bool inf_limit_ok = false;   // RHS decays faster than LHS as xi -> inf
};

// slack scales the (lambda1 - lambda) term; 1 is the plain check, 1/2 leaves room for forcing.
GapReport boundary_gap_check(const SupersolutionCertificate& cert, const XiGrid& grid, double slack = 1.0);

// Fills mu1, theta and all margins from (spec, eps, lambda1).
SupersolutionCertificate make_certificate(const ProblemSpec& spec, double eps, double lambda1,
                                          const XiGrid& grid = {});

struct SearchTrace {
    std::vector<std::pair<double, double>> eps_gap;  // boundary gap along the eps path of the accepted lambda1
};

SupersolutionCertificate find_certificate(const ProblemSpec& spec, const SearchBudget& budget = {},
                                          SearchTrace* trace = nullptr);

// delta1 (1+t)^{-theta} |x|^{-mu1-2s} e^{-|x|^2/4(1+t)} for t > 0, zero for t <= 0.
Field data_envelope(const SupersolutionCertificate& cert, const Lattice& lat);
bool data_bound(const SupersolutionCertificate& cert, const Field& f);
// Largest amplitude A with A e^{-|x|^2} sin^2(pi t) 1_{0<t<1} under the envelope on the lattice.
double max_bump_amplitude(const SupersolutionCertificate& cert, const Lattice& lat);

struct SupersolReport {
    Field w;
    long comparison_violations = 0;  // nodes with w > u
    double comparison_worst = 0.0;   // max (w - u) / max u
    long very_weak_violations = 0;   // sampled nodes with w < kappa_s J_s(rhs(w))
    int very_weak_samples = 0;
};

// w = J_s(lambda |x|^{-2s} u + u^p + f). Throws std::runtime_error if w exceeds u anywhere
// when strict is set.
SupersolReport build_w_supersol(const SupersolutionCertificate& cert, const Field& f, bool strict = true,
                                int samples = 1000, unsigned seed = 7, bool full_grid = false);

nlohmann::json to_json(const SupersolutionCertificate& cert);
// Parses and re-verifies; throws std::runtime_error if stored margins disagree with recomputation.
SupersolutionCertificate certificate_from_json(const nlohmann::json& j);

}  // namespace fhlab
