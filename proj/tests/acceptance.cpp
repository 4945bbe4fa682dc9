// Acceptance run: one PASS/FAIL line per criterion with the measured values.
// Optional arguments select criteria by number, e.g. `acceptance 1 4 9`.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "fhlab/kernel_ops.hpp"
#include "fhlab/monotone_solver.hpp"
#include "fhlab/spectral_constants.hpp"
#include "fhlab/supersolution_lab.hpp"
#include "fhlab/verifier.hpp"

using namespace fhlab;

namespace {

// tolerances
constexpr double kLambdaTol = 1e-10;
constexpr double kUpsilonTol = 1e-10;  // times Lambda_{N,s}
constexpr double kExponentSeconds = 5.0;
constexpr double kSymbolTol = 1e-3;
constexpr double kSymbolSeconds = 60.0;
constexpr double kInversionTol = 1e-2;
constexpr double kSemigroupTol = 1e-2;
constexpr double kInversionSeconds = 120.0;
constexpr double kGroundStateTol = 0.05;
constexpr double kFlapTol = 0.05;
constexpr double kSuiteSeconds = 600.0;
constexpr double kTraceTol = 0.02;
constexpr double kNeumannTol = 0.05;
constexpr double kMonoSlack = 1e-12;
constexpr double kGrowth = 10.0;
constexpr double kCertificateSeconds = 30.0;
constexpr int kXiSamples = 400;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... a) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, a...);
    return buf;
}

Outcome exponents_engine() {
    const auto t0 = std::chrono::steady_clock::now();
    const double e41 = std::abs(lambda_max(4, 1.0) - 1.0);
    const double e31 = std::abs(lambda_max(3, 1.0) - 0.25);
    double worst_rt = 0.0;
    bool ordered = true;
    std::mt19937_64 rng(2024);
    for (auto [N, s] : {std::pair{2, 0.25}, {3, 0.5}, {4, 0.75}}) {
        const double Lam = lambda_max(N, s);
        std::uniform_real_distribution<double> U(1e-3, 1.0 - 1e-3);
        for (int i = 0; i < 50; ++i) {
            const double lam = U(rng) * Lam;
            const double a = upsilon_inv(lam, N, s);
            worst_rt = std::max(worst_rt, std::abs(upsilon(a, N, s) - lam) / Lam);
            const ExponentBundle b = exponents_at(N, s, lam);
            ordered = ordered && b.fujita_F0 < b.fujita_F && b.fujita_F < b.fujita_F_tilde && b.fujita_F_tilde < b.p_plus;
        }
    }
    const double secs = seconds_since(t0);
    const bool pass = e41 <= kLambdaTol && e31 <= kLambdaTol && worst_rt <= kUpsilonTol && ordered && secs < kExponentSeconds;
    return {pass, fmt("|L41-1|=%.2e |L31-0.25|=%.2e roundtrip=%.2e ordered=%d time=%.2fs", e41, e31, worst_rt,
                      int(ordered), secs)};
}

Outcome symbol_identity() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    std::string d;
    for (double s : {0.3, 0.5, 0.7}) {
        SymbolCheckConfig cfg;
        cfg.N = 2;
        cfg.s = s;
        cfg.box = 4.0;
        const SymbolCheckResult r = symbol_of_kernel_check(cfg);
        worst = std::max(worst, r.max_rel_error);
        d += fmt("s=%.1f err=%.2e (%d) ", s, r.max_rel_error, r.samples);
    }
    const double secs = seconds_since(t0);
    return {worst <= kSymbolTol && secs < kSymbolSeconds, d + fmt("time=%.1fs", secs)};
}

Outcome inversion_semigroup() {
    const auto t0 = std::chrono::steady_clock::now();
    InversionProbe pr;  // 64^2 x 64
    const double inv = inversion_error(pr);
    const double sg = semigroup_error(0.3, 0.2, make_lattice(2, 8, 64, 0, 6, 64));
    const double secs = seconds_since(t0);
    return {inv <= kInversionTol && sg <= kSemigroupTol && secs < kInversionSeconds,
            fmt("inversion=%.2e semigroup=%.2e time=%.1fs", inv, sg, secs)};
}

Outcome ground_state() {
    GroundStateProbe full;  // N=2, s=0.5, lambda=Lambda/2, M=128
    const GroundStateReport r = ground_state_residual(full);
    GroundStateProbe coarse;
    coarse.M = 64;
    coarse.K = 16;
    coarse.node_stride = 7;
    GroundStateProbe fine = coarse;
    fine.M = 128;
    fine.K = 32;
    const double rc = ground_state_residual(coarse).residual;
    const double rf = ground_state_residual(fine).residual;
    return {r.residual <= kGroundStateTol && rf < rc,
            fmt("M=128 residual=%.3e over %d nodes; refinement %.3e -> %.3e", r.residual, r.nodes, rc, rf)};
}

Outcome radial_identity() {
    const double r = radial_flap_residual(RadialFlapProbe{});
    return {r <= kFlapTol, fmt("residual=%.3e", r)};
}

Outcome verifier_suite() {
    const auto t0 = std::chrono::steady_clock::now();
    CheckConfig cfg;
    cfg.functions = 20;
    const std::vector<std::string> ids{"hardy", "kato", "algebra_ab", "algebra_abs", "radial_K",
                                       "adjoint", "muckenhoupt", "picone", "ls_bound"};
    const auto reps = run_suite(ids, cfg, 1);
    bool ok = true;
    std::string d;
    for (const auto& r : reps) {
        ok = ok && r.passed;
        d += fmt("%s%s=%.2e ", r.passed ? "" : "!", r.id.c_str(), r.worst_margin);
    }
    const double secs = seconds_since(t0);
    return {ok && secs < kSuiteSeconds, d + fmt("time=%.0fs", secs)};
}

Outcome extension() {
    ExtensionProbe pr;  // Gaussian datum, levels 1e-2 and 2e-2
    const ExtensionReport r = extension_check(pr);
    return {r.trace_error <= kTraceTol && r.neumann_error <= kNeumannTol,
            fmt("trace=%.3e neumann=%.3e", r.trace_error, r.neumann_error)};
}

ProblemSpec desk_point(bool conditional) {
    const double lam = 0.5 * lambda_max(3, 0.5);
    const ExponentBundle e = exponents_at(3, 0.5, lam);
    const double p = conditional ? 0.5 * (e.fujita_F + e.p_plus) : 0.5 * (1.0 + e.fujita_F);
    return make_problem(3, 0.5, lam, p);
}

Lattice desk_lattice() { return make_lattice(3, 6.0, 32, 0.0, 6.0, 48); }

Outcome monotone_scheme() {
    const ProblemSpec spec = desk_point(false);
    const Lattice lat = desk_lattice();
    const Field f = bump_forcing(lat, 1.0);
    SolverOptions opt;
    opt.mono_slack = kMonoSlack;
    IterationState st = initial_state(f, spec);
    double worst = 0.0, causal = causality_defect(st.w);
    bool mono = true;
    for (int k = 0; k < 5; ++k) {
        try {
            st = iterate(st, f, spec, opt);
        } catch (const std::runtime_error&) {
            mono = false;
            break;
        }
        worst = std::max(worst, st.max_decrease);
        causal = std::max(causal, causality_defect(st.w));
        mono = mono && st.monotone;
    }
    return {mono && worst <= kMonoSlack && causal == 0.0,
            fmt("max decrease=%.2e causality defect=%.1e", worst, causal)};
}

Outcome dichotomy() {
    const Lattice lat = desk_lattice();
    const ProblemSpec below = desk_point(false);
    const TrajectoryReport b = run(below, bump_forcing(lat, 1.0));
    const bool escaped = b.verdict == Verdict::NormEscape && b.growth_factor >= kGrowth;

    const ProblemSpec mid = desk_point(true);
    const SupersolutionCertificate cert = find_certificate(mid);
    const Field f = bump_forcing(lat, 0.5 * max_bump_amplitude(cert, lat));
    const Field ceiling = supersol_trace_field(cert, lat);
    SolverOptions opt;
    opt.ceiling = &ceiling;
    const TrajectoryReport c = run(mid, f, opt);
    const bool held = data_bound(cert, f) && c.ceiling_violations == 0 && c.verdict == Verdict::ConvergedBelowCap;
    return {escaped && held,
            fmt("p=%.4f %s growth=%.3g t*=%.3g | p=%.4f %s iters=%d ceiling violations=%ld", below.p,
                to_string(b.verdict).c_str(), b.growth_factor, b.escape_time, mid.p, to_string(c.verdict).c_str(),
                c.iterations, c.ceiling_violations)};
}

Outcome certificate() {
    const auto t0 = std::chrono::steady_clock::now();
    SearchBudget budget;  // default budget
    budget.grid.count = kXiSamples;
    try {
        const SupersolutionCertificate c = find_certificate(desk_point(true), budget);
        const double secs = seconds_since(t0);
        return {c.interior_margin > 0.0 && c.boundary_min_gap > 0.0 && c.grid.count == kXiSamples &&
                    secs < kCertificateSeconds,
                fmt("eps=%.4g lambda1=%.5f interior=%.3e gap=%.3e time=%.2fs", c.eps, c.lambda1, c.interior_margin,
                    c.boundary_min_gap, secs)};
    } catch (const SearchExhausted& e) {
        return {false, e.what()};
    }
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"exponent engine", exponents_engine},
        {"kernel symbol", symbol_identity},
        {"inversion and semigroup", inversion_semigroup},
        {"ground-state identity", ground_state},
        {"radial identity", radial_identity},
        {"verifier suite", verifier_suite},
        {"extension", extension},
        {"monotone scheme", monotone_scheme},
        {"dichotomy", dichotomy},
        {"supersolution certificate", certificate},
    };
    std::set<int> pick;
    for (int i = 1; i < argc; ++i) pick.insert(std::stoi(argv[i]));
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!pick.empty() && !pick.count(id)) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
