#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fhlab/monotone_solver.hpp"

using namespace fhlab;

namespace {

ProblemSpec midpoint_spec(int N) {
    const double lam = 0.5 * lambda_max(N, 0.5);
    const ExponentBundle e = exponents_at(N, 0.5, lam);
    return make_problem(N, 0.5, lam, 0.5 * (e.fujita_F + e.p_plus));
}

}  // namespace

TEST(Cutoff, PlateauAndSupport) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int n : {0, 1, 2, 5}) {
        for (int i = 0; i < 200; ++i) {
            const double r = (n + 2.0) * U(rng), t = (n + 3.0) * U(rng);
            const double e = cutoff_eta(n, r, t);
            EXPECT_GE(e, 0.0);
            EXPECT_LE(e, 1.0);
            if (r <= n && t >= 1.0 / (n + 1) && t <= n + 1) EXPECT_EQ(e, 1.0);
            if (r >= n + 1 || t <= 1.0 / (n + 2) || t >= n + 2) EXPECT_EQ(e, 0.0);
            // nested: eta_n <= eta_{n+1}
            EXPECT_LE(e, cutoff_eta(n + 1, r, t) + 1e-15);
        }
    }
    EXPECT_THROW(cutoff_eta(-1, 0.0, 1.0), std::invalid_argument);
}

TEST(Rhs, LevelZeroAndPointFormula) {
    const ProblemSpec spec = midpoint_spec(2);
    const Lattice lat = make_lattice(2, 4.0, 16, 0.0, 4.0, 16);
    Field w(lat), f(lat);
    for (double& v : w.values) v = 0.7;
    for (double& v : f.values) v = 0.4;
    const Field r0 = rhs_truncated(w, f, spec, 0);
    const Field r3 = rhs_truncated(w, f, spec, 3);
    for (int k = 0; k < lat.K; k += 5) {
        for (std::size_t j = 0; j < lat.slice_size(); j += 37) {
            const double r = lat.radius(j), t = lat.t(k);
            EXPECT_NEAR(r0.at(k, j), cutoff_eta(0, r, t) * 0.4 / 1.4, 1e-15);
            const double wp = std::pow(0.7, spec.p);
            const double want = cutoff_eta(3, r, t) * (spec.lambda * (0.7 / (1 + 0.7 / 3)) / std::pow(r + 1.0 / 3, 1.0) +
                                                       wp / (1 + wp / 3) + 0.4 / (1 + 0.4 / 3));
            EXPECT_NEAR(r3.at(k, j), want, 1e-14);
        }
    }
}

TEST(Rhs, BoundedByLevelAndMonotoneInW) {
    const ProblemSpec spec = midpoint_spec(2);
    const Lattice lat = make_lattice(2, 4.0, 16, 0.0, 4.0, 16);
    Field w(lat), w2(lat), f(lat);
    std::mt19937_64 rng(4);
    std::exponential_distribution<double> E(0.1);
    for (std::size_t i = 0; i < w.values.size(); ++i) {
        w.values[i] = E(rng);
        w2.values[i] = w.values[i] + E(rng);
        f.values[i] = E(rng);
    }
    for (int n : {1, 2, 4}) {
        const Field a = rhs_truncated(w, f, spec, n), b = rhs_truncated(w2, f, spec, n);
        for (std::size_t i = 0; i < a.values.size(); ++i) {
            EXPECT_LE(a.values[i], b.values[i]);
            // each of the three terms is at most n times its eta-free prefactor
            EXPECT_LE(a.values[i], n * (spec.lambda * std::pow(n, 2 * spec.s) + 2.0) + 1e-12);
        }
    }
}

TEST(Rhs, RejectsNegativeData) {
    const ProblemSpec spec = midpoint_spec(2);
    const Lattice lat = make_lattice(2, 4.0, 16, 0.0, 4.0, 16);
    Field w(lat), f(lat);
    for (double& v : f.values) v = 1.0;
    f.values[600] = -0.5;
    EXPECT_THROW(rhs_truncated(w, f, spec, 1), std::invalid_argument);
    f.values[600] = -1e-16;
    EXPECT_NO_THROW(rhs_truncated(w, f, spec, 1));
}

TEST(Monotone, FiveIteratesIncreaseAndStayCausal) {
    const ProblemSpec spec = midpoint_spec(2);
    const Lattice lat = make_lattice(2, 6.0, 32, 0.0, 6.0, 32);
    const Field f = bump_forcing(lat, 1.0);
    SolverOptions opt;
    opt.mono_slack = 1e-12;
    IterationState st = initial_state(f, spec);
    EXPECT_EQ(causality_defect(st.w), 0.0);
    for (int k = 1; k <= 5; ++k) {
        const IterationState nx = iterate(st, f, spec, opt);
        EXPECT_TRUE(nx.monotone) << k;
        EXPECT_LE(nx.max_decrease, 1e-12);
        EXPECT_EQ(causality_defect(nx.w), 0.0);
        for (std::size_t i = 0; i < nx.w.values.size(); ++i) ASSERT_GE(nx.w.values[i], 0.0);
        EXPECT_EQ(nx.n, k == 1 ? 1 : 2 * st.n);
        st = nx;
    }
}

TEST(Forcing, BumpShape) {
    const Lattice lat = make_lattice(2, 4.0, 16, 0.5, 2.0, 40);
    const Field f = bump_forcing(lat, 3.0);
    for (int k = 0; k < lat.K; ++k) {
        const double t = lat.t(k);
        for (std::size_t j = 0; j < lat.slice_size(); j += 11) {
            const double r = lat.radius(j);
            const double want = (t > 0 && t < 1) ? 3.0 * std::exp(-r * r) * std::pow(std::sin(std::numbers::pi * t), 2) : 0.0;
            EXPECT_NEAR(f.at(k, j), want, 1e-14);
        }
    }
}

TEST(Functional, ConstantField) {
    const Lattice lat = make_lattice(2, 2.0, 8, 0.0, 1.0, 8);
    Field w(lat);
    for (double& v : w.values) v = 2.0;
    const auto M = blowup_functional(w, 0.25, 3.0);
    ASSERT_EQ(M.size(), 8u);
    double want = 0.0;
    for (std::size_t j = 0; j < lat.slice_size(); ++j) want += std::pow(lat.radius(j), -0.25) * 8.0;
    want *= lat.cell_volume();
    for (double m : M) EXPECT_NEAR(m, want, 1e-12 * want);
}

TEST(Functional, SingularityProfileRecoversPowerLaw) {
    const Lattice lat = make_lattice(2, 2.0, 64, 0.0, 2.0, 16);
    const Field w = sample([](std::span<const double> x, double t) { return (1 + t) * std::pow(std::hypot(x[0], x[1]), -0.3); }, lat);
    const SingularityFit fit = singularity_profile(w, 0.5, 1.5);
    EXPECT_NEAR(fit.slope, -0.3, 1e-10);
    EXPECT_LT(fit.band, 1e-10);
    EXPECT_GT(fit.slices, 0);
}

TEST(Solver, BlowUpBandEscapes) {
    const double lam = 0.5 * lambda_max(2, 0.5);
    const ExponentBundle e = exponents_at(2, 0.5, lam);
    const ProblemSpec spec = make_problem(2, 0.5, lam, 0.5 * (1.0 + e.fujita_F));
    const Lattice lat = make_lattice(2, 6.0, 32, 0.0, 6.0, 32);
    const TrajectoryReport rep = run(spec, bump_forcing(lat, 1.0));
    EXPECT_EQ(rep.verdict, Verdict::NormEscape);
    EXPECT_GT(rep.escape_time, 0.0);
    EXPECT_LE(rep.max_decrease, 1e-12);
    EXPECT_EQ(to_json(rep)["verdict"], "NormEscape");
}
