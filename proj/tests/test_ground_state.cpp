#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fhlab/kernel_ops.hpp"
#include "fhlab/spectral_constants.hpp"

using namespace fhlab;

namespace {

double time_profile(double t) { return std::exp(-(t - 4.0) * (t - 4.0) / 0.64); }

LsOptions gaussian_options() {
    LsOptions o;
    o.support_t0 = 4.0 - 7.0 * 0.8;
    return o;
}

}  // namespace

TEST(GroundState, MuMatchesExponentBundle) {
    const double lam = 0.5 * lambda_max(2, 0.5);
    const GroundStateOperator Ls(2, 0.5, lam, gaussian_options());
    EXPECT_NEAR(Ls.mu(), exponents_at(2, 0.5, lam).mu, 1e-12);
    EXPECT_NEAR(Ls.mu(), 0.13867612288828574, 1e-10);
}

TEST(GroundState, FrozenValuesOnWeightedGaussian) {
    const double lam = 0.5 * lambda_max(2, 0.5);
    const GroundStateOperator Ls(2, 0.5, lam, gaussian_options());
    const double mu = Ls.mu();
    const SpaceTimeFn psi = [mu](std::span<const double> x, double t) {
        const double r2 = x[0] * x[0] + x[1] * x[1];
        return std::pow(r2, 0.5 * mu) * std::exp(-r2) * time_profile(t);
    };
    // oracle: adaptive quadrature of the defining singular integral
    const double rs[] = {0.5, 1.0, 2.0};
    const double want[] = {1.13351612062, 0.322480098853, -0.0728850976232};
    for (int i = 0; i < 3; ++i) {
        const double x[2] = {rs[i], 0.0};
        EXPECT_NEAR(Ls.apply(psi, x, 4.0), want[i], 1e-3 * std::abs(want[i])) << rs[i];
    }
}

TEST(GroundState, LambdaZeroIsTheHeatOperator) {
    const GroundStateOperator Ls(2, 0.5, 0.0, gaussian_options());
    EXPECT_EQ(Ls.mu(), 0.0);
    const SpaceTimeFn phi = [](std::span<const double> x, double t) {
        return std::exp(-(x[0] * x[0] + x[1] * x[1])) * time_profile(t);
    };
    const struct {
        double r, t, v;
    } rows[] = {{0.5, 4.0, 1.3114512981927}, {1.0, 4.0, 0.3645054121042}, {1.0, 3.5, 0.37520509748212}};
    for (const auto& q : rows) {
        const double x[2] = {q.r, 0.0};
        EXPECT_NEAR(Ls.apply(phi, x, q.t), q.v, 1e-3 * q.v);
    }
}

// Every weight multiplies a difference psi(x,t) - psi(y,t-tau) with a nonnegative
// coefficient, so L^s F(psi) <= F'(psi) L^s psi for convex F up to rounding.
TEST(GroundState, KatoHoldsForConvexPowers) {
    const double lam = 0.5 * lambda_max(2, 0.5);
    const GroundStateOperator Ls(2, 0.5, lam, gaussian_options());
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int trial = 0; trial < 4; ++trial) {
        const double c0 = 0.5 * U(rng), c1 = 0.5 * U(rng);
        const SpaceTimeFn phi = [=](std::span<const double> x, double t) {
            return std::exp(-(x[0] - c0) * (x[0] - c0) - (x[1] - c1) * (x[1] - c1)) * time_profile(t);
        };
        for (double m : {1.5, 2.0, 3.0}) {
            const SpaceTimeFn phim = [&](std::span<const double> x, double t) { return std::pow(phi(x, t), m); };
            const double x[2] = {c0 + 0.7 * U(rng), c1 + 0.7 * U(rng)};
            const double t = 4.0 + 0.2 * U(rng);
            const double lhs = Ls.apply(phim, x, t);
            const double rhs = m * std::pow(phi(x, t), m - 1.0) * Ls.apply(phi, x, t);
            EXPECT_LE(lhs, rhs + 1e-10) << m;
        }
    }
}

TEST(GroundState, Validation) {
    EXPECT_THROW(GroundStateOperator(4, 0.5, 0.1), std::invalid_argument);
    EXPECT_THROW(GroundStateOperator(2, 0.5, 2.0 * lambda_max(2, 0.5)), std::invalid_argument);
    const GroundStateOperator open(2, 0.5, 0.1);  // no support start
    const SpaceTimeFn one = [](std::span<const double>, double) { return 1.0; };
    const double x[2] = {1.0, 0.0};
    EXPECT_THROW(open.apply(one, x, 0.0), std::invalid_argument);
    const GroundStateOperator Ls(2, 0.5, 0.1, gaussian_options());
    const double o[2] = {0.0, 0.0};
    EXPECT_THROW(Ls.apply(one, o, 4.0), std::domain_error);
    const double x3[3] = {1.0, 0.0, 0.0};
    EXPECT_THROW(Ls.apply(one, x3, 4.0), std::invalid_argument);
}

TEST(GroundState, SpectralIdentityOnSubsampledAnnulus) {
    GroundStateProbe pr;
    pr.node_stride = 41;
    const GroundStateReport rep = ground_state_residual(pr);
    EXPECT_GT(rep.nodes, 10);
    EXPECT_LE(rep.residual, 0.05);
}

TEST(RadialFlap, ClosedFormValues) {
    const double lam = 0.5 * lambda_max(3, 0.5);
    const double mu = exponents_at(3, 0.5, lam).mu;
    const RadialFlap f = radial_power_flap(mu, 3, 0.5);
    EXPECT_NEAR(f.lambda, lam, 1e-12);
    EXPECT_NEAR(f(1.0), lam, 1e-12);
    EXPECT_NEAR(f(2.0), lam * std::pow(2.0, -1.0 - mu), 1e-12);
    EXPECT_THROW(radial_power_flap(0.0, 3, 0.5), std::domain_error);
    EXPECT_THROW(radial_power_flap(2.0, 3, 0.5), std::domain_error);
}

TEST(RadialFlap, SpectralResidual) { EXPECT_LE(radial_flap_residual(RadialFlapProbe{}), 0.05); }

TEST(QuinticBlend, EndpointsAndMonotone) {
    EXPECT_EQ(quintic_blend(-1.0), 1.0);
    EXPECT_EQ(quintic_blend(2.0), 0.0);
    EXPECT_NEAR(quintic_blend(0.5), 0.5, 1e-15);
    double prev = 1.0;
    for (int i = 1; i <= 100; ++i) {
        const double v = quintic_blend(i / 100.0);
        EXPECT_LE(v, prev);
        prev = v;
    }
}
