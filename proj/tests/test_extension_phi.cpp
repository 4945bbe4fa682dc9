#include <gtest/gtest.h>

#include <cmath>

#include "fhlab/kernel_ops.hpp"
#include "fhlab/spectral_constants.hpp"

using namespace fhlab;

TEST(Extension, TraceAndNeumannDatum) {
    const ExtensionReport r = extension_check(ExtensionProbe{});
    EXPECT_LE(r.trace_error, 0.02);
    EXPECT_LE(r.neumann_error, 0.05);
}

TEST(Extension, Validation) {
    const Lattice lat = make_lattice(1, 4.0, 16, 1.0, 3.0, 16);
    const Field w = sample([](std::span<const double> x, double t) { return std::exp(-x[0] * x[0] - t * t); }, lat);
    EXPECT_THROW(extend_parabolic(w, 0.5, {0.1}), std::invalid_argument);
    const Field c = make_causal(w);
    EXPECT_THROW(extend_parabolic(c, 0.5, {0.0}), std::invalid_argument);
    EXPECT_THROW(extend_parabolic(c, 1.5, {0.1}), std::invalid_argument);
    EXPECT_EQ(extend_parabolic(c, 0.5, {0.1, 0.2}).size(), 2u);
    ExtensionProbe pr;
    pr.ys = {0.01};
    EXPECT_THROW(extension_check(pr), std::invalid_argument);
}

class PhiTest : public ::testing::TestWithParam<int> {};

TEST_P(PhiTest, TraceIsThePowerProfile) {
    const int N = GetParam();
    const PhiProfile phi(0.5 * lambda_max(N, 0.5), N, 0.5);
    for (double r : {0.3, 1.0, 2.5}) {
        std::vector<double> x(N, 0.0);
        x[0] = r;
        EXPECT_DOUBLE_EQ(phi(x, 0.0), std::pow(r, -phi.mu()));
        EXPECT_DOUBLE_EQ(phi.radial(r, 0.0), std::pow(r, -phi.mu()));
    }
}

// Phi(c x, c y) = c^{-mu} Phi(x, y)
TEST_P(PhiTest, Homogeneity) {
    const int N = GetParam();
    const PhiProfile phi(0.5 * lambda_max(N, 0.5), N, 0.5);
    for (double r : {0.5, 1.0, 2.0}) {
        for (double y : {0.01, 0.5, 1.0}) {
            const double a = phi.radial(r, y);
            const double b = phi.radial(2 * r, 2 * y) * std::pow(2.0, phi.mu());
            EXPECT_NEAR(b / a, 1.0, 1e-8) << r << " " << y;
        }
    }
}

TEST_P(PhiTest, FastTableMatchesQuadrature) {
    const int N = GetParam();
    const PhiProfile phi(0.5 * lambda_max(N, 0.5), N, 0.5);
    for (double r : {0.2, 0.5, 1.0, 2.0, 5.0}) {
        for (double y : {1e-3, 0.05, 0.5, 1.0, 3.0}) {
            const double a = phi.radial(r, y);
            EXPECT_NEAR(phi.fast(r, y) / a, 1.0, 1e-4) << r << " " << y;
        }
    }
}

TEST_P(PhiTest, ContinuousAtTheBoundary) {
    const int N = GetParam();
    const PhiProfile phi(0.5 * lambda_max(N, 0.5), N, 0.5);
    EXPECT_NEAR(phi.radial(1.0, 1e-6) / phi.radial(1.0, 0.0), 1.0, 1e-3);
}

INSTANTIATE_TEST_SUITE_P(Dims, PhiTest, ::testing::Values(2, 3));

TEST(Phi, FrozenTwoDimensionalValues) {
    // oracle: nested adaptive quadrature of the Poisson integral of |x|^{-mu}
    const PhiProfile phi(0.5 * lambda_max(2, 0.5), 2, 0.5);
    EXPECT_NEAR(phi.radial(1.0, 0.5), 0.94343544043349, 1e-9);
    EXPECT_NEAR(phi.radial(0.5, 0.05), 1.0882397652264, 1e-9);
    EXPECT_NEAR(phi.radial(2.0, 1.0), 0.85697176631299, 1e-9);
}

TEST(Phi, Validation) {
    EXPECT_THROW(PhiProfile(0.1, 4, 0.5), std::invalid_argument);
    EXPECT_THROW(PhiProfile(lambda_max(3, 0.5), 3, 0.5), std::invalid_argument);
    const PhiProfile phi(0.3, 3, 0.5);
    EXPECT_THROW(phi.radial(1.0, -0.1), std::domain_error);
}
