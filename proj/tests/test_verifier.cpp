#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fhlab/spectral_constants.hpp"
#include "fhlab/verifier.hpp"

using namespace fhlab;

TEST(Catalog, IdsAndOrder) {
    const auto& ids = check_catalog();
    ASSERT_EQ(ids.size(), 16u);
    EXPECT_EQ(ids.front(), "hardy");
    for (const char* id : {"hardy", "hardy_extended", "kato", "algebra_ab", "algebra_abs", "radial_K", "symbol",
                           "inversion", "semigroup", "adjoint", "ground_state", "radial_flap", "extension",
                           "muckenhoupt", "picone", "ls_bound"}) {
        EXPECT_TRUE(is_check(id)) << id;
    }
    EXPECT_FALSE(is_check("nope"));
}

TEST(Catalog, UnknownIdThrows) {
    EXPECT_THROW(run_check("nope"), UnknownCheck);
    EXPECT_THROW(run_suite({"algebra_ab", "nope"}), UnknownCheck);
}

TEST(Determinism, SameSeedSameJson) {
    CheckConfig cfg;
    cfg.seed = 42;
    cfg.functions = 5;
    for (const char* id : {"algebra_ab", "algebra_abs", "radial_K"}) {
        const auto a = to_json(run_check(id, cfg)).dump();
        const auto b = to_json(run_check(id, cfg)).dump();
        EXPECT_EQ(a, b) << id;
    }
    CheckConfig other = cfg;
    other.seed = 43;
    EXPECT_NE(to_json(run_check("algebra_ab", cfg)).dump(), to_json(run_check("algebra_ab", other)).dump());
}

TEST(Suite, OrderFollowsIdsAcrossThreads) {
    CheckConfig cfg;
    cfg.functions = 4;
    const std::vector<std::string> ids{"radial_K", "algebra_ab", "algebra_abs"};
    const auto one = run_suite(ids, cfg, 1);
    const auto three = run_suite(ids, cfg, 3);
    ASSERT_EQ(one.size(), 3u);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        EXPECT_EQ(one[i].id, ids[i]);
        EXPECT_EQ(to_json(one[i]).dump(), to_json(three[i]).dump());
    }
}

TEST(Report, PassRuleAndJsonShape) {
    CheckConfig cfg;
    cfg.functions = 6;
    for (const char* id : {"algebra_ab", "algebra_abs", "radial_K"}) {
        const CheckReport r = run_check(id, cfg);
        EXPECT_TRUE(r.passed) << id;
        EXPECT_EQ(r.passed, r.worst_margin >= -r.tolerance);
        EXPECT_GT(r.samples, 0);
        const auto j = to_json(r);
        for (const char* key : {"id", "passed", "worst_margin", "samples", "tolerance", "params"})
            EXPECT_TRUE(j.contains(key)) << key;
    }
    CheckReport inf;
    inf.worst_margin = -INFINITY;
    EXPECT_EQ(to_json(inf)["worst_margin"], "-inf");
}

TEST(Report, HardyInTwoDimensions) {
    CheckConfig cfg;
    cfg.N = 2;
    cfg.functions = 3;
    const CheckReport r = run_check("hardy", cfg);
    EXPECT_TRUE(r.passed);
    EXPECT_GT(r.worst_margin, 0.0);
}

// Closed-form K(sigma) against the quadrature, including sigma = 1 and the inversion symmetry.
TEST(RadialK, QuadratureMatchesReference) {
    std::mt19937_64 rng(8);
    for (int N : {2, 3}) {
        std::uniform_real_distribution<double> U(0.05, 0.95 * (N - 1.0) / 2.0);
        for (int i = 0; i < 5; ++i) {
            const double mu = U(rng);
            for (double sigma : {0.0, 0.3, 0.9, 1.0, 1.1, 3.0}) {
                const double a = radial_K(N, mu, sigma), b = radial_K_reference(N, mu, sigma);
                EXPECT_NEAR(a / b, 1.0, 1e-8) << N << " " << mu << " " << sigma;
            }
            EXPECT_NEAR(radial_K_reference(N, mu, 2.5), std::pow(2.5, -mu) * radial_K_reference(N, mu, 0.4), 1e-12);
        }
    }
    // sigma = 0 is the sphere area
    EXPECT_NEAR(radial_K_reference(3, 0.3, 0.0), 4.0 * std::numbers::pi, 1e-12);
    EXPECT_NEAR(radial_K_reference(2, 0.3, 0.0), 2.0 * std::numbers::pi, 1e-12);
}

TEST(TestFunctions, FamiliesAndSupport) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 9; ++i) {
        const TestFunction tf = draw_test_function(3, i, rng);
        EXPECT_EQ(static_cast<int>(tf.family), i % 3);
        EXPECT_EQ(tf.N, 3);
        std::vector<double> x = tf.center;
        EXPECT_GT(tf.space(x), 0.0);
        std::vector<double> far(3, 0.0);
        far[0] = 1.01 * tf.support_radius();
        if (tf.family == Family::Bump) EXPECT_EQ(tf.space(far), 0.0);
        else EXPECT_LT(tf.space(far), 1e-10);
        EXPECT_LT(tf.time(tf.support_t0() - 0.01), 1e-12);
        EXPECT_GT(tf.feature(), 0.0);
        for (int q = 0; q < 50; ++q) {
            std::vector<double> y(3);
            std::normal_distribution<double> g;
            for (double& v : y) v = g(rng);
            EXPECT_GE(tf(y, tf.t_center + g(rng)), 0.0);
        }
    }
}
