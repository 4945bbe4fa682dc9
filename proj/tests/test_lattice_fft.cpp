#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "fhlab/lattice.hpp"

using namespace fhlab;

namespace {

Field random_field(const Lattice& lat, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Field f(lat);
    for (double& v : f.values) v = g(rng);
    return f;
}

double gauss(std::span<const double> x, double t) {
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    return std::exp(-r2 - (t - 2.0) * (t - 2.0));
}

}  // namespace

TEST(Lattice, Validation) {
    EXPECT_THROW(make_lattice(2, 8, 96, 0, 4, 64), std::invalid_argument);
    EXPECT_THROW(make_lattice(2, 8, 4, 0, 4, 64), std::invalid_argument);
    EXPECT_THROW(make_lattice(2, 8, 64, 0, 4, 4), std::invalid_argument);
    EXPECT_THROW(make_lattice(2, 8, 64, 0, 4, 64, 1), std::invalid_argument);
    EXPECT_THROW(make_lattice(2, -1, 64, 0, 4, 64), std::invalid_argument);
    EXPECT_THROW(make_lattice(5, 8, 8, 0, 4, 8), std::invalid_argument);
    EXPECT_NO_THROW(make_lattice(3, 6, 32, 0, 6, 48));
}

TEST(Lattice, NoNodeAtOrigin) {
    for (int M : {8, 16, 64}) {
        const Lattice lat = make_lattice(2, 3.0, M, 0, 1, 8);
        double rmin = 1e9;
        for (std::size_t j = 0; j < lat.slice_size(); ++j) rmin = std::min(rmin, lat.radius(j));
        EXPECT_NEAR(rmin, lat.hx / std::sqrt(2.0), 1e-14);
    }
}

TEST(Lattice, CoordsRowMajor) {
    const Lattice lat = make_lattice(2, 4.0, 8, 0, 1, 8);
    double xs[2];
    lat.coords(1, xs);
    EXPECT_DOUBLE_EQ(xs[0], lat.x(0));
    EXPECT_DOUBLE_EQ(xs[1], lat.x(1));
    lat.coords(8, xs);
    EXPECT_DOUBLE_EQ(xs[0], lat.x(1));
    EXPECT_DOUBLE_EQ(xs[1], lat.x(0));
    EXPECT_DOUBLE_EQ(lat.x(0), -4.0 + 0.5);
}

TEST(Fft, RoundTripAndParseval) {
    for (int N : {1, 2, 3}) {
        const Lattice lat = make_lattice(N, 5.0, 8, 1.0, 3.0, 16);
        const Field f = random_field(lat, 17 + N);
        const Field F = transform(f, Direction::Forward);
        const Field g = transform(F, Direction::Inverse);
        double e = 0.0, a = 0.0, b = 0.0;
        for (std::size_t i = 0; i < f.values.size(); ++i) {
            e = std::max(e, std::abs(f.values[i] - g.values[i]));
            a += f.values[i] * f.values[i];
            b += std::norm(F.spectrum[i]);
        }
        EXPECT_LT(e, 1e-12);
        EXPECT_NEAR(a, b, 1e-10 * a);
    }
}

TEST(Fft, WrongSideThrows) {
    const Lattice lat = make_lattice(1, 5.0, 8, 0, 3.0, 8);
    Field f(lat);
    EXPECT_THROW(transform(f, Direction::Inverse), std::invalid_argument);
}

TEST(Causality, MakeCausalZeroesNonpositiveSlices) {
    const Lattice lat = make_lattice(2, 4.0, 8, 2.0, 2.0, 16);
    const Field f = random_field(lat, 3);
    EXPECT_GT(causality_defect(f), 0.1);
    const Field c = make_causal(f);
    EXPECT_EQ(causality_defect(c), 0.0);
    for (int k = 0; k < lat.K; ++k) {
        for (std::size_t j = 0; j < lat.slice_size(); ++j) {
            if (lat.t(k) > 0) EXPECT_EQ(c.at(k, j), f.at(k, j));
            else EXPECT_EQ(c.at(k, j), 0.0);
        }
    }
    // t = 0 is node k = 8 and counts as nonpositive
    EXPECT_TRUE(lat.nonpositive_time(8));
    EXPECT_FALSE(lat.nonpositive_time(9));
}

TEST(WeightedIntegral, GaussianMoments) {
    const Lattice lat = make_lattice(2, 8.0, 64, 0, 4.0, 16);
    const Field f = sample(gauss, lat);
    const int k = 8;  // t = 2
    EXPECT_NEAR(weighted_integral(f, 0.0, 1.0, k), std::numbers::pi, 1e-10);
    EXPECT_NEAR(weighted_integral(f, 2.0, 2.0, k), std::numbers::pi / 4.0, 1e-10);
    EXPECT_THROW(weighted_integral(f, 0.0, 1.0, 99), std::out_of_range);
    Field neg = f;
    neg.values[8 * lat.slice_size()] = -1.0;
    EXPECT_THROW(weighted_integral(neg, 0.0, 1.5, k), std::domain_error);
    EXPECT_NO_THROW(weighted_integral(neg, 0.0, 2.0, k));
}

TEST(GraphNorm, L2AndZeroOrderSeminorm) {
    const Lattice lat = make_lattice(2, 8.0, 64, 2.0, 6.0, 64);
    const Field f = sample(gauss, lat);
    const GraphNorm g = graph_norm(f, 0.0);
    // int e^{-2|x|^2 - 2(t-2)^2} over R^2 x R
    const double l2sq = std::numbers::pi / 2.0 * std::sqrt(std::numbers::pi / 2.0);
    EXPECT_NEAR(g.l2 * g.l2, l2sq, 1e-8);
    EXPECT_NEAR(g.multiplier_seminorm, std::pow(2.0 * std::numbers::pi, 3) * g.l2 * g.l2, 1e-8);
    EXPECT_GT(graph_norm(f, 0.5).multiplier_seminorm, 0.0);
}

TEST(Symbols, FrequenciesAndLatticeSymbol) {
    const auto f = angular_freqs(8, 0.5);
    const double base = 2.0 * std::numbers::pi / 4.0;
    EXPECT_DOUBLE_EQ(f[1], base);
    EXPECT_DOUBLE_EQ(f[3], 3 * base);
    EXPECT_DOUBLE_EQ(f[4], -4 * base);
    EXPECT_DOUBLE_EQ(f[7], -base);
    const auto c = axis_symbol(8, 0.5, SpatialSymbol::Continuous);
    const auto l = axis_symbol(8, 0.5, SpatialSymbol::Lattice);
    for (int i = 0; i < 8; ++i) {
        EXPECT_LE(l[i], c[i] + 1e-12);
        EXPECT_NEAR(l[i], 16.0 * std::pow(std::sin(0.25 * f[i]), 2), 1e-12);
    }
}

TEST(Csv, HeaderAndRowCount) {
    const Lattice lat = make_lattice(1, 2.0, 8, 0, 1.0, 8);
    std::ostringstream os;
    write_csv(Field(lat), os);
    const std::string s = os.str();
    EXPECT_EQ(s.substr(0, s.find('\n')), "i0,k,x0,t,value");
    EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 1 + 64);
}
