#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "fhlab/kernel_ops.hpp"
#include "fhlab/spectral_constants.hpp"

namespace fhlab {

struct PhiProfile::Table {
    boost::math::interpolators::cardinal_cubic_b_spline<double> spline;
};

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
constexpr int kTableSize = 129;

}  // namespace

PhiProfile::PhiProfile(double lambda, int N, double s) : lambda_(lambda), s_(s), N_(N) {
    if (N < 2 || N > 3) throw std::invalid_argument("PhiProfile: N must be 2 or 3");
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("PhiProfile: s must lie in (0,1)");
    if (!(lambda > 0.0 && lambda < lambda_max(N, s)))
        throw std::invalid_argument("PhiProfile: lambda must lie in (0, Lambda)");
    mu_ = exponents_at(N, s, lambda).mu;
    cP_ = std::exp(std::lgamma((N + 2.0 * s) / 2.0)) / (std::pow(std::numbers::pi, N / 2.0) * gamma_fn(s));
    build_table();
}

// c_P y^{2s} int |x'|^{-mu} (|x - x'|^2 + y^2)^{-(N+2s)/2} dx', in polar form around the origin.
double PhiProfile::poisson(double r, double y) const {
    const double q = (N_ + 2.0 * s_) / 2.0;
    auto sphere = [&](double rho) {
        const double A = r * r + rho * rho + y * y, B = 2.0 * r * rho;
        if (N_ == 3) {
            if (B < 1e-8 * A) return 4.0 * std::numbers::pi * std::pow(A, -q);
            return 2.0 * std::numbers::pi * (std::pow(A - B, 1.0 - q) - std::pow(A + B, 1.0 - q)) /
                   (B * (q - 1.0));
        }
        if (B < 1e-12 * A) return 2.0 * std::numbers::pi * std::pow(A, -q);
        // a = 2 atan(c tan(phi)), c^2 = (A-B)/(A+B), flattens the peak at a = 0
        const double c2 = (A - B) / (A + B);
        auto f = [&](double ph) {
            const double cs = std::cos(ph), sn = std::sin(ph);
            return std::pow(cs * cs + c2 * sn * sn, q - 1.0);
        };
        return 4.0 * std::sqrt(c2) * std::pow(A - B, -q) * GK::integrate(f, 0.0, 0.5 * std::numbers::pi, 15, 1e-12);
    };
    auto integrand = [&](double rho) { return rho > 0.0 ? std::pow(rho, N_ - 1.0 - mu_) * sphere(rho) : 0.0; };

    std::vector<double> pts{0.0};
    if (r > 0.0) {
        pts.push_back(0.5 * r);
        pts.push_back(r);
    }
    const double far = 2.0 * r + 2.0 * y;
    pts.push_back(far);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        acc += GK::integrate(integrand, pts[i], pts[i + 1], 15, 1e-11);
    }
    // rho = far / v on (0, 1].
    acc += GK::integrate([&](double v) { return v > 0.0 ? integrand(far / v) * far / (v * v) : 0.0; }, 0.0, 1.0,
                         15, 1e-11);
    return cP_ * std::pow(y, 2.0 * s_) * acc;
}

double PhiProfile::radial(double r, double y) const {
    if (y < 0.0 || r < 0.0) throw std::domain_error("PhiProfile: negative coordinate");
    if (y == 0.0) {
        if (r == 0.0) return std::numeric_limits<double>::infinity();
        return std::pow(r, -mu_);
    }
    const double v = poisson(r, y);
    if (!std::isfinite(v)) throw std::runtime_error("PhiProfile: quadrature failure");
    return v;
}

double PhiProfile::operator()(std::span<const double> x, double y) const {
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    return radial(std::sqrt(r2), y);
}

void PhiProfile::build_table() {
    std::vector<double> g(kTableSize);
    g[0] = 1.0;
    const double h = 1.0 / (kTableSize - 1);
    for (int i = 1; i < kTableSize; ++i) {
        const double y = std::pow(i * h, 1.0 / (2.0 * s_));
        const double r = std::sqrt(std::max(0.0, 1.0 - y * y));
        g[i] = poisson(r, y);
    }
    table_ = std::make_shared<const Table>(
        Table{boost::math::interpolators::cardinal_cubic_b_spline<double>(g.begin(), g.end(), 0.0, h)});
}

double PhiProfile::fast(double r, double y) const {
    const double z = std::hypot(r, y);
    if (z == 0.0) return std::numeric_limits<double>::infinity();
    const double v = std::pow(y / z, 2.0 * s_);
    return std::pow(z, -mu_) * table_->spline(std::min(v, 1.0));
}

}  // namespace fhlab
