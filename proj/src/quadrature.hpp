#pragma once

#include <vector>

namespace fhlab::detail {

struct Rule {
    std::vector<double> x;
    std::vector<double> w;
};

// Gauss-Legendre on [-1, 1].
const Rule& gauss_legendre(int n);
// Gauss-Hermite for the weight e^{-x^2}.
const Rule& gauss_hermite(int n);

// Integrate f over [a, b] with an n-point Gauss-Legendre rule.
template <typename F>
double gl_integrate(F&& f, double a, double b, int n) {
    const Rule& r = gauss_legendre(n);
    const double h = 0.5 * (b - a), c = 0.5 * (a + b);
    double acc = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) acc += r.w[i] * f(c + h * r.x[i]);
    return acc * h;
}

}  // namespace fhlab::detail
