#include "quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace fhlab::detail {

namespace {

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights mu0 * v0^2.
Rule golub_welsch(int n, double mu0, double (*beta)(int)) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        J(k, k - 1) = J(k - 1, k) = beta(k);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    Rule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        r.x[i] = es.eigenvalues()(i);
        const double v = es.eigenvectors()(0, i);
        r.w[i] = mu0 * v * v;
    }
    // Symmetrize to kill rounding asymmetry.
    for (int i = 0; i < n / 2; ++i) {
        const double x = 0.5 * (r.x[n - 1 - i] - r.x[i]);
        const double w = 0.5 * (r.w[n - 1 - i] + r.w[i]);
        r.x[i] = -x;
        r.x[n - 1 - i] = x;
        r.w[i] = r.w[n - 1 - i] = w;
    }
    if (n % 2 == 1) r.x[n / 2] = 0.0;
    return r;
}

double beta_legendre(int k) { return k / std::sqrt(4.0 * k * k - 1.0); }
double beta_hermite(int k) { return std::sqrt(0.5 * k); }

const Rule& cached(std::map<int, std::unique_ptr<Rule>>& cache, int n, double mu0,
                   double (*beta)(int)) {
    static std::mutex m;
    std::lock_guard<std::mutex> lock(m);
    auto it = cache.find(n);
    if (it == cache.end()) {
        it = cache.emplace(n, std::make_unique<Rule>(golub_welsch(n, mu0, beta))).first;
    }
    return *it->second;
}

}  // namespace

const Rule& gauss_legendre(int n) {
    static std::map<int, std::unique_ptr<Rule>> cache;
    return cached(cache, n, 2.0, beta_legendre);
}

const Rule& gauss_hermite(int n) {
    static std::map<int, std::unique_ptr<Rule>> cache;
    return cached(cache, n, std::sqrt(std::numbers::pi), beta_hermite);
}

}  // namespace fhlab::detail
