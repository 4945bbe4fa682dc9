#include "fhlab/supersolution_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <tuple>

namespace fhlab {

namespace {

const PhiProfile& profile_for(int N, double s, double lambda1) {
    static std::mutex m;
    static std::map<std::tuple<int, double, double>, std::unique_ptr<PhiProfile>> cache;
    std::lock_guard<std::mutex> lock(m);
    auto key = std::make_tuple(N, s, lambda1);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, std::make_unique<PhiProfile>(lambda1, N, s)).first;
    return *it->second;
}

double norm2(std::span<const double> x) {
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    return r2;
}

}  // namespace

double supersol_value(const SupersolutionCertificate& c, std::span<const double> x, double y, double t) {
    if (t < 0.0) throw std::domain_error("supersol_value: t must be >= 0");
    const double r2 = norm2(x);
    if (r2 + y * y == 0.0) throw std::domain_error("supersol_value: singular at z = 0");
    if (y == 0.0) return supersol_trace(c, x, t);
    const PhiProfile& phi = profile_for(c.spec.N, c.spec.s, c.lambda1);
    return c.eps * std::pow(1.0 + t, -c.theta) * phi.radial(std::sqrt(r2), y) *
           std::exp(-(r2 + y * y) / (4.0 * (t + 1.0)));
}

double supersol_trace(const SupersolutionCertificate& c, std::span<const double> x, double t) {
    const double r2 = norm2(x);
    if (r2 == 0.0) throw std::domain_error("supersol_trace: singular at x = 0");
    return c.eps * std::pow(1.0 + t, -c.theta) * std::pow(r2, -c.mu1 / 2.0) * std::exp(-r2 / (4.0 * (t + 1.0)));
}

Field supersol_trace_field(const SupersolutionCertificate& c, const Lattice& lat) {
    return sample([&](std::span<const double> x, double t) { return t > 0.0 ? supersol_trace(c, x, t) : 0.0; },
                  lat);
}

double interior_sign_check(const SupersolutionCertificate& c) {
    return -c.theta - c.mu1 + 0.5 * (c.spec.N + 2.0 - 2.0 * c.spec.s);
}

GapReport boundary_gap_check(const SupersolutionCertificate& c, const XiGrid& grid, double slack) {
    const double p = c.spec.p, s = c.spec.s;
    const double dl = c.lambda1 - c.spec.lambda;
    GapReport g;
    g.exponent = p * c.mu1 - c.mu1 - 2.0 * s;
    g.min_gap = std::numeric_limits<double>::infinity();
    const double la = std::log(grid.lo), lb = std::log(grid.hi);
    for (int i = 0; i < grid.count; ++i) {
        const double xi = std::exp(la + (lb - la) * i / (grid.count - 1));
        const double gap = slack * dl * std::pow(xi, g.exponent) - std::pow(c.eps, p - 1.0) *
                                                                       std::exp(-(p - 1.0) * xi * xi / 4.0);
        if (gap < g.min_gap) {
            g.min_gap = gap;
            g.argmin = xi;
        }
    }
    // xi -> 0: a negative exponent sends the left side to +inf; zero leaves the constant slack*dl
    // against eps^{p-1}.
    g.zero_limit_ok = dl > 0.0 && (g.exponent < 0.0 || (g.exponent == 0.0 && slack * dl > std::pow(c.eps, p - 1.0)));
    // xi -> inf: a power law beats a Gaussian as long as the coefficient is positive.
    g.inf_limit_ok = dl > 0.0;
    return g;
}

SupersolutionCertificate make_certificate(const ProblemSpec& spec, double eps, double lambda1, const XiGrid& grid) {
    if (!(eps > 0.0)) throw std::invalid_argument("certificate: eps must be positive");
    if (!(lambda1 > 0.0 && lambda1 < lambda_max(spec.N, spec.s)))
        throw std::invalid_argument("certificate: lambda1 must lie in (0, Lambda)");
    SupersolutionCertificate c;
    c.spec = spec;
    c.eps = eps;
    c.lambda1 = lambda1;
    c.grid = grid;
    c.mu1 = exponents_at(spec.N, spec.s, lambda1).mu;
    c.theta = spec.s / (spec.p - 1.0) - c.mu1 / 2.0;
    c.interior_margin = interior_sign_check(c);
    c.boundary_min_gap = boundary_gap_check(c, grid, 1.0).min_gap;
    c.data_gap = boundary_gap_check(c, grid, 0.5).min_gap;
    c.delta1 = eps * (lambda1 - spec.lambda) / 2.0;
    return c;
}

SupersolutionCertificate find_certificate(const ProblemSpec& spec, const SearchBudget& budget, SearchTrace* trace) {
    const ExponentBundle eb = exponents(spec);
    if (!(spec.p < eb.p_plus)) {
        std::ostringstream os;
        os << "find_certificate: p = " << spec.p << " is not below p_+ = " << eb.p_plus;
        throw std::invalid_argument(os.str());
    }
    const double Lam = lambda_max(spec.N, spec.s);
    for (int k = 0; k <= budget.max_k; ++k) {
        const double lambda1 = spec.lambda + 0.25 * (Lam - spec.lambda) * std::ldexp(1.0, -k);
        if (!(lambda1 > spec.lambda)) break;
        SupersolutionCertificate c = make_certificate(spec, budget.eps0, lambda1, budget.grid);
        const ExponentBundle e1 = exponents_at(spec.N, spec.s, lambda1);
        if (!(c.interior_margin > 0.0 && spec.p < e1.p_plus && spec.p > e1.fujita_F)) continue;
        if (trace) trace->eps_gap.clear();
        for (int j = 0; j <= budget.max_j; ++j) {
            c = make_certificate(spec, budget.eps0 * std::ldexp(1.0, -j), lambda1, budget.grid);
            c.search_k = k;
            c.search_j = j;
            const GapReport plain = boundary_gap_check(c, budget.grid, 1.0);
            const GapReport half = boundary_gap_check(c, budget.grid, 0.5);
            if (trace) trace->eps_gap.emplace_back(c.eps, plain.min_gap);
            if (plain.min_gap > 0.0 && half.min_gap > 0.0 && half.zero_limit_ok && half.inf_limit_ok) return c;
        }
    }
    std::ostringstream os;
    os << "find_certificate: no (eps, lambda1) found for p = " << spec.p << " within " << budget.max_k + 1
       << " lambda1 and " << budget.max_j + 1 << " eps levels";
    throw SearchExhausted(os.str());
}

Field data_envelope(const SupersolutionCertificate& c, const Lattice& lat) {
    const double s = c.spec.s;
    return sample(
        [&](std::span<const double> x, double t) {
            if (t <= 0.0) return 0.0;
            const double r2 = norm2(x);
            return c.delta1 * std::pow(1.0 + t, -c.theta) * std::pow(r2, -(c.mu1 + 2.0 * s) / 2.0) *
                   std::exp(-r2 / (4.0 * (1.0 + t)));
        },
        lat);
}

bool data_bound(const SupersolutionCertificate& c, const Field& f) {
    const Field env = data_envelope(c, f.lat);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        if (f.values[i] < 0.0 || f.values[i] > env.values[i]) return false;
    }
    return true;
}

double max_bump_amplitude(const SupersolutionCertificate& c, const Lattice& lat) {
    const Field env = data_envelope(c, lat);
    const Field unit = sample(
        [](std::span<const double> x, double t) {
            if (t <= 0.0 || t >= 1.0) return 0.0;
            const double b = std::sin(std::numbers::pi * t);
            return std::exp(-norm2(x)) * b * b;
        },
        lat);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < unit.values.size(); ++i) {
        if (unit.values[i] > 0.0) best = std::min(best, env.values[i] / unit.values[i]);
    }
    return best;
}

namespace {

Field hardy_power_rhs(const Field& v, const Field& f, const ProblemSpec& spec) {
    Field out(v.lat);
    const std::size_t S = v.lat.slice_size();
    for (int k = 0; k < v.lat.K; ++k) {
        if (v.lat.nonpositive_time(k)) continue;
        for (std::size_t j = 0; j < S; ++j) {
            const double val = std::max(0.0, v.at(k, j));
            out.at(k, j) = spec.lambda * std::pow(v.lat.radius(j), -2.0 * spec.s) * val + std::pow(val, spec.p) +
                           f.at(k, j);
        }
    }
    return out;
}

}  // namespace

SupersolReport build_w_supersol(const SupersolutionCertificate& c, const Field& f, bool strict, int samples,
                                unsigned seed, bool full_grid) {
    if (!data_bound(c, f)) throw std::invalid_argument("build_w_supersol: forcing violates the data bound");
    const Lattice& lat = f.lat;
    const Field u = supersol_trace_field(c, lat);
    SupersolReport rep;
    rep.w = apply_Js(hardy_power_rhs(u, f, c.spec), c.spec.s);
    const double umax = u.max_abs();
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        const double d = rep.w.values[i] - u.values[i];
        if (d > 0.0) {
            ++rep.comparison_violations;
            rep.comparison_worst = std::max(rep.comparison_worst, d / umax);
        }
    }
    if (strict && rep.comparison_violations > 0) {
        std::ostringstream os;
        os << "build_w_supersol: w exceeds u at " << rep.comparison_violations << " nodes (worst "
           << rep.comparison_worst << " of max u)";
        throw std::runtime_error(os.str());
    }
    const Field back = apply_Js(hardy_power_rhs(rep.w, f, c.spec), c.spec.s);
    const double ks = kappa_s(c.spec.s);
    const double slack = 1e-12 * std::max(1.0, rep.w.max_abs());
    auto check = [&](std::size_t i) {
        ++rep.very_weak_samples;
        if (rep.w.values[i] < ks * back.values[i] - slack) ++rep.very_weak_violations;
    };
    if (full_grid) {
        for (std::size_t i = 0; i < rep.w.values.size(); ++i) check(i);
    } else {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<std::size_t> pick(0, rep.w.values.size() - 1);
        for (int q = 0; q < samples; ++q) check(pick(rng));
    }
    return rep;
}

nlohmann::json to_json(const SupersolutionCertificate& c) {
    return {{"eps", c.eps},
            {"lambda1", c.lambda1},
            {"mu1", c.mu1},
            {"theta", c.theta},
            {"delta1", c.delta1},
            {"margins", {{"interior", c.interior_margin}, {"boundary_min_gap", c.boundary_min_gap}, {"data_gap", c.data_gap}}},
            {"grid", {{"lo", c.grid.lo}, {"hi", c.grid.hi}, {"count", c.grid.count}}},
            {"search", {{"k", c.search_k}, {"j", c.search_j}}},
            {"params", {{"N", c.spec.N}, {"s", c.spec.s}, {"lambda", c.spec.lambda}, {"p", c.spec.p}}}};
}

SupersolutionCertificate certificate_from_json(const nlohmann::json& j) {
    const auto& pr = j.at("params");
    const ProblemSpec spec = make_problem(pr.at("N").get<int>(), pr.at("s").get<double>(),
                                          pr.at("lambda").get<double>(), pr.at("p").get<double>());
    XiGrid grid;
    grid.lo = j.at("grid").at("lo").get<double>();
    grid.hi = j.at("grid").at("hi").get<double>();
    grid.count = j.at("grid").at("count").get<int>();
    SupersolutionCertificate c = make_certificate(spec, j.at("eps").get<double>(), j.at("lambda1").get<double>(), grid);
    if (j.contains("search")) {
        c.search_k = j.at("search").at("k").get<int>();
        c.search_j = j.at("search").at("j").get<int>();
    }
    auto same = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); };
    const auto& m = j.at("margins");
    if (!same(c.theta, j.at("theta").get<double>()) || !same(c.interior_margin, m.at("interior").get<double>()) ||
        !same(c.boundary_min_gap, m.at("boundary_min_gap").get<double>()) ||
        !same(c.data_gap, m.at("data_gap").get<double>()) || !same(c.delta1, j.at("delta1").get<double>())) {
        throw std::runtime_error("certificate_from_json: stored margins disagree with recomputation");
    }
    if (!(c.interior_margin > 0.0 && c.boundary_min_gap > 0.0 && c.data_gap > 0.0))
        throw std::runtime_error("certificate_from_json: certificate does not verify");
    return c;
}

}  // namespace fhlab
