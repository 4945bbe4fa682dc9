#include "fhlab/monotone_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "fhlab/kernel_ops.hpp"

namespace fhlab {

double cutoff_eta(int n, double r, double t) {
    if (n < 0) throw std::invalid_argument("cutoff_eta: n must be >= 0");
    const double space = quintic_blend(r - n);
    const double lo = 1.0 / (n + 2.0), hi = 1.0 / (n + 1.0);
    double time = 0.0;
    if (t <= lo) {
        time = 0.0;
    } else if (t < hi) {
        time = 1.0 - quintic_blend((t - lo) / (hi - lo));
    } else {
        time = quintic_blend(t - (n + 1.0));
    }
    return space * time;
}

Field cutoff_field(int n, const Lattice& lat) {
    Field out(lat);
    const std::size_t S = lat.slice_size();
    for (int k = 0; k < lat.K; ++k) {
        for (std::size_t j = 0; j < S; ++j) out.at(k, j) = cutoff_eta(n, lat.radius(j), lat.t(k));
    }
    return out;
}

namespace {

// Clamp rounding-level negatives; anything larger is a caller error.
double clamp_nonneg(double v, double scale, const char* what) {
    if (v >= 0.0) return v;
    if (-v <= 1e-14 * std::max(scale, 1e-300)) return 0.0;
    std::ostringstream os;
    os << "rhs_truncated: negative " << what << " value " << v;
    throw std::invalid_argument(os.str());
}

}  // namespace

Field rhs_truncated(const Field& w, const Field& f, const ProblemSpec& spec, int n) {
    if (n < 0) throw std::invalid_argument("rhs_truncated: n must be >= 0");
    const Lattice& lat = f.lat;
    if (w.values.size() != f.values.size()) throw std::invalid_argument("rhs_truncated: lattice mismatch");
    const double wmax = w.max_abs(), fmax = f.max_abs();
    Field out(lat);
    const std::size_t S = lat.slice_size();
    const double nn = n;
    for (int k = 0; k < lat.K; ++k) {
        const double t = lat.t(k);
        for (std::size_t j = 0; j < S; ++j) {
            const double r = lat.radius(j);
            const double eta = cutoff_eta(n, r, t);
            if (eta == 0.0) continue;
            const double fv = clamp_nonneg(f.at(k, j), fmax, "f");
            if (n == 0) {
                out.at(k, j) = eta * fv / (1.0 + fv);
                continue;
            }
            const double wv = clamp_nonneg(w.at(k, j), wmax, "w");
            const double wp = std::pow(wv, spec.p);
            const double hardy = spec.lambda * (wv / (1.0 + wv / nn)) / std::pow(r + 1.0 / nn, 2.0 * spec.s);
            const double power = std::isinf(wp) ? nn : wp / (1.0 + wp / nn);
            out.at(k, j) = eta * (hardy + power + fv / (1.0 + fv / nn));
        }
    }
    return out;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::ConvergedBelowCap: return "ConvergedBelowCap";
        case Verdict::NormEscape: return "NormEscape";
        case Verdict::Stalled: return "Stalled";
    }
    return "?";
}

namespace {

Field solve_step(const Field& rhs, double s) {
    Field w = apply_Js(rhs, s);
    // Positive kernel: only FFT rounding can produce negatives.
    const double mx = w.max_abs();
    for (double& v : w.values) {
        if (v < 0.0) {
            if (-v > 1e-14 * mx) {
                std::ostringstream os;
                os << "monotone_solver: J_s produced " << v << " on a nonnegative input";
                throw std::runtime_error(os.str());
            }
            v = 0.0;
        }
    }
    return w;
}

int next_level(int n, Schedule sch) {
    if (n == 0) return 1;
    return sch == Schedule::Geometric ? 2 * n : n + 1;
}

}  // namespace

IterationState initial_state(const Field& f, const ProblemSpec& spec) {
    IterationState st;
    st.iteration = 0;
    st.n = 0;
    st.w = solve_step(rhs_truncated(Field(f.lat), f, spec, 0), spec.s);
    st.M = blowup_functional(st.w, exponents(spec).mu, spec.p);
    return st;
}

IterationState iterate(const IterationState& st, const Field& f, const ProblemSpec& spec, const SolverOptions& opt) {
    IterationState nx;
    nx.iteration = st.iteration + 1;
    nx.n = next_level(st.n, opt.schedule);
    nx.w = solve_step(rhs_truncated(st.w, f, spec, nx.n), spec.s);
    const double scale = std::max(1.0, nx.w.max_abs());
    double worst = 0.0;
    std::size_t where = 0;
    for (std::size_t i = 0; i < nx.w.values.size(); ++i) {
        const double d = st.w.values[i] - nx.w.values[i];
        if (d > worst) {
            worst = d;
            where = i;
        }
    }
    nx.max_decrease = worst / scale;
    nx.monotone = nx.max_decrease <= opt.mono_slack;
    if (!nx.monotone) {
        std::ostringstream os;
        os << "monotone_solver: iterate " << nx.iteration << " decreased by " << worst << " at flat index " << where
           << " (slack " << opt.mono_slack << ")";
        throw std::runtime_error(os.str());
    }
    nx.M = blowup_functional(nx.w, exponents(spec).mu, spec.p);
    return nx;
}

std::vector<double> blowup_functional(const Field& w, double mu, double p) {
    std::vector<double> M(w.lat.K);
    for (int k = 0; k < w.lat.K; ++k) M[k] = weighted_integral(w, -mu, p, k);
    return M;
}

namespace {

struct Growth {
    double factor = 0.0;
    double escape_time = -1.0;
};

Growth growth_of(const std::vector<double>& M, const Lattice& lat, double t_ref, double escape_factor) {
    Growth g;
    int kref = static_cast<int>(std::lround((t_ref + lat.T_neg) / lat.ht));
    kref = std::clamp(kref, 0, lat.K - 1);
    const double base = M[kref];
    if (!(base > 0.0)) return g;
    for (int k = kref; k < lat.K; ++k) {
        const double ratio = M[k] / base;
        if (!std::isfinite(ratio)) {
            g.factor = std::numeric_limits<double>::infinity();
            if (g.escape_time < 0.0) g.escape_time = lat.t(k);
            break;
        }
        g.factor = std::max(g.factor, ratio);
        if (ratio >= escape_factor && g.escape_time < 0.0) g.escape_time = lat.t(k);
    }
    return g;
}

bool all_finite(const Field& w) {
    return std::all_of(w.values.begin(), w.values.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

TrajectoryReport run(const ProblemSpec& spec, const Field& f, const SolverOptions& opt,
                     const std::function<void(const IterationState&)>& observer) {
    for (double v : f.values) {
        if (v < 0.0) throw std::invalid_argument("run: forcing must be nonnegative");
    }
    if (causality_defect(f) > 0.0) throw std::invalid_argument("run: forcing must vanish for t <= 0");
    const ExponentBundle eb = exponents(spec);
    TrajectoryReport rep;
    rep.params = {{"N", spec.N},
                  {"s", spec.s},
                  {"lambda", spec.lambda},
                  {"p", spec.p},
                  {"mu", eb.mu},
                  {"max_iter", opt.max_iter},
                  {"tol", opt.tol},
                  {"escape_factor", opt.escape_factor},
                  {"cap", opt.cap},
                  {"t_ref", opt.t_ref},
                  {"schedule", opt.schedule == Schedule::Geometric ? "geometric" : "linear"},
                  {"lattice",
                   {{"L", f.lat.L}, {"M", f.lat.M}, {"T", f.lat.T}, {"K", f.lat.K}, {"T_neg", f.lat.T_neg}}}};

    auto audit = [&](const IterationState& st) {
        rep.causality_defect = std::max(rep.causality_defect, causality_defect(st.w));
        if (opt.ceiling) {
            const double cmax = opt.ceiling->max_abs();
            for (std::size_t i = 0; i < st.w.values.size(); ++i) {
                const double d = st.w.values[i] - opt.ceiling->values[i];
                if (d > 0.0) {
                    ++rep.ceiling_violations;
                    rep.ceiling_worst = std::max(rep.ceiling_worst, d / cmax);
                }
            }
        }
        if (observer) observer(st);
    };

    IterationState st = initial_state(f, spec);
    audit(st);
    const double M0 = *std::max_element(st.M.begin(), st.M.end());
    rep.verdict = Verdict::Stalled;
    for (int it = 0; it < opt.max_iter; ++it) {
        IterationState nx;
        try {
            nx = iterate(st, f, spec, opt);
        } catch (const std::invalid_argument&) {
            // Overflowed iterates surface as non-finite rhs entries.
            if (!all_finite(st.w)) {
                rep.verdict = Verdict::NormEscape;
                break;
            }
            throw;
        }
        double diff = 0.0;
        for (std::size_t i = 0; i < nx.w.values.size(); ++i)
            diff = std::max(diff, std::abs(nx.w.values[i] - st.w.values[i]));
        rep.sup_diff.push_back(diff);
        rep.max_decrease = std::max(rep.max_decrease, nx.max_decrease);
        audit(nx);
        st = std::move(nx);

        const Growth g = growth_of(st.M, st.w.lat, opt.t_ref, opt.escape_factor);
        const double Mmax = *std::max_element(st.M.begin(), st.M.end());
        if (!all_finite(st.w) || !std::isfinite(Mmax) || g.factor >= opt.escape_factor ||
            (M0 > 0.0 && Mmax > opt.cap * M0)) {
            rep.verdict = Verdict::NormEscape;
            break;
        }
        if (diff <= opt.tol * st.w.max_abs()) {
            rep.verdict = Verdict::ConvergedBelowCap;
            break;
        }
    }
    rep.iterations = st.iteration;
    rep.n_final = st.n;
    const Growth g = growth_of(st.M, st.w.lat, opt.t_ref, opt.escape_factor);
    rep.growth_factor = g.factor;
    rep.escape_time = g.escape_time;
    rep.final_norm = st.w.max_abs();
    for (int k = 0; k < st.w.lat.K; ++k) rep.M_curve.emplace_back(st.w.lat.t(k), st.M[k]);
    return rep;
}

nlohmann::json to_json(const TrajectoryReport& rep) {
    nlohmann::json curve = nlohmann::json::array();
    for (const auto& [t, m] : rep.M_curve) curve.push_back({t, std::isfinite(m) ? nlohmann::json(m) : nullptr});
    auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
    return {{"verdict", to_string(rep.verdict)},
            {"n_final", rep.n_final},
            {"iterations", rep.iterations},
            {"M_curve", curve},
            {"growth_factor", num(rep.growth_factor)},
            {"escape_time", rep.escape_time},
            {"final_norm", num(rep.final_norm)},
            {"max_decrease", rep.max_decrease},
            {"causality_defect", rep.causality_defect},
            {"ceiling_violations", rep.ceiling_violations},
            {"params", rep.params}};
}

SingularityFit singularity_profile(const Field& w, double t_lo, double t_hi, double r_lo, double r_hi) {
    const Lattice& lat = w.lat;
    std::vector<double> slopes;
    const std::size_t S = lat.slice_size();
    for (int k = 0; k < lat.K; ++k) {
        const double t = lat.t(k);
        if (t < t_lo || t > t_hi) continue;
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (std::size_t j = 0; j < S; ++j) {
            const double r = lat.radius(j);
            if (r < r_lo || r > r_hi) continue;
            const double v = w.at(k, j);
            if (!(v > 0.0)) throw std::runtime_error("singularity_profile: degenerate fit, w vanishes on the annulus");
            const double X = std::log(r), Y = std::log(v);
            sx += X;
            sy += Y;
            sxx += X * X;
            sxy += X * Y;
            ++n;
        }
        if (n < 2) continue;
        const double den = n * sxx - sx * sx;
        if (den <= 0.0) continue;
        slopes.push_back((n * sxy - sx * sy) / den);
    }
    if (slopes.empty()) throw std::runtime_error("singularity_profile: no slices or nodes in the window");
    SingularityFit fit;
    fit.slices = static_cast<int>(slopes.size());
    double m = 0.0;
    for (double v : slopes) m += v;
    m /= slopes.size();
    double var = 0.0;
    for (double v : slopes) var += (v - m) * (v - m);
    fit.slope = m;
    fit.band = slopes.size() > 1 ? 2.0 * std::sqrt(var / (slopes.size() - 1)) : 0.0;
    return fit;
}

Field bump_forcing(const Lattice& lat, double amplitude) {
    return sample(
        [=](std::span<const double> x, double t) {
            if (t <= 0.0 || t >= 1.0) return 0.0;
            double r2 = 0.0;
            for (double v : x) r2 += v * v;
            const double b = std::sin(std::numbers::pi * t);
            return amplitude * std::exp(-r2) * b * b;
        },
        lat);
}

}  // namespace fhlab
