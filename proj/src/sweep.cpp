#include "fhlab/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "fhlab/lattice.hpp"
#include "fhlab/monotone_solver.hpp"
#include "fhlab/supersolution_lab.hpp"

namespace fhlab {

namespace {

std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

std::string where_key(const std::string& text, const std::string& key) {
    const std::size_t pos = text.find('"' + key + '"');
    if (pos == std::string::npos) return "";
    const auto [l, c] = line_col(text, pos);
    std::ostringstream os;
    os << " (line " << l << ", column " << c << ")";
    return os.str();
}

template <typename T>
T get_as(const nlohmann::json& j, const std::string& key, const std::string& text) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("config: key '" + key + "' has the wrong type" + where_key(text, key));
    }
}

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known, const std::string& text) {
    for (const auto& [k, v] : j.items()) {
        if (!known.count(k)) throw ConfigError("config: unknown key '" + k + "'" + where_key(text, k));
    }
}

}  // namespace

SweepConfig parse_sweep_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        const auto [l, c] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
        std::ostringstream os;
        os << "config: parse error at line " << l << ", column " << c << ": " << e.what();
        throw ConfigError(os.str());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be an object (line 1, column 1)");
    reject_unknown(j, {"N", "s", "lambda_fractions", "p_per_band", "lattice", "solver", "forcing", "threads", "seed",
                       "output_dir"},
                   text);
    SweepConfig c;
    if (j.contains("N")) c.N = get_as<int>(j, "N", text);
    if (j.contains("s")) c.s = get_as<std::vector<double>>(j, "s", text);
    if (j.contains("lambda_fractions")) c.lambda_fractions = get_as<std::vector<double>>(j, "lambda_fractions", text);
    if (j.contains("p_per_band")) c.p_per_band = get_as<int>(j, "p_per_band", text);
    if (j.contains("threads")) c.threads = get_as<int>(j, "threads", text);
    if (j.contains("seed")) c.seed = get_as<std::uint64_t>(j, "seed", text);
    if (j.contains("output_dir")) c.output_dir = get_as<std::string>(j, "output_dir", text);
    if (j.contains("lattice")) {
        const auto& l = j.at("lattice");
        if (!l.is_object()) throw ConfigError("config: 'lattice' must be an object" + where_key(text, "lattice"));
        reject_unknown(l, {"L", "M", "T", "K"}, text);
        if (l.contains("L")) c.lattice.L = get_as<double>(l, "L", text);
        if (l.contains("M")) c.lattice.M = get_as<int>(l, "M", text);
        if (l.contains("T")) c.lattice.T = get_as<double>(l, "T", text);
        if (l.contains("K")) c.lattice.K = get_as<int>(l, "K", text);
    }
    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        if (!s.is_object()) throw ConfigError("config: 'solver' must be an object" + where_key(text, "solver"));
        reject_unknown(s, {"cap", "escape_factor", "max_iter", "tol"}, text);
        if (s.contains("cap")) c.cap = get_as<double>(s, "cap", text);
        if (s.contains("escape_factor")) c.escape_factor = get_as<double>(s, "escape_factor", text);
        if (s.contains("max_iter")) c.max_iter = get_as<int>(s, "max_iter", text);
        if (s.contains("tol")) c.tol = get_as<double>(s, "tol", text);
    }
    if (j.contains("forcing")) {
        const auto& f = j.at("forcing");
        if (!f.is_object()) throw ConfigError("config: 'forcing' must be an object" + where_key(text, "forcing"));
        reject_unknown(f, {"blowup_amplitude", "data_fraction"}, text);
        if (f.contains("blowup_amplitude")) c.blowup_amplitude = get_as<double>(f, "blowup_amplitude", text);
        if (f.contains("data_fraction")) c.data_fraction = get_as<double>(f, "data_fraction", text);
    }

    auto bad = [&](const std::string& key, const std::string& why) {
        throw ConfigError("config: '" + key + "' " + why + where_key(text, key));
    };
    if (c.s.empty()) bad("s", "must be a nonempty list");
    if (c.lambda_fractions.empty()) bad("lambda_fractions", "must be a nonempty list");
    for (double s : c.s)
        if (!(s > 0.0 && s < 1.0) || !(c.N > 2.0 * s)) bad("s", "entries must lie in (0,1) with N > 2s");
    for (double f : c.lambda_fractions)
        if (!(f > 0.0 && f < 1.0)) bad("lambda_fractions", "entries must lie in (0,1)");
    if (c.N < 2 || c.N > 3) bad("N", "must be 2 or 3");
    if (c.p_per_band < 1) bad("p_per_band", "must be >= 1");
    if (c.threads < 1) bad("threads", "must be >= 1");
    if (!(c.cap > 1.0)) bad("cap", "must exceed 1");
    if (!(c.escape_factor > 1.0)) bad("escape_factor", "must exceed 1");
    if (c.max_iter < 1) bad("max_iter", "must be >= 1");
    if (!(c.tol > 0.0)) bad("tol", "must be positive");
    if (!(c.blowup_amplitude > 0.0)) bad("blowup_amplitude", "must be positive");
    if (!(c.data_fraction > 0.0 && c.data_fraction < 1.0)) bad("data_fraction", "must lie in (0,1)");
    if (!(c.lattice.L > 0.0 && c.lattice.T > 1.0)) bad("lattice", "needs L > 0 and a horizon T > 1");
    if (c.lattice.M < 8 || (c.lattice.M & (c.lattice.M - 1)) != 0) bad("lattice", "M must be a power of two >= 8");
    if (c.lattice.K < 8) bad("lattice", "K must be >= 8");
    return c;
}

SweepConfig load_sweep_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_sweep_config(ss.str());
}

nlohmann::json to_json(const SweepConfig& c) {
    return {{"N", c.N},
            {"s", c.s},
            {"lambda_fractions", c.lambda_fractions},
            {"p_per_band", c.p_per_band},
            {"lattice", {{"L", c.lattice.L}, {"M", c.lattice.M}, {"T", c.lattice.T}, {"K", c.lattice.K}}},
            {"solver", {{"cap", c.cap}, {"escape_factor", c.escape_factor}, {"max_iter", c.max_iter}, {"tol", c.tol}}},
            {"forcing", {{"blowup_amplitude", c.blowup_amplitude}, {"data_fraction", c.data_fraction}}},
            {"threads", c.threads},
            {"seed", c.seed},
            {"output_dir", c.output_dir}};
}

std::vector<double> band_samples(double lo, double hi, int n) {
    if (!(hi > lo)) throw std::invalid_argument("band_samples: empty band");
    const double a = lo * (1.0 + 1e-3), b = hi * (1.0 - 1e-3);
    if (!(b > a)) throw std::invalid_argument("band_samples: band narrower than the exclusion margin");
    std::vector<double> out;
    for (int k = 1; k <= n; ++k) out.push_back(a + (b - a) * k / (n + 1.0));
    return out;
}

std::vector<SweepPoint> sweep_points(const SweepConfig& cfg) {
    std::vector<SweepPoint> pts;
    for (double s : cfg.s) {
        for (double fr : cfg.lambda_fractions) {
            const double lambda = fr * lambda_max(cfg.N, s);
            const ExponentBundle e = exponents_at(cfg.N, s, lambda);
            const std::pair<double, double> bands[] = {
                {1.0, e.fujita_F}, {e.fujita_F, e.p_plus}, {e.p_plus, e.p_plus + (e.p_plus - e.fujita_F)}};
            for (const auto& [lo, hi] : bands) {
                for (double p : band_samples(lo, hi, cfg.p_per_band)) {
                    SweepPoint pt{cfg.N, s, lambda, p, classify_regime(p, e)};
                    pts.push_back(pt);
                }
            }
        }
    }
    return pts;
}

std::string expected_verdict(Regime r) {
    switch (r) {
        case Regime::BlowUp: return to_string(Verdict::NormEscape);
        case Regime::ConditionalGlobal: return to_string(Verdict::ConvergedBelowCap);
        case Regime::NonExistence: return to_string(Verdict::NormEscape);
        case Regime::CriticalOpen: return "";
    }
    return "";
}

SweepRow run_point(const SweepPoint& pt, const SweepConfig& cfg) {
    SweepRow row;
    row.point = pt;
    row.exps = exponents_at(pt.N, pt.s, pt.lambda);
    const ProblemSpec spec = make_problem(pt.N, pt.s, pt.lambda, pt.p);
    const Lattice lat = make_lattice(pt.N, cfg.lattice.L, cfg.lattice.M, 0.0, cfg.lattice.T, cfg.lattice.K);
    SolverOptions opt;
    opt.max_iter = cfg.max_iter;
    opt.tol = cfg.tol;
    opt.cap = cfg.cap;
    opt.escape_factor = cfg.escape_factor;

    Field f;
    Field ceiling;
    if (pt.predicted == Regime::ConditionalGlobal) {
        try {
            const SupersolutionCertificate cert = find_certificate(spec);
            const double amax = max_bump_amplitude(cert, lat);
            f = bump_forcing(lat, cfg.data_fraction * amax);
            ceiling = supersol_trace_field(cert, lat);
            opt.ceiling = &ceiling;
            row.evidence["certificate"] = to_json(cert);
            row.evidence["amplitude"] = cfg.data_fraction * amax;
        } catch (const SearchExhausted& e) {
            row.observed = "NoCertificate";
            row.mismatch = true;
            row.evidence["error"] = e.what();
            return row;
        }
    } else {
        f = bump_forcing(lat, cfg.blowup_amplitude);
        row.evidence["amplitude"] = cfg.blowup_amplitude;
    }
    const TrajectoryReport rep = run(spec, f, opt);
    row.observed = to_string(rep.verdict);
    row.escape_time = rep.escape_time;
    row.final_norm = rep.final_norm;
    row.evidence["trajectory"] = to_json(rep);
    row.mismatch = row.observed != expected_verdict(pt.predicted);
    if (opt.ceiling && rep.ceiling_violations > 0) row.mismatch = true;
    return row;
}

const std::vector<std::string>& csv_columns() {
    static const std::vector<std::string> cols{"N",        "s",         "lambda",    "p",        "mu",
                                               "p_plus",   "F_las",     "F_tilde",   "predicted", "observed",
                                               "escape_time", "final_norm"};
    return cols;
}

void write_csv_header(std::ostream& os) {
    const auto& c = csv_columns();
    for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
    os << '\n';
}

void write_csv_row(std::ostream& os, const SweepRow& r) {
    std::ostringstream o;
    o << std::setprecision(10);
    o << r.point.N << ',' << r.point.s << ',' << r.point.lambda << ',' << r.point.p << ',' << r.exps.mu << ','
      << r.exps.p_plus << ',' << r.exps.fujita_F << ',' << r.exps.fujita_F_tilde << ',' << to_string(r.point.predicted)
      << ',' << r.observed << ',' << r.escape_time << ',' << r.final_norm << '\n';
    os << o.str();
}

nlohmann::json to_json(const SweepRow& r) {
    return {{"N", r.point.N},
            {"s", r.point.s},
            {"lambda", r.point.lambda},
            {"p", r.point.p},
            {"exponents",
             {{"Lambda", r.exps.lambda_max},
              {"alpha", r.exps.alpha},
              {"mu", r.exps.mu},
              {"p_plus", r.exps.p_plus},
              {"F_las", r.exps.fujita_F},
              {"F_tilde", r.exps.fujita_F_tilde},
              {"F0", r.exps.fujita_F0}}},
            {"predicted", to_string(r.point.predicted)},
            {"expected", expected_verdict(r.point.predicted)},
            {"observed", r.observed},
            {"mismatch", r.mismatch},
            {"escape_time", r.escape_time},
            {"final_norm", r.final_norm},
            {"evidence", r.evidence}};
}

SweepSummary run_sweep(const SweepConfig& cfg, const std::function<void(const SweepRow&)>& sink) {
    const std::vector<SweepPoint> pts = sweep_points(cfg);
    SweepSummary sum;
    sum.rows.resize(pts.size());

    std::mutex m;
    std::condition_variable cv;
    std::map<std::size_t, SweepRow> done;
    std::exception_ptr failure;
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i; (i = next++) < pts.size();) {
            SweepRow row;
            try {
                row = run_point(pts[i], cfg);
            } catch (...) {
                std::lock_guard<std::mutex> lk(m);
                if (!failure) failure = std::current_exception();
                next = pts.size();
                cv.notify_all();
                return;
            }
            std::lock_guard<std::mutex> lk(m);
            done.emplace(i, std::move(row));
            cv.notify_all();
        }
    };
    std::vector<std::thread> pool;
    const int n = std::clamp(cfg.threads, 1, static_cast<int>(std::max<std::size_t>(1, pts.size())));
    for (int k = 0; k < n; ++k) pool.emplace_back(worker);

    // Single writer: emit rows in point order as they complete.
    for (std::size_t i = 0; i < pts.size(); ++i) {
        std::unique_lock<std::mutex> lk(m);
        cv.wait(lk, [&] { return done.count(i) || failure; });
        if (failure) break;
        sum.rows[i] = std::move(done.at(i));
        done.erase(i);
        lk.unlock();
        if (sum.rows[i].mismatch) ++sum.mismatches;
        if (sink) sink(sum.rows[i]);
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return sum;
}

}  // namespace fhlab
