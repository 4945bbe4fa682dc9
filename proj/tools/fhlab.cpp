// fhlab command line: constants, verify, solve, supersol, sweep.
// Exit codes: 0 success, 1 failed check or regime mismatch, 2 usage error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "fhlab/lattice.hpp"
#include "fhlab/monotone_solver.hpp"
#include "fhlab/spectral_constants.hpp"
#include "fhlab/supersolution_lab.hpp"
#include "fhlab/sweep.hpp"
#include "fhlab/verifier.hpp"

using namespace fhlab;
using nlohmann::json;

namespace {

constexpr int kOk = 0, kMismatch = 1, kUsage = 2;

struct Problem {
    int N = 3;
    double s = 0.5;
    double fraction = 0.5;
    double p = 0.0;  // 0 selects the band midpoint named by --band
    std::string band = "conditional";
};

void add_problem(CLI::App* c, Problem& pr, bool with_p) {
    c->add_option("--N", pr.N, "spatial dimension");
    c->add_option("--s", pr.s, "fractional order in (0,1)");
    c->add_option("--lambda-fraction", pr.fraction, "lambda as a fraction of Lambda_{N,s}");
    if (with_p) {
        c->add_option("--p", pr.p, "exponent; overrides --band");
        c->add_option("--band", pr.band, "midpoint of blowup, conditional or nonexistence band")
            ->check(CLI::IsMember({"blowup", "conditional", "nonexistence"}));
    }
}

double lambda_of(const Problem& pr) {
    if (!(pr.fraction > 0.0 && pr.fraction < 1.0))
        throw std::invalid_argument("--lambda-fraction must lie in (0,1)");
    return pr.fraction * lambda_max(pr.N, pr.s);
}

double p_of(const Problem& pr, const ExponentBundle& e) {
    if (pr.p > 0.0) return pr.p;
    if (pr.band == "blowup") return 0.5 * (1.0 + e.fujita_F);
    if (pr.band == "conditional") return 0.5 * (e.fujita_F + e.p_plus);
    return e.p_plus + 0.5 * (e.p_plus - e.fujita_F);
}

json bundle_json(const ExponentBundle& b) {
    return {{"Lambda", b.lambda_max}, {"alpha", b.alpha},         {"mu", b.mu},
            {"p_plus", b.p_plus},     {"F_las", b.fujita_F},      {"F_tilde", b.fujita_F_tilde},
            {"F0", b.fujita_F0},      {"kappa_s", b.kappa_s},     {"a_Ns", b.a_Ns}};
}

void emit(const json& j, const std::string& out) {
    if (out.empty()) {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot write '" + out + "'");
    f << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fractional heat equation with Hardy potential: numerical laboratory"};
    app.require_subcommand(1);

    Problem cpr;
    auto* constants = app.add_subcommand("constants", "print the exponent bundle");
    add_problem(constants, cpr, false);

    std::vector<std::string> ids;
    bool suite = false;
    CheckConfig vcfg;
    int vthreads = 1;
    std::string vout;
    auto* verify = app.add_subcommand("verify", "run catalog checks");
    verify->add_option("--id", ids, "check id (repeatable)");
    verify->add_flag("--suite", suite, "run the whole catalog");
    verify->add_option("--seed", vcfg.seed);
    verify->add_option("--functions", vcfg.functions, "test functions per check");
    verify->add_option("--N", vcfg.N);
    verify->add_option("--s", vcfg.s);
    verify->add_option("--lambda-fraction", vcfg.lambda_fraction);
    verify->add_option("--threads", vthreads);
    verify->add_option("--out", vout, "write the JSON report here");
    verify->add_flag("--list", "list check ids and exit");

    Problem spr;
    LatticeSpec slat;
    SolverOptions sopt;
    double amplitude = 1.0;
    bool certified = false;
    double data_fraction = 0.5;
    std::string sout;
    auto* solve = app.add_subcommand("solve", "run the monotone scheme once");
    add_problem(solve, spr, true);
    solve->add_option("--L", slat.L);
    solve->add_option("--M", slat.M);
    solve->add_option("--T", slat.T, "horizon");
    solve->add_option("--K", slat.K);
    solve->add_option("--amplitude", amplitude, "bump forcing amplitude");
    solve->add_flag("--certified", certified, "size the bump under a certified supersolution envelope");
    solve->add_option("--data-fraction", data_fraction, "fraction of the largest certified amplitude");
    solve->add_option("--max-iter", sopt.max_iter);
    solve->add_option("--tol", sopt.tol);
    solve->add_option("--cap", sopt.cap);
    solve->add_option("--escape-factor", sopt.escape_factor);
    solve->add_option("--out", sout);

    Problem upr;
    std::string uout, ucheck;
    auto* supersol = app.add_subcommand("supersol", "search for a supersolution certificate");
    add_problem(supersol, upr, true);
    supersol->add_option("--out", uout);
    supersol->add_option("--check", ucheck, "reload a certificate file and re-verify it");

    std::string config_path, wout;
    int wthreads = 0, wper = 0;
    auto* sweep = app.add_subcommand("sweep", "phase-diagram sweep");
    sweep->add_option("--config", config_path, "JSON config")->required();
    sweep->add_option("--out", wout, "output directory (overrides the file)");
    sweep->add_option("--threads", wthreads, "workers (overrides the file)");
    sweep->add_option("--p-per-band", wper, "samples per band (overrides the file)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*constants) {
            const ExponentBundle b = exponents_at(cpr.N, cpr.s, lambda_of(cpr));
            std::cout << std::setprecision(12) << "Lambda  " << b.lambda_max << "\nalpha   " << b.alpha << "\nmu      "
                      << b.mu << "\nF(s)    " << b.fujita_F0 << "\nF       " << b.fujita_F << "\nF~      "
                      << b.fujita_F_tilde << "\np_+     " << b.p_plus << "\nkappa_s " << b.kappa_s << "\na_Ns    "
                      << b.a_Ns << '\n';
            json j = bundle_json(b);
            j["N"] = cpr.N;
            j["s"] = cpr.s;
            j["lambda"] = lambda_of(cpr);
            std::cout << j.dump() << '\n';
            return kOk;
        }
        if (*verify) {
            if (verify->count("--list")) {
                for (const auto& id : check_catalog()) std::cout << id << '\n';
                return kOk;
            }
            if (suite) ids = check_catalog();
            if (ids.empty()) {
                std::cerr << "verify: give --id or --suite\n";
                return kUsage;
            }
            for (const auto& id : ids) {
                if (!is_check(id)) {
                    std::cerr << "verify: unknown check id '" << id << "'\n";
                    return kUsage;
                }
            }
            const auto reports = run_suite(ids, vcfg, vthreads);
            emit(to_json(reports), vout);
            bool ok = true;
            for (const auto& r : reports) {
                std::cerr << (r.passed ? "PASS " : "FAIL ") << r.id << "  margin " << r.worst_margin << '\n';
                ok = ok && r.passed;
            }
            return ok ? kOk : kMismatch;
        }
        if (*solve) {
            const double lambda = lambda_of(spr);
            const ExponentBundle e = exponents_at(spr.N, spr.s, lambda);
            const ProblemSpec spec = make_problem(spr.N, spr.s, lambda, p_of(spr, e));
            const Lattice lat = make_lattice(spr.N, slat.L, slat.M, 0.0, slat.T, slat.K);
            Field f, ceiling;
            json extra;
            if (certified) {
                const SupersolutionCertificate cert = find_certificate(spec);
                const double a = data_fraction * max_bump_amplitude(cert, lat);
                f = bump_forcing(lat, a);
                ceiling = supersol_trace_field(cert, lat);
                sopt.ceiling = &ceiling;
                extra["certificate"] = to_json(cert);
                amplitude = a;
            } else {
                f = bump_forcing(lat, amplitude);
            }
            const TrajectoryReport rep = run(spec, f, sopt, [](const IterationState& st) {
                std::cerr << "iterate " << st.iteration << "  n " << st.n << "  max " << st.w.max_abs() << '\n';
            });
            const Regime reg = classify_regime(spec.p, e);
            json j = to_json(rep);
            j["amplitude"] = amplitude;
            j["predicted"] = to_string(reg);
            j["expected"] = expected_verdict(reg);
            if (!extra.is_null()) j["certificate"] = extra["certificate"];
            emit(j, sout);
            return kOk;
        }
        if (*supersol) {
            if (!ucheck.empty()) {
                std::ifstream in(ucheck);
                if (!in) throw std::invalid_argument("cannot open '" + ucheck + "'");
                const SupersolutionCertificate c = certificate_from_json(json::parse(in));
                std::cout << to_json(c).dump(2) << "\nverified\n";
                return kOk;
            }
            const double lambda = lambda_of(upr);
            const ExponentBundle e = exponents_at(upr.N, upr.s, lambda);
            const ProblemSpec spec = make_problem(upr.N, upr.s, lambda, p_of(upr, e));
            if (!(spec.p < e.p_plus)) {
                std::cerr << "supersol: refused, p = " << spec.p << " is not below p_+ = " << e.p_plus << '\n';
                return kMismatch;
            }
            try {
                emit(to_json(find_certificate(spec)), uout);
            } catch (const SearchExhausted& ex) {
                std::cerr << "supersol: " << ex.what() << '\n';
                return kMismatch;
            }
            return kOk;
        }
        if (*sweep) {
            SweepConfig cfg = load_sweep_config(config_path);
            if (!wout.empty()) cfg.output_dir = wout;
            if (wthreads > 0) cfg.threads = wthreads;
            if (wper > 0) cfg.p_per_band = wper;
            std::filesystem::create_directories(cfg.output_dir);
            const auto dir = std::filesystem::path(cfg.output_dir);
            std::ofstream csv(dir / "sweep.csv");
            if (!csv) throw std::runtime_error("cannot write sweep.csv");
            write_csv_header(csv);
            const SweepSummary sum = run_sweep(cfg, [&](const SweepRow& r) {
                write_csv_row(csv, r);
                csv.flush();
                std::cerr << to_string(r.point.predicted) << "  p=" << r.point.p << "  observed " << r.observed
                          << (r.mismatch ? "  MISMATCH" : "") << '\n';
            });
            json rows = json::array();
            for (const auto& r : sum.rows) rows.push_back(to_json(r));
            std::ofstream js(dir / "summary.json");
            js << json{{"config", to_json(cfg)}, {"mismatches", sum.mismatches}, {"rows", rows}}.dump(2) << '\n';
            std::cerr << sum.rows.size() << " rows, " << sum.mismatches << " mismatches\n";
            return sum.mismatches == 0 ? kOk : kMismatch;
        }
    } catch (const ConfigError& e) {
        std::cerr << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kMismatch;
    }
    return kUsage;
}
