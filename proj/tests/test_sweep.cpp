#include <gtest/gtest.h>

#include <sstream>

#include "fhlab/sweep.hpp"

using namespace fhlab;

namespace {

std::string error_of(const std::string& text) {
    try {
        parse_sweep_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Config, DefaultsFromEmptyObject) {
    const SweepConfig c = parse_sweep_config("{}");
    EXPECT_EQ(c.N, 3);
    EXPECT_EQ(c.lattice.M, 32);
    EXPECT_EQ(c.output_dir, "sweep_out");
}

TEST(Config, FullRoundTrip) {
    const SweepConfig c = parse_sweep_config(R"({"N": 2, "s": [0.3, 0.6], "lambda_fractions": [0.25],
        "p_per_band": 2, "lattice": {"L": 5, "M": 16, "T": 4, "K": 16},
        "solver": {"cap": 1e5, "escape_factor": 8, "max_iter": 10, "tol": 1e-5},
        "forcing": {"blowup_amplitude": 2, "data_fraction": 0.4}, "threads": 2, "seed": 9, "output_dir": "x"})");
    EXPECT_EQ(c.N, 2);
    EXPECT_EQ(c.s.size(), 2u);
    EXPECT_EQ(c.lattice.K, 16);
    EXPECT_EQ(c.max_iter, 10);
    EXPECT_DOUBLE_EQ(c.data_fraction, 0.4);
    const SweepConfig d = parse_sweep_config(to_json(c).dump());
    EXPECT_EQ(to_json(d), to_json(c));
}

TEST(Config, ParseErrorCarriesLine) {
    const std::string e = error_of("{\n  \"N\": 3,\n  \"s\": [0.5,,]\n}");
    EXPECT_NE(e.find("line 3"), std::string::npos) << e;
}

TEST(Config, UnknownKeyCarriesLine) {
    const std::string e = error_of("{\n  \"N\": 3,\n\n  \"bogus\": 1\n}");
    EXPECT_NE(e.find("bogus"), std::string::npos);
    EXPECT_NE(e.find("line 4"), std::string::npos) << e;
    const std::string nested = error_of("{\n \"lattice\": {\n  \"Q\": 1}}");
    EXPECT_NE(nested.find("line 3"), std::string::npos) << nested;
}

TEST(Config, SemanticErrorsCarryLine) {
    EXPECT_NE(error_of("{\n\"s\": [1.5]}").find("line 2"), std::string::npos);
    EXPECT_NE(error_of("{\"N\": \"three\"}").find("wrong type"), std::string::npos);
    EXPECT_NE(error_of("{\n\n\"lambda_fractions\": [1.0]}").find("line 3"), std::string::npos);
    EXPECT_NE(error_of("{\"lattice\": {\"M\": 48}}").find("power of two"), std::string::npos);
    EXPECT_FALSE(error_of("[1, 2]").empty());
    EXPECT_FALSE(error_of("{\"forcing\": {\"data_fraction\": 1.0}}").empty());
    EXPECT_THROW(load_sweep_config("/nonexistent/cfg.json"), ConfigError);
}

TEST(Bands, SamplesStayInside) {
    const auto v = band_samples(2.0, 3.0, 4);
    ASSERT_EQ(v.size(), 4u);
    for (double p : v) {
        EXPECT_GT(p, 2.0 * (1 + 1e-3));
        EXPECT_LT(p, 3.0 * (1 - 1e-3));
    }
    EXPECT_TRUE(std::is_sorted(v.begin(), v.end()));
    EXPECT_THROW(band_samples(3.0, 2.0, 1), std::invalid_argument);
    EXPECT_THROW(band_samples(1.0, 1.0015, 1), std::invalid_argument);
}

TEST(Bands, PointsCoverEachRegime) {
    SweepConfig c;
    c.s = {0.3, 0.5};
    c.lambda_fractions = {0.2, 0.8};
    c.p_per_band = 3;
    const auto pts = sweep_points(c);
    ASSERT_EQ(pts.size(), 2u * 2u * 3u * 3u);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Regime want = i % 9 < 3 ? Regime::BlowUp : i % 9 < 6 ? Regime::ConditionalGlobal : Regime::NonExistence;
        EXPECT_EQ(pts[i].predicted, want) << i;
        const ExponentBundle e = exponents_at(pts[i].N, pts[i].s, pts[i].lambda);
        EXPECT_EQ(classify_regime(pts[i].p, e), pts[i].predicted);
        EXPECT_GT(pts[i].p, 1.0);
    }
}

TEST(Verdicts, ExpectedPerRegime) {
    EXPECT_EQ(expected_verdict(Regime::BlowUp), "NormEscape");
    EXPECT_EQ(expected_verdict(Regime::NonExistence), "NormEscape");
    EXPECT_EQ(expected_verdict(Regime::ConditionalGlobal), "ConvergedBelowCap");
}

TEST(Csv, ExactHeader) {
    std::ostringstream os;
    write_csv_header(os);
    EXPECT_EQ(os.str(), "N,s,lambda,p,mu,p_plus,F_las,F_tilde,predicted,observed,escape_time,final_norm\n");
    EXPECT_EQ(csv_columns().size(), 12u);
}

TEST(Csv, RowHasOneFieldPerColumn) {
    SweepRow r;
    r.point = SweepPoint{3, 0.5, 0.3, 2.0, Regime::ConditionalGlobal};
    r.exps = exponents_at(3, 0.5, 0.3);
    r.observed = "ConvergedBelowCap";
    std::ostringstream os;
    write_csv_row(os, r);
    const std::string line = os.str();
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 11);
    EXPECT_NE(line.find("ConditionalGlobal,ConvergedBelowCap"), std::string::npos);
}

TEST(Sweep, SmallTwoDimensionalRunInOrder) {
    SweepConfig c = parse_sweep_config(R"({"N": 2, "lattice": {"L": 6, "M": 32, "T": 6, "K": 32}, "threads": 2})");
    std::vector<double> seen;
    const SweepSummary sum = run_sweep(c, [&](const SweepRow& r) { seen.push_back(r.point.p); });
    ASSERT_EQ(sum.rows.size(), 3u);
    ASSERT_EQ(seen.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(seen[i], sum.rows[i].point.p);
    EXPECT_TRUE(std::is_sorted(seen.begin(), seen.end()));
    for (const auto& r : sum.rows) EXPECT_EQ(r.observed, expected_verdict(r.point.predicted)) << r.point.p;
    EXPECT_EQ(sum.mismatches, 0);
}
