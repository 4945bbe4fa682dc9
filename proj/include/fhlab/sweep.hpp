#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fhlab/spectral_constants.hpp"

namespace fhlab {

// Parse or validation failure; what() carries "line L, column C" when known.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct LatticeSpec {
    double L = 6.0;
    int M = 32;
    double T = 6.0;  // horizon
    int K = 48;
};

struct SweepConfig {
    int N = 3;
    std::vector<double> s{0.5};
    std::vector<double> lambda_fractions{0.5};
    int p_per_band = 1;
    LatticeSpec lattice;
    double cap = 1e6;
    double escape_factor = 10.0;
    int max_iter = 64;
    double tol = 1e-6;
    double blowup_amplitude = 1.0;  // bump amplitude outside the conditional band
    double data_fraction = 0.5;     // fraction of the largest certified bump amplitude
    int threads = 1;
    std::uint64_t seed = 1;
    std::string output_dir = "sweep_out";
};

SweepConfig parse_sweep_config(const std::string& text);
SweepConfig load_sweep_config(const std::string& path);
nlohmann::json to_json(const SweepConfig& cfg);

struct SweepPoint {
    int N = 3;
    double s = 0.5;
    double lambda = 0.0;
    double p = 2.0;
    Regime predicted = Regime::BlowUp;
};

// n interior points of (lo, hi), kept at least 1e-3 relative away from both ends.
std::vector<double> band_samples(double lo, double hi, int n);
// Points for every (s, fraction) in the blow-up, conditional and non-existence bands.
// The non-existence band is (p_+, p_+ + (p_+ - F)).
std::vector<SweepPoint> sweep_points(const SweepConfig& cfg);

struct SweepRow {
    SweepPoint point;
    ExponentBundle exps;
    std::string observed;  // solver verdict, or NoCertificate
    bool mismatch = false;
    double escape_time = -1.0;
    double final_norm = 0.0;
    nlohmann::json evidence;
};

// Verdict the solver should reach in each band.
std::string expected_verdict(Regime r);

SweepRow run_point(const SweepPoint& pt, const SweepConfig& cfg);

const std::vector<std::string>& csv_columns();
void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, const SweepRow& row);
nlohmann::json to_json(const SweepRow& row);

struct SweepSummary {
    std::vector<SweepRow> rows;
    int mismatches = 0;
};

// Runs the points on cfg.threads workers; rows reach `sink` in point order from one thread.
SweepSummary run_sweep(const SweepConfig& cfg, const std::function<void(const SweepRow&)>& sink = {});

}  // namespace fhlab
