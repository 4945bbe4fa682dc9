#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace fhlab {

struct CheckReport {
    std::string id;
    bool passed = false;
    double worst_margin = 0.0;  // >= -tolerance iff passed
    int samples = 0;
    double tolerance = 0.0;
    nlohmann::json params;
};

struct CheckConfig {
    std::uint64_t seed = 1;
    int functions = 20;  // test functions (or random draws) per check
    int N = 3;
    double s = 0.5;
    double lambda_fraction = 0.5;
    double kato_m = 2.0;
};

class UnknownCheck : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Every registered id, in suite order.
const std::vector<std::string>& check_catalog();
bool is_check(const std::string& id);

// Throws UnknownCheck for an id outside the catalog.
CheckReport run_check(const std::string& id, const CheckConfig& cfg = {});

// Runs the ids on up to `threads` workers; the result order follows `ids`.
std::vector<CheckReport> run_suite(const std::vector<std::string>& ids, const CheckConfig& cfg = {},
                                   int threads = 1);

nlohmann::json to_json(const CheckReport& r);
nlohmann::json to_json(const std::vector<CheckReport>& rs);

// ---- seeded test functions ----

enum class Family { Gaussian, Bump, TrigEnvelope };

// Nonnegative smooth function of x, optionally times a profile in t.
// Gaussian: exp(-|x-c|^2/w^2). Bump: exp(1 - 1/(1-|x-c|^2/w^2)) inside |x-c| < w.
// TrigEnvelope: exp(-|x-c|^2/w^2) (1 + sum_k a_k cos(k.x + b_k)) with sum |a_k| <= 1/2.
struct TestFunction {
    Family family = Family::Gaussian;
    int N = 2;
    std::vector<double> center;
    double width = 1.0;
    std::vector<std::vector<double>> waves;  // frequency vectors
    std::vector<double> amps, phases;
    double t_center = 0.0;
    double t_width = 1.0;

    double space(std::span<const double> x) const;
    double time(double t) const;
    double operator()(std::span<const double> x, double t) const { return space(x) * time(t); }
    // Radius beyond which space() is negligible (exactly zero for bumps).
    double support_radius() const;
    // Earliest time with a non-negligible value.
    double support_t0() const;
    // Length scale on which the function varies.
    double feature() const;
};

// Family cycles with index; parameters are drawn from rng.
TestFunction draw_test_function(int N, int index, std::mt19937_64& rng);

// K(sigma) = integral over the unit sphere of |e - sigma y'|^{-mu}.
double radial_K(int N, double mu, double sigma);
// Independent closed form: hypergeometric series for sigma != 1, Beta integral at 1.
double radial_K_reference(int N, double mu, double sigma);

}  // namespace fhlab
