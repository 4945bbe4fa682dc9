#pragma once

#include <string>

namespace fhlab {

// Gamma function, Lanczos g=7 with reflection below 0.5.
double gamma_fn(double x);

double lambda_max(int N, double s);
double upsilon(double alpha, int N, double s);
double upsilon_inv(double lambda, int N, double s);

struct ProblemSpec {
    int N = 3;
    double s = 0.5;
    double lambda = 0.0;
    double p = 2.0;
};

// Validates N >= 2, N > 2s, 0 < s < 1, 0 < lambda < Lambda_{N,s}, p > 1.
ProblemSpec make_problem(int N, double s, double lambda, double p);

struct ExponentBundle {
    double lambda_max = 0.0;
    double alpha = 0.0;
    double mu = 0.0;
    double p_plus = 0.0;
    double fujita_F = 0.0;
    double fujita_F_tilde = 0.0;
    double fujita_F0 = 0.0;
    double kappa_s = 0.0;
    double a_Ns = 0.0;
};

ExponentBundle exponents(const ProblemSpec& spec);
// Same bundle for a bare (N, s, lambda) triple; lambda may equal Lambda_{N,s}.
ExponentBundle exponents_at(int N, double s, double lambda);

double kappa_s(double s);
double a_Ns(int N, double s);

enum class Regime { BlowUp, ConditionalGlobal, NonExistence, CriticalOpen };

Regime classify_regime(double p, const ExponentBundle& b);
std::string to_string(Regime r);

}  // namespace fhlab
