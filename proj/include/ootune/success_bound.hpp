#pragma once

#include <cstdint>

#include "ootune/copula.hpp"
#include "ootune/quadrature.hpp"

namespace ootune {

// Constants attached to a bound angle omega in (0, pi/2):
// c1 = 1/2 - omega/pi in (0, 1/2) and c2 = cot(omega)/(pi - 2 omega) > 0.
struct OmegaConstants {
    double omega;
    double c1;
    double c2;

    explicit OmegaConstants(double omega);
};

struct MuSigma {
    double mu;        // mu_n = -sqrt(log(n c1) / c2)
    double sigma_sq;  // sigma_n^2 = -log log 2 / (2 c2 (log(n c1) - log log 2))
};

// Throws std::domain_error when n * c1 <= 1 (inadmissible pair).
MuSigma mu_sigma(std::int64_t n, const OmegaConstants& constants);

// Upper end of the admissible omega set {omega : n c1(omega) >= 2}; the set
// is (0, upper] and is empty when the returned value is <= 0 (n <= 4).
double omega_admissible_upper(std::int64_t n);

// Parameter bundle for bound evaluations. The bound itself holds uniformly
// over m in [1, n], so m never enters the formula.
struct BoundParams {
    std::int64_t n;
    std::int64_t m = 1;
    double alpha;
    double rho;
    double delta = 0.0;
    double beta1 = 0.0;
    double beta2 = 0.0;
};

// Certified lower bound at a fixed omega:
// Phi((Phi^-1(alpha) - rho mu_n) / sqrt(1 - rho^2 + rho^2 sigma_n^2)).
// Phi^-1(1) is capped at +8.2 so alpha = 1 stays total.
double p_hat_success_omega(std::int64_t n, double alpha, double rho,
                           const OmegaConstants& constants);

struct OptimizedBound {
    double p;          // 0 when no omega is admissible
    double omega;      // argmax over the admissible set; NaN when empty
    bool admissible;   // false <=> the admissible omega set was empty
};

// sup over the admissible omega set of p_hat_success_omega. The admissible
// set is taken as {omega in (0, pi/2) : n c1(omega) >= 2}; the domination
// test suite against the quadrature oracle arbitrates its validity.
OptimizedBound p_hat_success(std::int64_t n, double alpha, double rho);
OptimizedBound p_hat_success(const BoundParams& params);

// Exact success probability for the Gaussian copula at m = 1 by quadrature:
// int_0^1 Pr(X' <= alpha | Z = z) f_{U_{1:n}}(z) dz.
double p_success_gaussian_oracle(std::int64_t n, double alpha, double rho);
double p_success_gaussian_oracle(std::int64_t n, double alpha, double rho,
                                 const GaussLegendre& rule);

struct McEstimate {
    double estimate;
    double std_error;
    std::int64_t trials;
};

// Monte-Carlo success probability for any copula model: per trial, draw n
// pairs, keep the v-values paired with the m smallest u-values, and count
// success when their minimum is at or below alpha (the alpha-quantile in
// uniform marginals is alpha itself). Trials with distinct seeds may be
// merged by count.
McEstimate p_success_mc_oracle(const CopulaModel& model, std::int64_t n,
                               std::int64_t m, double alpha,
                               std::int64_t trials, std::uint64_t seed);

}  // namespace ootune
