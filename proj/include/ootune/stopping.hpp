#pragma once

#include <cstdint>
#include <optional>

#include "ootune/success_bound.hpp"

namespace ootune {

// Inputs of a stopping-time bound evaluation: the true parameter pair
// (alpha0, rho0) together with the algorithm settings.
struct StoppingBoundQuery {
    std::int64_t n;
    double alpha0;
    double rho0;
    double delta;
    double beta1;
    double beta2;
};

// Lower bound on Pr(tau <= n) at an explicit certifiable pair
// (alpha_star, rho_star):
//   1 - exp(-2n (alpha0 - alpha* - b1)^2)
//     - exp(-floor(n/2) 2 (rho0 - rho* - b2)^2 / pi^2).
// Requires both gaps positive and p_hat_success(n, 1, alpha*, rho*) >= 1-delta;
// otherwise the bound carries no information and nullopt is returned. An
// engaged value may be negative (still uninformative numerically) but never
// exceeds 1.
std::optional<double> stopping_cdf_lower_bound(const StoppingBoundQuery& query,
                                               double alpha_star,
                                               double rho_star);

// Coefficients of the level-set quadratic
// d1 rho^2 + d2 Phi^-1(alpha) rho + d3 Phi^-1(alpha)^2 + d4 = 0,
// the curve p_hat_success_omega(n, 1, alpha, rho) = 1 - delta.
struct ParetoCoefficients {
    double d1;
    double d2;
    double d3;
    double d4;
    double omega;
    std::int64_t n;
    double delta;
};

ParetoCoefficients pareto_coefficients(const OmegaConstants& constants,
                                       std::int64_t n, double delta);

// Front solved for rho at a given alpha (positive quadratic root); nullopt
// when the discriminant is negative, i.e. no front point at this alpha.
std::optional<double> rho_on_front(double alpha,
                                   const ParetoCoefficients& coeffs);

// Front solved for alpha at a given rho; mirror of rho_on_front with Phi
// applied to the positive root.
std::optional<double> alpha_on_front(double rho,
                                     const ParetoCoefficients& coeffs);

// Residual of the quadratic form at (alpha, rho); 0 on the front.
double front_residual(double alpha, double rho,
                      const ParetoCoefficients& coeffs);

// The inner feasible interval A'_omega = [alpha_omega(rho0 - b2), alpha0 - b1].
struct FrontInterval {
    double alpha_lo;
    double alpha_hi;
};

std::optional<FrontInterval> front_interval(const ParetoCoefficients& coeffs,
                                            const StoppingBoundQuery& query);

// Two-exponential objective along the front at a fixed omega; +infinity when
// alpha_star has no admissible front point.
double stopping_inner_objective(double alpha_star,
                                const ParetoCoefficients& coeffs,
                                const StoppingBoundQuery& query);

// Fully optimised bound: 1 - inf over admissible omega of the minimum of
// the inner objective over A'_omega. nullopt when every A'_omega is empty
// (the bound carries no information at this n).
std::optional<double> optimized_stopping_bound(const StoppingBoundQuery& query);

// Same optimisation with the optimising point exposed for diagnostics.
struct StoppingBoundDetail {
    bool informative;
    double value;
    double omega;
    double alpha_star;
    double rho_star;
};

StoppingBoundDetail optimized_stopping_bound_detail(
    const StoppingBoundQuery& query);

// Scenario-approach sample count ceil((2/eps) log(1/eta) + 2d +
// (2d/eps) log(2/eps)).
std::int64_t scenario_sample_bound(double epsilon, double eta, std::int64_t d);

// Smallest rho0 at which the optimised bound at sample count n reaches 1/2.
double median_crossing_rho(std::int64_t n, double alpha0, double delta,
                           double beta1, double beta2);

}  // namespace ootune
