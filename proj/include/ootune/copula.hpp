#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ootune/rng.hpp"

namespace ootune {

// Kendall correlation paired with the correlation of the associated
// bivariate Gaussian copula, rho = sin(pi * kappa / 2) by construction.
struct KendallRhoPair {
    double kappa;
    double rho;

    static KendallRhoPair from_kappa(double kappa);
    static KendallRhoPair from_rho(double rho);
};

// Conditional CDF of the bivariate Gaussian copula,
// Pr(V <= x | U = z) = Phi((Phi^-1(x) - rho Phi^-1(z)) / sqrt(1 - rho^2)).
// For rho = +-1 the conditional degenerates to an indicator.
double gaussian_conditional_cdf(double x, double z, double rho);

// Conditional CDF dC/du of the bivariate Frank copula. |lambda| < 1e-8 is
// treated as the independence limit and returns v.
double frank_conditional_cdf(double v, double u, double lambda);

// Population Kendall correlation of the Frank copula,
// kappa = 1 - (4/lambda)(1 - D1(lambda)) with D1 the first Debye function.
double frank_kendall(double lambda);

class CopulaModel {
public:
    enum class Family { Gaussian, Frank };

    static CopulaModel gaussian(double rho);
    static CopulaModel frank(double lambda);

    Family family() const { return family_; }
    double parameter() const { return parameter_; }

    double kendall() const;
    KendallRhoPair associated() const;

    // Pr(V <= v | U = u).
    double conditional_cdf(double v, double u) const;

    // Inverse of the conditional CDF in v; used for conditional sampling
    // and for a fresh test draw given an observed u.
    double conditional_quantile(double p, double u) const;

    std::pair<double, double> sample_pair(SplitMix64& rng) const;
    std::vector<std::pair<double, double>> sample(std::int64_t count,
                                                  std::uint64_t seed) const;

private:
    CopulaModel(Family family, double parameter)
        : family_(family), parameter_(parameter) {}

    Family family_;
    double parameter_;
};

// Largest deficit of the model's conditional CDF against its associated
// Gaussian copula over a grid x grid midpoint lattice of (z, x) in (0,1)^2,
// clamped below at 0. A finite-lattice lower estimate of the true sup;
// refine the grid to check stability.
double estimate_nu(const CopulaModel& model, int grid);

}  // namespace ootune
