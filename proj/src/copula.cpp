#include "ootune/copula.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ootune/normal.hpp"
#include "ootune/quadrature.hpp"

namespace ootune {

KendallRhoPair KendallRhoPair::from_kappa(double kappa) {
    return {kappa, std::sin(M_PI * kappa / 2.0)};
}

KendallRhoPair KendallRhoPair::from_rho(double rho) {
    return {(2.0 / M_PI) * std::asin(rho), rho};
}

double gaussian_conditional_cdf(double x, double z, double rho) {
    if (rho >= 1.0) {
        return x >= z ? 1.0 : 0.0;
    }
    if (rho <= -1.0) {
        return x >= 1.0 - z ? 1.0 : 0.0;
    }
    const double qx = std_normal_quantile(x);
    const double qz = std_normal_quantile(z);
    return std_normal_cdf((qx - rho * qz) / std::sqrt(1.0 - rho * rho));
}

double frank_conditional_cdf(double v, double u, double lambda) {
    if (std::abs(lambda) < 1e-8) {
        return v;
    }
    const double a = std::expm1(-lambda * u);
    const double b = std::expm1(-lambda * v);
    const double d = std::expm1(-lambda);
    return std::exp(-lambda * u) * b / (d + a * b);
}

double frank_kendall(double lambda) {
    if (std::abs(lambda) < 1e-8) {
        return 0.0;
    }
    if (lambda < 0.0) {
        return -frank_kendall(-lambda);
    }
    // First Debye function D1(lambda) = (1/lambda) int_0^lambda t/(e^t - 1) dt.
    static const GaussLegendre rule(64);
    const double integral = rule.integrate([&](double s) {
        const double t = s * lambda;
        return lambda * (t / std::expm1(t));
    });
    const double debye1 = integral / lambda;
    return 1.0 - (4.0 / lambda) * (1.0 - debye1);
}

CopulaModel CopulaModel::gaussian(double rho) {
    if (!(rho >= -1.0 && rho <= 1.0)) {
        throw std::domain_error("CopulaModel: rho must lie in [-1, 1]");
    }
    return CopulaModel(Family::Gaussian, rho);
}

CopulaModel CopulaModel::frank(double lambda) {
    if (!(std::isfinite(lambda)) || lambda == 0.0) {
        throw std::domain_error("CopulaModel: lambda must be finite nonzero");
    }
    return CopulaModel(Family::Frank, lambda);
}

double CopulaModel::kendall() const {
    if (family_ == Family::Gaussian) {
        return (2.0 / M_PI) * std::asin(parameter_);
    }
    return frank_kendall(parameter_);
}

KendallRhoPair CopulaModel::associated() const {
    return KendallRhoPair::from_kappa(kendall());
}

double CopulaModel::conditional_cdf(double v, double u) const {
    if (family_ == Family::Gaussian) {
        return gaussian_conditional_cdf(v, u, parameter_);
    }
    return frank_conditional_cdf(v, u, parameter_);
}

double CopulaModel::conditional_quantile(double p, double u) const {
    if (family_ == Family::Gaussian) {
        const double rho = parameter_;
        if (rho >= 1.0) {
            return u;
        }
        if (rho <= -1.0) {
            return 1.0 - u;
        }
        const double mean = rho * std_normal_quantile(u);
        const double sd = std::sqrt(1.0 - rho * rho);
        return std_normal_cdf(mean + sd * std_normal_quantile(p));
    }
    // Frank: exact conditional inversion by bisection; the conditional CDF
    // is strictly increasing in v.
    double lo = 0.0;
    double hi = 1.0;
    for (int iter = 0; iter < 60 && (hi - lo) > 1e-10; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (frank_conditional_cdf(mid, u, parameter_) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::pair<double, double> CopulaModel::sample_pair(SplitMix64& rng) const {
    if (family_ == Family::Gaussian) {
        const double rho = parameter_;
        if (rho >= 1.0) {
            const double u = rng.uniform01();
            return {u, u};
        }
        if (rho <= -1.0) {
            const double u = rng.uniform01();
            return {u, 1.0 - u};
        }
        const auto [g1, g2] = rng.normal_pair();
        const double z = g1;
        const double x = rho * g1 + std::sqrt(1.0 - rho * rho) * g2;
        return {std_normal_cdf(z), std_normal_cdf(x)};
    }
    const double u = rng.uniform01();
    const double p = rng.uniform01();
    return {u, conditional_quantile(p, u)};
}

std::vector<std::pair<double, double>> CopulaModel::sample(
    std::int64_t count, std::uint64_t seed) const {
    SplitMix64 rng(seed);
    std::vector<std::pair<double, double>> out;
    out.reserve(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i) {
        out.push_back(sample_pair(rng));
    }
    return out;
}

double estimate_nu(const CopulaModel& model, int grid) {
    if (grid < 100) {
        throw std::domain_error("estimate_nu: grid must be >= 100");
    }
    const double rho = model.associated().rho;
    const double sd = std::sqrt(std::max(0.0, 1.0 - rho * rho));
    std::vector<double> quantiles(grid);
    for (int i = 0; i < grid; ++i) {
        quantiles[i] = std_normal_quantile((i + 0.5) / grid);
    }
    double worst = 0.0;
    for (int i = 0; i < grid; ++i) {
        const double z = (i + 0.5) / grid;
        const double shift = rho * quantiles[i];
        for (int j = 0; j < grid; ++j) {
            const double x = (j + 0.5) / grid;
            const double gauss =
                sd > 0.0 ? std_normal_cdf((quantiles[j] - shift) / sd)
                         : (x >= z ? 1.0 : 0.0);
            const double diff = gauss - model.conditional_cdf(x, z);
            worst = std::max(worst, diff);
        }
    }
    return worst;
}

}  // namespace ootune
