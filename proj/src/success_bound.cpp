#include "ootune/success_bound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ootune/golden.hpp"
#include "ootune/normal.hpp"

namespace ootune {

namespace {

// Beyond double-precision CDF resolution; keeps alpha = 1 total.
constexpr double kQuantileCap = 8.2;

double capped_quantile(double p) {
    if (p >= 1.0) {
        return kQuantileCap;
    }
    return std_normal_quantile(p);
}

}  // namespace

double omega_admissible_upper(std::int64_t n) {
    return M_PI * (0.5 - 2.0 / static_cast<double>(n));
}

OmegaConstants::OmegaConstants(double omega_in) : omega(omega_in) {
    if (!(omega > 0.0 && omega < M_PI_2)) {
        throw std::domain_error("OmegaConstants: omega must lie in (0, pi/2)");
    }
    c1 = 0.5 - omega / M_PI;
    c2 = (std::cos(omega) / std::sin(omega)) / (M_PI - 2.0 * omega);
}

MuSigma mu_sigma(std::int64_t n, const OmegaConstants& constants) {
    const double nc1 = static_cast<double>(n) * constants.c1;
    if (!(nc1 > 1.0)) {
        throw std::domain_error("mu_sigma: inadmissible, requires n c1 > 1");
    }
    const double log_nc1 = std::log(nc1);
    const double log_log2 = std::log(std::log(2.0));  // negative
    const double mu = -std::sqrt(log_nc1 / constants.c2);
    const double sigma_sq =
        -log_log2 / (2.0 * constants.c2 * (log_nc1 - log_log2));
    return {mu, sigma_sq};
}

double p_hat_success_omega(std::int64_t n, double alpha, double rho,
                           const OmegaConstants& constants) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw std::domain_error("p_hat_success_omega: alpha must be in (0, 1]");
    }
    if (!(rho > 0.0 && rho <= 1.0)) {
        throw std::domain_error("p_hat_success_omega: rho must be in (0, 1]");
    }
    const MuSigma ms = mu_sigma(n, constants);
    const double numerator = capped_quantile(alpha) - rho * ms.mu;
    const double denominator =
        std::sqrt(1.0 - rho * rho + rho * rho * ms.sigma_sq);
    return std_normal_cdf(numerator / denominator);
}

OptimizedBound p_hat_success(std::int64_t n, double alpha, double rho) {
    const double hi = omega_admissible_upper(n);
    if (!(hi > 0.0)) {
        return {0.0, std::numeric_limits<double>::quiet_NaN(), false};
    }
    const auto value_at = [&](double omega) {
        return p_hat_success_omega(n, alpha, rho, OmegaConstants(omega));
    };

    // Coarse log-spaced scan, then golden-section refinement around the
    // best bracket; deterministic for identical inputs.
    constexpr int kScan = 64;
    const double lo = hi * 1e-4;
    const double ratio = std::pow(hi / lo, 1.0 / (kScan - 1));
    std::vector<double> omegas(kScan);
    double best_omega = lo;
    double best_value = -1.0;
    int best_index = 0;
    double omega = lo;
    for (int i = 0; i < kScan; ++i) {
        omegas[i] = std::min(omega, hi);
        const double value = value_at(omegas[i]);
        if (value > best_value) {
            best_value = value;
            best_omega = omegas[i];
            best_index = i;
        }
        omega *= ratio;
    }
    const double bracket_lo = omegas[std::max(0, best_index - 1)];
    const double bracket_hi = omegas[std::min(kScan - 1, best_index + 1)];
    if (bracket_hi > bracket_lo) {
        const MaxResult refined = maximize_quasiconcave(
            value_at, bracket_lo, bracket_hi, 1e-10 * hi);
        if (refined.value > best_value) {
            best_value = refined.value;
            best_omega = refined.argmax;
        }
    }
    return {best_value, best_omega, true};
}

OptimizedBound p_hat_success(const BoundParams& params) {
    return p_hat_success(params.n, params.alpha, params.rho);
}

double p_success_gaussian_oracle(std::int64_t n, double alpha, double rho) {
    return p_success_gaussian_oracle(n, alpha, rho,
                                     GaussLegendre::shared256());
}

double p_success_gaussian_oracle(std::int64_t n, double alpha, double rho,
                                 const GaussLegendre& rule) {
    if (n < 1) {
        throw std::domain_error("p_success_gaussian_oracle: n must be >= 1");
    }
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw std::domain_error(
            "p_success_gaussian_oracle: alpha must be in (0, 1]");
    }
    if (alpha >= 1.0) {
        return 1.0;
    }
    if (rho >= 1.0) {
        // Degenerate comonotone conditional: indicator {alpha >= z}.
        return 1.0 - std::pow(1.0 - alpha, static_cast<double>(n));
    }
    if (rho <= -1.0) {
        throw std::domain_error(
            "p_success_gaussian_oracle: rho must exceed -1");
    }
    if (rho == 0.0) {
        return alpha;
    }
    const double q_alpha = std_normal_quantile(alpha);
    const double sd = std::sqrt(1.0 - rho * rho);
    return integrate_beta_weighted(
        [&](double z) {
            return std_normal_cdf((q_alpha - rho * std_normal_quantile(z)) /
                                  sd);
        },
        n, rule);
}

McEstimate p_success_mc_oracle(const CopulaModel& model, std::int64_t n,
                               std::int64_t m, double alpha,
                               std::int64_t trials, std::uint64_t seed) {
    if (trials < 1 || n < 1 || m < 1 || m > n) {
        throw std::domain_error("p_success_mc_oracle: invalid n, m or trials");
    }
    SplitMix64 rng(seed);
    std::int64_t successes = 0;
    if (m == 1) {
        for (std::int64_t t = 0; t < trials; ++t) {
            double best_u = 2.0;
            double selected_v = 0.0;
            for (std::int64_t i = 0; i < n; ++i) {
                const auto [u, v] = model.sample_pair(rng);
                if (u < best_u) {
                    best_u = u;
                    selected_v = v;
                }
            }
            successes += (selected_v <= alpha);
        }
    } else {
        std::vector<std::pair<double, double>> selected;
        for (std::int64_t t = 0; t < trials; ++t) {
            selected.clear();
            for (std::int64_t i = 0; i < n; ++i) {
                selected.push_back(model.sample_pair(rng));
            }
            std::nth_element(selected.begin(),
                             selected.begin() + (m - 1), selected.end());
            bool success = false;
            for (std::int64_t i = 0; i < m; ++i) {
                success = success ||
                          (selected[static_cast<std::size_t>(i)].second <=
                           alpha);
            }
            successes += success;
        }
    }
    const double estimate =
        static_cast<double>(successes) / static_cast<double>(trials);
    const double std_error = std::sqrt(
        std::max(estimate * (1.0 - estimate), 1e-12) /
        static_cast<double>(trials));
    return {estimate, std_error, trials};
}

}  // namespace ootune
