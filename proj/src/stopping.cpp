#include "ootune/stopping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ootune/estimation.hpp"
#include "ootune/golden.hpp"
#include "ootune/normal.hpp"

namespace ootune {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

double two_exponential_bound(const StoppingBoundQuery& query, double gap_a,
                             double gap_r) {
    const double n = static_cast<double>(query.n);
    const double half = static_cast<double>(query.n / 2);
    const double term_a = std::exp(-2.0 * n * gap_a * gap_a);
    const double term_r =
        std::exp(-half * 2.0 * gap_r * gap_r / (M_PI * M_PI));
    return 1.0 - term_a - term_r;
}

}  // namespace

std::optional<double> stopping_cdf_lower_bound(const StoppingBoundQuery& query,
                                               double alpha_star,
                                               double rho_star) {
    if (!(alpha_star > 0.0 && alpha_star <= 1.0) ||
        !(rho_star > 0.0 && rho_star <= 1.0)) {
        return std::nullopt;
    }
    const ConfidenceWidths widths =
        confidence_widths(query.n, query.beta1, query.beta2);
    const double gap_a = query.alpha0 - alpha_star - widths.b1;
    const double gap_r = query.rho0 - rho_star - widths.b2;
    if (!(gap_a > 0.0) || !(gap_r > 0.0)) {
        return std::nullopt;
    }
    const OptimizedBound certified =
        p_hat_success(query.n, alpha_star, rho_star);
    if (!certified.admissible || certified.p < 1.0 - query.delta - 1e-12) {
        return std::nullopt;
    }
    return two_exponential_bound(query, gap_a, gap_r);
}

ParetoCoefficients pareto_coefficients(const OmegaConstants& constants,
                                       std::int64_t n, double delta) {
    mu_sigma(n, constants);  // admissibility gate
    const double c2 = constants.c2;
    const double log_nc1 = std::log(static_cast<double>(n) * constants.c1);
    const double log_log2 = std::log(std::log(2.0));
    const double t = delta == 0.5 ? 0.0 : std_normal_quantile(1.0 - delta);
    const double t2 = t * t;

    const double d1 = -2.0 * log_nc1 * log_nc1 / log_log2 + 2.0 * log_nc1 -
                      2.0 * c2 * t2 * log_nc1 / log_log2 + 2.0 * c2 * t2 - t2;
    const double d2 = -4.0 * std::sqrt(c2) * std::pow(log_nc1, 1.5) / log_log2 +
                      4.0 * std::sqrt(c2) * std::sqrt(log_nc1);
    const double d3 = -2.0 * c2 * log_nc1 / log_log2 + 2.0 * c2;
    const double d4 = 2.0 * c2 * t2 * log_nc1 / log_log2 - 2.0 * c2 * t2;

    // The level-set quadratic is the squared front equation scaled by a
    // positive factor, so d3 > 0 whenever (n, omega) is admissible.
    if (!(d3 > 0.0)) {
        throw std::logic_error("pareto_coefficients: d3 must be positive");
    }
    return {d1, d2, d3, d4, constants.omega, n, delta};
}

std::optional<double> rho_on_front(double alpha,
                                   const ParetoCoefficients& coeffs) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        return std::nullopt;
    }
    const double q = std_normal_quantile(alpha);
    const double b = coeffs.d2 * q;
    const double c = coeffs.d3 * q * q + coeffs.d4;
    const double disc = b * b - 4.0 * coeffs.d1 * c;
    if (disc < 0.0) {
        return std::nullopt;
    }
    return (-b + std::sqrt(disc)) / (2.0 * coeffs.d1);
}

std::optional<double> alpha_on_front(double rho,
                                     const ParetoCoefficients& coeffs) {
    if (!(rho > 0.0 && rho <= 1.0)) {
        return std::nullopt;
    }
    const double b = coeffs.d2 * rho;
    const double c = coeffs.d1 * rho * rho + coeffs.d4;
    const double disc = b * b - 4.0 * coeffs.d3 * c;
    if (disc < 0.0) {
        return std::nullopt;
    }
    const double q = (-b + std::sqrt(disc)) / (2.0 * coeffs.d3);
    return std_normal_cdf(q);
}

double front_residual(double alpha, double rho,
                      const ParetoCoefficients& coeffs) {
    const double q = std_normal_quantile(alpha);
    return coeffs.d1 * rho * rho + coeffs.d2 * q * rho + coeffs.d3 * q * q +
           coeffs.d4;
}

std::optional<FrontInterval> front_interval(const ParetoCoefficients& coeffs,
                                            const StoppingBoundQuery& query) {
    const ConfidenceWidths widths =
        confidence_widths(query.n, query.beta1, query.beta2);
    const double alpha_hi = query.alpha0 - widths.b1;
    const double rho_cap = query.rho0 - widths.b2;
    if (!(alpha_hi > 0.0) || !(rho_cap > 0.0)) {
        return std::nullopt;
    }
    const std::optional<double> alpha_lo =
        alpha_on_front(std::min(rho_cap, 1.0), coeffs);
    if (!alpha_lo.has_value() || !(*alpha_lo < alpha_hi)) {
        return std::nullopt;
    }
    return FrontInterval{*alpha_lo, alpha_hi};
}

double stopping_inner_objective(double alpha_star,
                                const ParetoCoefficients& coeffs,
                                const StoppingBoundQuery& query) {
    const ConfidenceWidths widths =
        confidence_widths(query.n, query.beta1, query.beta2);
    const double gap_a = query.alpha0 - alpha_star - widths.b1;
    const std::optional<double> rho_star = rho_on_front(alpha_star, coeffs);
    if (!rho_star.has_value() || !(*rho_star > 0.0) || !(*rho_star <= 1.0)) {
        return kInfinity;
    }
    const double gap_r = query.rho0 - *rho_star - widths.b2;
    if (!(gap_a >= 0.0) || !(gap_r >= 0.0)) {
        return kInfinity;
    }
    const double n = static_cast<double>(query.n);
    const double half = static_cast<double>(query.n / 2);
    return std::exp(-2.0 * n * gap_a * gap_a) +
           std::exp(-half * 2.0 * gap_r * gap_r / (M_PI * M_PI));
}

namespace {

struct InnerMin {
    double objective = kInfinity;
    double alpha_star = 0.0;
};

InnerMin inner_minimum(double omega, const StoppingBoundQuery& query) {
    const ParetoCoefficients coeffs =
        pareto_coefficients(OmegaConstants(omega), query.n, query.delta);
    const std::optional<FrontInterval> interval =
        front_interval(coeffs, query);
    if (!interval.has_value()) {
        return {};
    }
    const auto inner = [&](double alpha_star) {
        return stopping_inner_objective(alpha_star, coeffs, query);
    };
    InnerMin best;
    for (double endpoint : {interval->alpha_lo, interval->alpha_hi}) {
        const double value = inner(endpoint);
        if (value < best.objective) {
            best = {value, endpoint};
        }
    }
    if (interval->alpha_hi > interval->alpha_lo) {
        const MinResult refined = minimize_quasiconvex(
            inner, interval->alpha_lo, interval->alpha_hi,
            1e-10 * (interval->alpha_hi - interval->alpha_lo));
        if (refined.value < best.objective) {
            best = {refined.value, refined.argmin};
        }
    }
    return best;
}

}  // namespace

StoppingBoundDetail optimized_stopping_bound_detail(
    const StoppingBoundQuery& query) {
    StoppingBoundDetail detail{false, 0.0, 0.0, 0.0, 0.0};
    const double omega_hi = omega_admissible_upper(query.n);
    if (!(omega_hi > 0.0)) {
        return detail;
    }

    constexpr int kScan = 64;
    const double omega_lo = omega_hi * 1e-4;
    const double ratio = std::pow(omega_hi / omega_lo, 1.0 / (kScan - 1));
    std::vector<double> omegas(kScan);
    double best = kInfinity;
    double best_omega = omega_lo;
    int best_index = -1;
    double omega = omega_lo;
    for (int i = 0; i < kScan; ++i) {
        omegas[i] = std::min(omega, omega_hi);
        const double value = inner_minimum(omegas[i], query).objective;
        if (value < best) {
            best = value;
            best_omega = omegas[i];
            best_index = i;
        }
        omega *= ratio;
    }
    if (best_index >= 0) {
        const double lo = omegas[std::max(0, best_index - 1)];
        const double hi = omegas[std::min(kScan - 1, best_index + 1)];
        if (hi > lo) {
            const MinResult refined = minimize_quasiconvex(
                [&](double w) { return inner_minimum(w, query).objective; },
                lo, hi, 1e-10 * omega_hi);
            if (refined.value < best) {
                best = refined.value;
                best_omega = refined.argmin;
            }
        }
    }
    if (!std::isfinite(best)) {
        return detail;
    }
    const InnerMin at_best = inner_minimum(best_omega, query);
    const ParetoCoefficients coeffs = pareto_coefficients(
        OmegaConstants(best_omega), query.n, query.delta);
    detail.informative = true;
    detail.value = 1.0 - best;
    detail.omega = best_omega;
    detail.alpha_star = at_best.alpha_star;
    detail.rho_star = rho_on_front(at_best.alpha_star, coeffs).value_or(0.0);
    return detail;
}

std::optional<double> optimized_stopping_bound(
    const StoppingBoundQuery& query) {
    const StoppingBoundDetail detail = optimized_stopping_bound_detail(query);
    if (!detail.informative) {
        return std::nullopt;
    }
    return detail.value;
}

std::int64_t scenario_sample_bound(double epsilon, double eta,
                                   std::int64_t d) {
    if (!(epsilon > 0.0 && epsilon < 1.0) || !(eta > 0.0 && eta < 1.0) ||
        d < 1) {
        throw std::domain_error("scenario_sample_bound: invalid arguments");
    }
    const long double eps = epsilon;
    const long double value = (2.0L / eps) * std::log(1.0L / (long double)eta) +
                              2.0L * (long double)d +
                              (2.0L * (long double)d / eps) *
                                  std::log(2.0L / eps);
    return static_cast<std::int64_t>(std::ceil(value));
}

double median_crossing_rho(std::int64_t n, double alpha0, double delta,
                           double beta1, double beta2) {
    const auto bound_at = [&](double rho0) {
        const std::optional<double> bound = optimized_stopping_bound(
            StoppingBoundQuery{n, alpha0, rho0, delta, beta1, beta2});
        return bound.value_or(-1.0);
    };
    double lo = 0.01;
    double hi = 0.9999;
    if (bound_at(hi) < 0.5) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    for (int iter = 0; iter < 60 && (hi - lo) > 1e-10; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (bound_at(mid) >= 0.5) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

}  // namespace ootune
