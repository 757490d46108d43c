#include "ootune/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include "ootune/kernels.hpp"
#include "ootune/normal.hpp"

namespace ootune {

GaussLegendre::GaussLegendre(int node_count) {
    if (node_count < 1) {
        throw std::domain_error("GaussLegendre: node_count must be positive");
    }
    const int m = node_count;
    nodes_.resize(m);
    weights_.resize(m);
    // Newton iteration on the Legendre polynomial, roots on [-1, 1].
    const int half = (m + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (m + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= m; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = m * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) {
                break;
            }
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Map [-1, 1] -> [0, 1].
        nodes_[i] = 0.5 * (1.0 - x);
        nodes_[m - 1 - i] = 0.5 * (1.0 + x);
        weights_[i] = 0.5 * w;
        weights_[m - 1 - i] = 0.5 * w;
    }
}

double GaussLegendre::weighted_sum(const double* values, std::size_t n) const {
    return kernels::dot(weights_.data(), values, n);
}

const GaussLegendre& GaussLegendre::shared256() {
    static const GaussLegendre rule(256);
    return rule;
}

double beta_first_order_density(double z, long long n) {
    if (!(z > 0.0) || !(z < 1.0)) {
        throw std::domain_error(
            "beta_first_order_density: z must lie in (0, 1)");
    }
    if (n < 1) {
        throw std::domain_error("beta_first_order_density: n must be >= 1");
    }
    const double nd = static_cast<double>(n);
    return nd * std::exp((nd - 1.0) * std::log1p(-z));
}

double integrate_beta_weighted(const std::function<double(double)>& g,
                               long long n, const GaussLegendre& rule) {
    if (n < 1) {
        throw std::domain_error("integrate_beta_weighted: n must be >= 1");
    }
    // Work in the normal-quantile variable y = Phi^-1(z), where both the
    // order-statistic weight n (1 - Phi(y))^(n-1) phi(y) and the integrands
    // of interest are analytic; the raw density piles up near 0 for large n
    // and defeats fixed rules. The interval discards 1e-15 of the weight's
    // mass at each end.
    const double nd = static_cast<double>(n);
    const double z_lo = 1e-15 / nd;
    const double z_hi = -std::expm1(std::log(1e-15) / nd);
    const double y_lo = std_normal_quantile(z_lo);
    const double y_hi = std_normal_quantile(z_hi);
    const double width = y_hi - y_lo;
    constexpr double kLogInvSqrt2Pi = -0.91893853320467274178;
    return width * rule.integrate([&](double t) {
        const double y = y_lo + width * t;
        const double log_weight = std::log(nd) +
                                  (nd - 1.0) * std_normal_log_cdf(-y) +
                                  kLogInvSqrt2Pi - 0.5 * y * y;
        return std::exp(log_weight) * g(std_normal_cdf(y));
    });
}

}  // namespace ootune
