#pragma once

#include <functional>
#include <vector>

namespace ootune {

// Fixed-order Gauss-Legendre rule mapped to [0, 1]. Nodes lie strictly
// inside (0, 1) and the weights are positive and sum to 1.
class GaussLegendre {
public:
    explicit GaussLegendre(int node_count);

    int node_count() const { return static_cast<int>(nodes_.size()); }
    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }

    template <typename F>
    double integrate(F&& f) const {
        buffer_.resize(nodes_.size());
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            buffer_[i] = f(nodes_[i]);
        }
        return weighted_sum(buffer_.data(), buffer_.size());
    }

    // Shared 256-node rule used by the success-probability integrals.
    static const GaussLegendre& shared256();

private:
    double weighted_sum(const double* values, std::size_t n) const;

    std::vector<double> nodes_;
    std::vector<double> weights_;
    mutable std::vector<double> buffer_;
};

// Density of the first order statistic of n i.i.d. uniform (0,1) draws,
// n * (1 - z)^(n - 1). Throws std::domain_error for z outside (0, 1).
double beta_first_order_density(double z, long long n);

// Integral of g against the first-order-statistic density,
// int_0^1 g(z) n (1-z)^(n-1) dz. Evaluated after the substitution
// t = 1 - (1-z)^n, which turns the weight into the uniform density; the raw
// density piles up near 0 for large n and defeats fixed rules.
double integrate_beta_weighted(const std::function<double(double)>& g,
                               long long n, const GaussLegendre& rule);

}  // namespace ootune
