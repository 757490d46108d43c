#pragma once

#include <cstdint>
#include <vector>

namespace ootune {

// Growing ordered collection of (Z, X) performance pairs with incrementally
// maintained Kendall concordance sum and below-threshold count. The X
// threshold is fixed per instance; changing it forces an O(n) recount.
// Single writer; concurrent readers are safe while no writer is active.
class BivariateSample {
public:
    explicit BivariateSample(double x_star);

    // O(n): updates the concordance sum with the new pair against every
    // existing pair. Exact ties contribute sign 0.
    void push(double z, double x);

    std::int64_t size() const { return static_cast<std::int64_t>(z_.size()); }
    std::int64_t concordance_sum() const { return concordance_; }
    std::int64_t below_threshold_count() const { return below_; }

    double x_star() const { return x_star_; }
    void set_x_star(double x_star);

    // Fraction of X-values at or below the threshold; requires n >= 1.
    double alpha_hat() const;

    // Sample Kendall correlation S / (n (n - 1)); requires n >= 2.
    double kappa_hat() const;

    // sin((pi/2) max{0, kappa_hat}); never exceeds 1 because the clamped
    // argument never exceeds pi/2.
    double rho_hat() const;

    const std::vector<double>& z_values() const { return z_; }
    const std::vector<double>& x_values() const { return x_; }

private:
    double x_star_;
    std::vector<double> z_;
    std::vector<double> x_;
    std::int64_t concordance_ = 0;
    std::int64_t below_ = 0;
};

// One-sided confidence widths b1 = sqrt(log(1/beta1) / (2n)) and
// b2 = pi sqrt(log(1/beta2) / (2 floor(n/2))).
struct ConfidenceWidths {
    double b1;
    double b2;
    double beta1;
    double beta2;
};

ConfidenceWidths confidence_widths(std::int64_t n, double beta1, double beta2);

struct LowerBounds {
    double alpha_lcb;  // alpha_hat - b1; may be negative, caller decides.
    double rho_lcb;    // rho_hat - b2; may be negative, caller decides.
    ConfidenceWidths widths;
};

LowerBounds lower_confidence_bounds(const BivariateSample& sample,
                                    double beta1, double beta2);

}  // namespace ootune
