#include "ootune/estimation.hpp"

#include <cmath>
#include <stdexcept>

#include "ootune/kernels.hpp"

namespace ootune {

BivariateSample::BivariateSample(double x_star) : x_star_(x_star) {}

void BivariateSample::push(double z, double x) {
    concordance_ += 2 * kernels::concordance_sum(z_.data(), x_.data(),
                                                 z_.size(), z, x);
    below_ += (x <= x_star_);
    z_.push_back(z);
    x_.push_back(x);
}

void BivariateSample::set_x_star(double x_star) {
    x_star_ = x_star;
    below_ = kernels::count_le(x_.data(), x_.size(), x_star_);
}

double BivariateSample::alpha_hat() const {
    if (z_.empty()) {
        throw std::logic_error("alpha_hat: requires n >= 1");
    }
    return static_cast<double>(below_) / static_cast<double>(z_.size());
}

double BivariateSample::kappa_hat() const {
    const auto n = size();
    if (n < 2) {
        throw std::logic_error("kappa_hat: requires n >= 2");
    }
    return static_cast<double>(concordance_) /
           (static_cast<double>(n) * static_cast<double>(n - 1));
}

double BivariateSample::rho_hat() const {
    return std::sin(M_PI_2 * std::max(0.0, kappa_hat()));
}

ConfidenceWidths confidence_widths(std::int64_t n, double beta1,
                                   double beta2) {
    if (n < 2) {
        throw std::domain_error("confidence_widths: requires n >= 2");
    }
    if (!(beta1 > 0.0 && beta1 <= 1.0) || !(beta2 > 0.0 && beta2 <= 1.0)) {
        throw std::domain_error("confidence_widths: betas must lie in (0, 1]");
    }
    const double b1 = std::sqrt(std::log(1.0 / beta1) / (2.0 * n));
    const double half = static_cast<double>(n / 2);
    const double b2 = M_PI * std::sqrt(std::log(1.0 / beta2) / (2.0 * half));
    return {b1, b2, beta1, beta2};
}

LowerBounds lower_confidence_bounds(const BivariateSample& sample,
                                    double beta1, double beta2) {
    const ConfidenceWidths widths =
        confidence_widths(sample.size(), beta1, beta2);
    return {sample.alpha_hat() - widths.b1, sample.rho_hat() - widths.b2,
            widths};
}

}  // namespace ootune
