#include "ootune/normal.hpp"

#include <cmath>
#include <stdexcept>

namespace ootune {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

// Rational initial guess for the quantile (P. Acklam), |relative error|
// below 1.2e-9 everywhere; a Newton step against std_normal_cdf then takes
// it to full self-consistency.
double quantile_seed(double p) {
    static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                -2.759285104469687e+02, 1.383577518672690e+02,
                                -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                -1.556989798598866e+02, 6.680131188771972e+01,
                                -1.328068155288572e+01};
    static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                -2.400758277161838e+00, -2.549732539343734e+00,
                                4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;

    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
                c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
                 c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r +
            a[5]) *
           q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double std_normal_pdf(double x) {
    return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double std_normal_cdf(double x) {
    return 0.5 * std::erfc(-x * kInvSqrt2);
}

double std_normal_log_cdf(double x) {
    if (x > -36.0) {
        return std::log(std_normal_cdf(x));
    }
    // Asymptotic lower tail: Phi(x) = phi(x)/|x| * (1 - 1/x^2 + 3/x^4 - ...).
    const double inv_x2 = 1.0 / (x * x);
    const double series =
        1.0 - inv_x2 * (1.0 - inv_x2 * (3.0 - 15.0 * inv_x2));
    return -0.5 * x * x - kLogSqrt2Pi - std::log(-x) + std::log(series);
}

double std_normal_quantile(double p) {
    if (!(p > 0.0) || !(p < 1.0)) {
        throw std::domain_error("std_normal_quantile: p must lie in (0, 1)");
    }
    double x = quantile_seed(p);
    // One Newton step against the CDF; keeps Phi and its inverse mutually
    // consistent rather than merely individually accurate.
    const double err = std_normal_cdf(x) - p;
    const double density = std_normal_pdf(x);
    if (density > 0.0) {
        x -= err / density;
    }
    return x;
}

}  // namespace ootune
