#pragma once

namespace ootune {

// Standard normal density.
double std_normal_pdf(double x);

// Standard normal CDF. Saturates toward 0/1 in the tails without ever
// underflowing to exactly 0 for |x| <= 38.
double std_normal_cdf(double x);

// log of the standard normal CDF; finite for x down to about -1e7, where
// the plain CDF has long since denormalised.
double std_normal_log_cdf(double x);

// Standard normal quantile, self-consistent with std_normal_cdf to better
// than 1e-9 over (0, 1). Throws std::domain_error for p <= 0 or p >= 1.
double std_normal_quantile(double p);

}  // namespace ootune
