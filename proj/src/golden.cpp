#include "ootune/golden.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace ootune {

MinResult minimize_quasiconvex(const std::function<double(double)>& f,
                               double lo, double hi, double tol) {
    if (!(lo < hi)) {
        throw std::domain_error("minimize_quasiconvex: requires lo < hi");
    }
    constexpr double kInvPhi = 0.61803398874989484820;
    double a = lo;
    double b = hi;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int iter = 0; iter < 300 && (b - a) > tol; ++iter) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = f(d);
        }
    }
    const double mid = 0.5 * (a + b);
    return {mid, f(mid)};
}

MaxResult maximize_quasiconcave(const std::function<double(double)>& f,
                                double lo, double hi, double tol) {
    const MinResult r = minimize_quasiconvex(
        [&](double x) { return -f(x); }, lo, hi, tol);
    return {r.argmin, -r.value};
}

}  // namespace ootune
