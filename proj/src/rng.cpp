#include "ootune/rng.hpp"

#include <cmath>

namespace ootune {

std::pair<double, double> SplitMix64::normal_pair() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

double SplitMix64::exponential(double rate) {
    // uniform01 never returns 1, so the draw is strictly positive; the
    // redraw guard keeps the contract explicit should the transform ever
    // round to zero.
    for (;;) {
        const double draw = -std::log(uniform01()) / rate;
        if (draw > 0.0) {
            return draw;
        }
    }
}

}  // namespace ootune
