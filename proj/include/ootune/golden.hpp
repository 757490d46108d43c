#pragma once

#include <functional>

namespace ootune {

struct MinResult {
    double argmin;
    double value;
};

// Derivative-free golden-section search on [lo, hi]. For a quasiconvex
// objective the returned point is within tol of the global minimiser; flat
// regions resolve to the midpoint of the final bracket.
MinResult minimize_quasiconvex(const std::function<double(double)>& f,
                               double lo, double hi, double tol);

struct MaxResult {
    double argmax;
    double value;
};

// Golden-section maximisation, same bracket contract as the minimiser.
MaxResult maximize_quasiconcave(const std::function<double(double)>& f,
                                double lo, double hi, double tol);

}  // namespace ootune
