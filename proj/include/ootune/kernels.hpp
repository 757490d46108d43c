// Data-parallel inner-loop kernels: scalar reference implementations plus
// SIMD variants selected at runtime by CPU capability. Every variant must
// agree with the scalar reference (see tests/test_kernels.cpp); integer
// kernels agree exactly, floating-point reductions to rounding.

#pragma once

#include <cstddef>
#include <cstdint>

namespace ootune::kernels {

// Sum over i of sign(z0 - z[i]) * sign(x0 - x[i]), signs in {-1, 0, +1}.
// Ties (either difference exactly zero) contribute 0. This is the inner
// loop of the incremental Kendall concordance statistic.
using ConcordanceFn = std::int64_t (*)(const double* z, const double* x,
                                       std::size_t n, double z0, double x0);

// Number of elements v[i] <= threshold.
using CountLeFn = std::int64_t (*)(const double* v, std::size_t n,
                                   double threshold);

// Plain dot product; used for quadrature weight contractions.
using DotFn = double (*)(const double* a, const double* b, std::size_t n);

struct Backend {
    const char* name;
    ConcordanceFn concordance_sum;
    CountLeFn count_le;
    DotFn dot;
};

// Scalar reference kernels, always available.
const Backend& scalar_backend();

// AVX2 kernels; nullptr when unsupported by the running CPU or not compiled.
const Backend* avx2_backend();

// Best backend for the running CPU, resolved once.
const Backend& active_backend();

// Convenience forwarders through the active backend.
inline std::int64_t concordance_sum(const double* z, const double* x,
                                    std::size_t n, double z0, double x0) {
    return active_backend().concordance_sum(z, x, n, z0, x0);
}

inline std::int64_t count_le(const double* v, std::size_t n, double threshold) {
    return active_backend().count_le(v, n, threshold);
}

inline double dot(const double* a, const double* b, std::size_t n) {
    return active_backend().dot(a, b, n);
}

}  // namespace ootune::kernels
