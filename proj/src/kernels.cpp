#include "ootune/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define OOTUNE_X86 1
#include <immintrin.h>
#else
#define OOTUNE_X86 0
#endif

namespace ootune::kernels {

namespace {

std::int64_t concordance_sum_scalar(const double* z, const double* x,
                                    std::size_t n, double z0, double x0) {
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dz = z0 - z[i];
        const double dx = x0 - x[i];
        const int sz = (dz > 0.0) - (dz < 0.0);
        const int sx = (dx > 0.0) - (dx < 0.0);
        sum += sz * sx;
    }
    return sum;
}

std::int64_t count_le_scalar(const double* v, std::size_t n, double threshold) {
    std::int64_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        count += (v[i] <= threshold);
    }
    return count;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum += a[i] * b[i];
    }
    return sum;
}

#if OOTUNE_X86

__attribute__((target("avx2")))
std::int64_t concordance_sum_avx2(const double* z, const double* x,
                                  std::size_t n, double z0, double x0) {
    const __m256d vz0 = _mm256_set1_pd(z0);
    const __m256d vx0 = _mm256_set1_pd(x0);
    const __m256d zero = _mm256_setzero_pd();
    std::int64_t concordant = 0;
    std::int64_t discordant = 0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d dz = _mm256_sub_pd(vz0, _mm256_loadu_pd(z + i));
        const __m256d dx = _mm256_sub_pd(vx0, _mm256_loadu_pd(x + i));
        const __m256d zpos = _mm256_cmp_pd(dz, zero, _CMP_GT_OQ);
        const __m256d zneg = _mm256_cmp_pd(dz, zero, _CMP_LT_OQ);
        const __m256d xpos = _mm256_cmp_pd(dx, zero, _CMP_GT_OQ);
        const __m256d xneg = _mm256_cmp_pd(dx, zero, _CMP_LT_OQ);
        const __m256d same = _mm256_or_pd(_mm256_and_pd(zpos, xpos),
                                          _mm256_and_pd(zneg, xneg));
        const __m256d opposite = _mm256_or_pd(_mm256_and_pd(zpos, xneg),
                                              _mm256_and_pd(zneg, xpos));
        concordant += __builtin_popcount(
            static_cast<unsigned>(_mm256_movemask_pd(same)));
        discordant += __builtin_popcount(
            static_cast<unsigned>(_mm256_movemask_pd(opposite)));
    }
    std::int64_t tail = concordance_sum_scalar(z + i, x + i, n - i, z0, x0);
    return concordant - discordant + tail;
}

__attribute__((target("avx2")))
std::int64_t count_le_avx2(const double* v, std::size_t n, double threshold) {
    const __m256d vt = _mm256_set1_pd(threshold);
    std::int64_t count = 0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d le = _mm256_cmp_pd(_mm256_loadu_pd(v + i), vt, _CMP_LE_OQ);
        count += __builtin_popcount(
            static_cast<unsigned>(_mm256_movemask_pd(le)));
    }
    return count + count_le_scalar(v + i, n - i, threshold);
}

__attribute__((target("avx2,fma")))
double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i),
                               _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                               _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i),
                               _mm256_loadu_pd(b + i), acc0);
    }
    const __m256d acc = _mm256_add_pd(acc0, acc1);
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double sum = lanes[0] + lanes[1] + lanes[2] + lanes[3];
    for (; i < n; ++i) {
        sum += a[i] * b[i];
    }
    return sum;
}

const Backend kAvx2Backend = {
    "avx2",
    concordance_sum_avx2,
    count_le_avx2,
    dot_avx2,
};

#endif  // OOTUNE_X86

const Backend kScalarBackend = {
    "scalar",
    concordance_sum_scalar,
    count_le_scalar,
    dot_scalar,
};

const Backend& select_backend() {
#if OOTUNE_X86
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
        return kAvx2Backend;
    }
#endif
    return kScalarBackend;
}

}  // namespace

const Backend& scalar_backend() { return kScalarBackend; }

const Backend* avx2_backend() {
#if OOTUNE_X86
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
        return &kAvx2Backend;
    }
#endif
    return nullptr;
}

const Backend& active_backend() {
    static const Backend& backend = select_backend();
    return backend;
}

}  // namespace ootune::kernels
