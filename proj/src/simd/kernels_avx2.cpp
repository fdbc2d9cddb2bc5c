// Compiled with -mavx2 -mfma. Nothing in this file may run before the
// dispatcher has confirmed CPU support.

#include <immintrin.h>

#include <cmath>

#include "kernels_internal.hpp"

namespace sfpl::simd::detail {
namespace {

inline double hsum(__m256d v) noexcept {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    if (i + 4 <= n) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        i += 4;
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double weighted_dot_avx2(const double* w, const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d p0 = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(a + i));
        const __m256d p1 = _mm256_mul_pd(_mm256_loadu_pd(w + i + 4), _mm256_loadu_pd(a + i + 4));
        acc0 = _mm256_fmadd_pd(p0, _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(p1, _mm256_loadu_pd(b + i + 4), acc1);
    }
    if (i + 4 <= n) {
        const __m256d p0 = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(a + i));
        acc0 = _mm256_fmadd_pd(p0, _mm256_loadu_pd(b + i), acc0);
        i += 4;
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += w[i] * a[i] * b[i];
    return s;
}

double weighted_sq_dist_avx2(const double* w, const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
        acc0 = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), d0), d0, acc0);
        acc1 = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i + 4), d1), d1, acc1);
    }
    if (i + 4 <= n) {
        const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc0 = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), d0), d0, acc0);
        i += 4;
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        s += w[i] * d * d;
    }
    return s;
}

void abs_diff_avx2(const double* z, double z0, double* out, std::size_t n) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    const __m256d c = _mm256_set1_pd(z0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i, _mm256_andnot_pd(sign, _mm256_sub_pd(_mm256_loadu_pd(z + i), c)));
    }
    for (; i < n; ++i) out[i] = std::fabs(z[i] - z0);
}

// Elementwise: mul and sub are kept separate (no FMA) so the results match
// the scalar reference bit for bit.
void kernel_values_avx2(KernelFamily family, const double* d, double h, double* out,
                        std::size_t n) {
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d half = _mm256_set1_pd(0.5);
    const __m256d hv = _mm256_set1_pd(h);
    std::size_t i = 0;
    switch (family) {
        case KernelFamily::uniform_half:
            for (; i + 4 <= n; i += 4) {
                const __m256d u = _mm256_div_pd(_mm256_loadu_pd(d + i), hv);
                _mm256_storeu_pd(out + i, _mm256_and_pd(_mm256_cmp_pd(u, half, _CMP_LE_OQ), one));
            }
            for (; i < n; ++i) out[i] = (d[i] / h <= 0.5) ? 1.0 : 0.0;
            break;
        case KernelFamily::quadratic:
            for (; i + 4 <= n; i += 4) {
                const __m256d u = _mm256_div_pd(_mm256_loadu_pd(d + i), hv);
                const __m256d v = _mm256_sub_pd(one, _mm256_mul_pd(u, u));
                _mm256_storeu_pd(out + i, _mm256_and_pd(_mm256_cmp_pd(u, one, _CMP_LT_OQ), v));
            }
            for (; i < n; ++i) {
                const double u = d[i] / h;
                out[i] = (u < 1.0) ? 1.0 - u * u : 0.0;
            }
            break;
        case KernelFamily::triangular:
            for (; i + 4 <= n; i += 4) {
                const __m256d u = _mm256_div_pd(_mm256_loadu_pd(d + i), hv);
                const __m256d v = _mm256_sub_pd(one, u);
                _mm256_storeu_pd(out + i, _mm256_and_pd(_mm256_cmp_pd(u, one, _CMP_LT_OQ), v));
            }
            for (; i < n; ++i) {
                const double u = d[i] / h;
                out[i] = (u < 1.0) ? 1.0 - u : 0.0;
            }
            break;
    }
}

constexpr KernelTable kAvx2{
    Backend::avx2,        "avx2",        dot_avx2,          weighted_dot_avx2,
    weighted_sq_dist_avx2, abs_diff_avx2, kernel_values_avx2,
};

}  // namespace

const KernelTable& avx2_table() noexcept { return kAvx2; }

}  // namespace sfpl::simd::detail
