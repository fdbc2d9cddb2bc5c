#include <cmath>

#include "kernels_internal.hpp"

namespace sfpl::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double weighted_dot_scalar(const double* w, const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += w[i] * a[i] * b[i];
    return s;
}

double weighted_sq_dist_scalar(const double* w, const double* a, const double* b,
                               std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        s += w[i] * d * d;
    }
    return s;
}

void abs_diff_scalar(const double* z, double z0, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::fabs(z[i] - z0);
}

void kernel_values_scalar(KernelFamily family, const double* d, double h, double* out,
                          std::size_t n) {
    switch (family) {
        case KernelFamily::uniform_half:
            for (std::size_t i = 0; i < n; ++i) out[i] = (d[i] / h <= 0.5) ? 1.0 : 0.0;
            break;
        case KernelFamily::quadratic:
            for (std::size_t i = 0; i < n; ++i) {
                const double u = d[i] / h;
                out[i] = (u < 1.0) ? 1.0 - u * u : 0.0;
            }
            break;
        case KernelFamily::triangular:
            for (std::size_t i = 0; i < n; ++i) {
                const double u = d[i] / h;
                out[i] = (u < 1.0) ? 1.0 - u : 0.0;
            }
            break;
    }
}

constexpr KernelTable kScalar{
    Backend::scalar,       "scalar",        dot_scalar,          weighted_dot_scalar,
    weighted_sq_dist_scalar, abs_diff_scalar, kernel_values_scalar,
};

}  // namespace

const KernelTable& scalar_table() noexcept { return kScalar; }

}  // namespace sfpl::simd
