#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference version and,
// on x86-64 hosts with AVX2+FMA, a vectorized variant. The active table is
// chosen once at startup (CPU detection, overridable through SFPL_SIMD=scalar|avx2|auto
// or select_backend()).
//
// Reductions (dot products, distances) may differ from the scalar reference in
// the last bits because the summation order differs; elementwise kernels are
// bit-identical across backends.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

#include "sfpl/kernel_family.hpp"

namespace sfpl::simd {

enum class Backend { scalar, avx2 };

struct KernelTable {
    Backend backend;
    const char* name;

    double (*dot)(const double* a, const double* b, std::size_t n);
    /// sum_i w_i a_i b_i
    double (*weighted_dot)(const double* w, const double* a, const double* b, std::size_t n);
    /// sum_i w_i (a_i - b_i)^2
    double (*weighted_sq_dist)(const double* w, const double* a, const double* b, std::size_t n);
    /// out_i = |z_i - z0|
    void (*abs_diff)(const double* z, double z0, double* out, std::size_t n);
    /// out_i = K(d_i / h); h must be finite and positive. Division (not a
    /// reciprocal multiply) keeps u = 1 exact at d_i = h.
    void (*kernel_values)(KernelFamily family, const double* d, double h, double* out,
                          std::size_t n);
};

const KernelTable& scalar_table() noexcept;

/// nullptr when the variant was not compiled in or the CPU lacks the instructions.
const KernelTable* table_for(Backend backend) noexcept;

/// The table used by the span wrappers below.
const KernelTable& active() noexcept;

/// Switches the active table. Returns false (and leaves the selection
/// untouched) when the backend is unavailable on this host.
bool select_backend(Backend backend) noexcept;

std::optional<Backend> parse_backend(std::string_view name) noexcept;

double dot(std::span<const double> a, std::span<const double> b);
double weighted_dot(std::span<const double> w, std::span<const double> a,
                    std::span<const double> b);
double weighted_sq_dist(std::span<const double> w, std::span<const double> a,
                        std::span<const double> b);
void abs_diff(std::span<const double> z, double z0, std::span<double> out);
void kernel_values(KernelFamily family, std::span<const double> d, double h,
                   std::span<double> out);

}  // namespace sfpl::simd
