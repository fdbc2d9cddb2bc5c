#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels_internal.hpp"
#include "sfpl/error.hpp"

namespace sfpl::simd {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(SFPL_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable* initial_table() noexcept {
    const char* env = std::getenv("SFPL_SIMD");
    if (env != nullptr) {
        if (auto b = parse_backend(env); b.has_value()) {
            if (const KernelTable* t = table_for(*b)) return t;
        }
    }
    if (const KernelTable* t = table_for(Backend::avx2)) return t;
    return &scalar_table();
}

std::atomic<const KernelTable*>& slot() noexcept {
    static std::atomic<const KernelTable*> current{initial_table()};
    return current;
}

void check_same(std::size_t a, std::size_t b) {
    if (a != b) {
        throw DimensionError("kernel operands differ in length: " + std::to_string(a) + " vs " +
                             std::to_string(b));
    }
}

}  // namespace

const KernelTable* table_for(Backend backend) noexcept {
    switch (backend) {
        case Backend::scalar:
            return &scalar_table();
        case Backend::avx2:
#if defined(SFPL_HAVE_AVX2)
            if (cpu_has_avx2()) return &detail::avx2_table();
#endif
            return nullptr;
    }
    return nullptr;
}

const KernelTable& active() noexcept { return *slot().load(std::memory_order_acquire); }

bool select_backend(Backend backend) noexcept {
    const KernelTable* t = table_for(backend);
    if (t == nullptr) return false;
    slot().store(t, std::memory_order_release);
    return true;
}

std::optional<Backend> parse_backend(std::string_view name) noexcept {
    if (name == "scalar") return Backend::scalar;
    if (name == "avx2") return Backend::avx2;
    if (name == "auto") {
        return table_for(Backend::avx2) != nullptr ? Backend::avx2 : Backend::scalar;
    }
    return std::nullopt;
}

double dot(std::span<const double> a, std::span<const double> b) {
    check_same(a.size(), b.size());
    return active().dot(a.data(), b.data(), a.size());
}

double weighted_dot(std::span<const double> w, std::span<const double> a,
                    std::span<const double> b) {
    check_same(w.size(), a.size());
    check_same(a.size(), b.size());
    return active().weighted_dot(w.data(), a.data(), b.data(), a.size());
}

double weighted_sq_dist(std::span<const double> w, std::span<const double> a,
                        std::span<const double> b) {
    check_same(w.size(), a.size());
    check_same(a.size(), b.size());
    return active().weighted_sq_dist(w.data(), a.data(), b.data(), a.size());
}

void abs_diff(std::span<const double> z, double z0, std::span<double> out) {
    check_same(z.size(), out.size());
    active().abs_diff(z.data(), z0, out.data(), z.size());
}

void kernel_values(KernelFamily family, std::span<const double> d, double h,
                   std::span<double> out) {
    check_same(d.size(), out.size());
    active().kernel_values(family, d.data(), h, out.data(), d.size());
}

}  // namespace sfpl::simd
