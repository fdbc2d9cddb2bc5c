#pragma once

#include "sfpl/simd.hpp"

namespace sfpl::simd::detail {

// Defined in kernels_avx2.cpp when SFPL_HAVE_AVX2 is set.
const KernelTable& avx2_table() noexcept;

}  // namespace sfpl::simd::detail
