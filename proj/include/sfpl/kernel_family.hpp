#pragma once

#include <string_view>

namespace sfpl {

/// Compactly supported smoothing kernels.
///   uniform_half: 1 on [0, 1/2]
///   quadratic:    1 - u^2 on [0, 1)
///   triangular:   1 - u on [0, 1)
enum class KernelFamily { uniform_half, quadratic, triangular };

std::string_view to_string(KernelFamily family) noexcept;
KernelFamily parse_kernel_family(std::string_view name);

}  // namespace sfpl
