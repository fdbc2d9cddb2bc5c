#pragma once

#include <optional>
#include <span>
#include <vector>

#include "sfpl/bspline.hpp"
#include "sfpl/grid.hpp"

namespace sfpl {

/// Per-curve least-squares projection onto a B-spline basis followed by
/// q-th differentiation, evaluated back on the grid. Stored as a G x G linear
/// operator so that new curves are transformed exactly like the training ones.
class CurveTransform {
public:
    /// Leaves curves untouched.
    static CurveTransform identity(const Grid& grid);

    /// Throws ParameterError when q >= order, IllPosedError when the
    /// collocation matrix has fewer rows than basis functions or is rank deficient.
    CurveTransform(const Grid& grid, BasisSpec basis, int derivative);

    [[nodiscard]] bool is_identity() const noexcept { return !basis_.has_value(); }
    [[nodiscard]] int derivative() const noexcept { return derivative_; }
    [[nodiscard]] const std::optional<BasisSpec>& basis() const noexcept { return basis_; }
    [[nodiscard]] const Grid& grid() const noexcept { return grid_; }

    [[nodiscard]] FunctionalSample apply(const FunctionalSample& sample) const;
    [[nodiscard]] std::vector<double> apply(std::span<const double> curve) const;

private:
    explicit CurveTransform(const Grid& grid);

    Grid grid_;
    std::optional<BasisSpec> basis_;
    int derivative_ = 0;
    RowMatrix op_;
};

/// Smoothed curves (q = 0) or their q-th derivatives, on the sample grid.
FunctionalSample represent_and_differentiate(const FunctionalSample& sample,
                                             const BSplineBasis& basis, int q);

}  // namespace sfpl
