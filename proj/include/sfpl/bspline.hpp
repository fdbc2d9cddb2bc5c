#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sfpl/grid.hpp"
#include "sfpl/linalg.hpp"

namespace sfpl {

/// (order, interior knot count) pair describing a clamped B-spline basis.
struct BasisSpec {
    int order = 3;
    int interior_knots = 3;

    friend bool operator==(const BasisSpec&, const BasisSpec&) = default;
};

/// Clamped B-spline basis of a given order (degree + 1) with regularly spaced
/// interior knots on [lo, hi]. Dimension = order + interior_knots.
class BSplineBasis {
public:
    BSplineBasis(int order, int interior_knots, double lo, double hi);

    [[nodiscard]] int order() const noexcept { return order_; }
    [[nodiscard]] int degree() const noexcept { return order_ - 1; }
    [[nodiscard]] int interior_knots() const noexcept { return interior_; }
    [[nodiscard]] BasisSpec spec() const noexcept { return {order_, interior_}; }
    [[nodiscard]] std::size_t dimension() const noexcept {
        return static_cast<std::size_t>(order_ + interior_);
    }
    [[nodiscard]] double lo() const noexcept { return lo_; }
    [[nodiscard]] double hi() const noexcept { return hi_; }
    [[nodiscard]] std::span<const double> knots() const noexcept { return knots_; }

    /// Writes the `derivative`-th derivative of every basis function at t into
    /// out (size dimension()). Zero outside [lo, hi]; derivatives of order >= order() vanish.
    void evaluate(double t, std::span<double> out, int derivative = 0) const;
    [[nodiscard]] std::vector<double> evaluate(double t, int derivative = 0) const;

    /// points.size() x dimension() collocation matrix.
    [[nodiscard]] Matrix design(std::span<const double> points, int derivative = 0) const;

    /// sum_j coeffs_j e_j^(derivative)(t)
    [[nodiscard]] double combine(std::span<const double> coeffs, double t, int derivative = 0) const;

    friend bool operator==(const BSplineBasis& a, const BSplineBasis& b) noexcept {
        return a.order_ == b.order_ && a.interior_ == b.interior_ && a.lo_ == b.lo_ && a.hi_ == b.hi_;
    }

private:
    std::size_t find_span(double t) const noexcept;

    int order_;
    int interior_;
    double lo_;
    double hi_;
    std::vector<double> knots_;
};

/// Basis spanning the grid domain [t_1, t_G].
BSplineBasis build_basis(const Grid& grid, int order, int interior_knots);

}  // namespace sfpl
