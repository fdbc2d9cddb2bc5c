#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "sfpl/bspline.hpp"
#include "sfpl/grid.hpp"

namespace sfpl {

/// A functional index theta = sum_j coeffs_j e_j, normalized so that
/// <theta, theta> = 1 on its grid and theta(t0) > 0 at the anchor t0.
/// Values on the grid are computed once at construction.
class Direction {
public:
    /// Wraps coefficients that already satisfy the identifiability constraints
    /// (checked to 1e-8). Used when reloading a stored direction.
    static Direction from_normalized(std::vector<double> coeffs,
                                     std::shared_ptr<const BSplineBasis> basis,
                                     std::shared_ptr<const Grid> grid);

    [[nodiscard]] std::span<const double> coeffs() const noexcept { return coeffs_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] const BSplineBasis& basis() const noexcept { return *basis_; }
    [[nodiscard]] const std::shared_ptr<const BSplineBasis>& basis_ptr() const noexcept { return basis_; }
    [[nodiscard]] const Grid& grid() const noexcept { return *grid_; }
    [[nodiscard]] const std::shared_ptr<const Grid>& grid_ptr() const noexcept { return grid_; }
    [[nodiscard]] double anchor() const noexcept { return anchor_; }

    /// theta(t), evaluated from the spline coefficients.
    [[nodiscard]] double operator()(double t) const { return basis_->combine(coeffs_, t); }

private:
    friend Direction normalize_direction(std::span<const double>, std::shared_ptr<const BSplineBasis>,
                                         std::shared_ptr<const Grid>, std::optional<double>);

    Direction(std::vector<double> coeffs, std::shared_ptr<const BSplineBasis> basis,
              std::shared_ptr<const Grid> grid, std::vector<double> values, double anchor);

    std::vector<double> coeffs_;
    std::shared_ptr<const BSplineBasis> basis_;
    std::shared_ptr<const Grid> grid_;
    std::vector<double> values_;
    double anchor_;
};

/// Rescales coeffs to unit L2 norm and flips the sign so that theta(t0) > 0.
/// The anchor t0 defaults to the first grid point; wherever theta vanishes at
/// the anchor it moves to the next grid point with theta != 0.
Direction normalize_direction(std::span<const double> coeffs,
                              std::shared_ptr<const BSplineBasis> basis,
                              std::shared_ptr<const Grid> grid,
                              std::optional<double> anchor = std::nullopt);

/// <theta, chi> by trapezoid quadrature on the direction's grid.
double project(const Direction& theta, std::span<const double> chi);

/// <theta, chi_i> for every curve of the sample.
std::vector<double> project_all(const Direction& theta, const FunctionalSample& sample);

/// Trapezoid integral of (a - b)^2 for two directions on the same grid.
double integrated_squared_difference(const Direction& a, const Direction& b);

}  // namespace sfpl
