#include "sfpl/direction.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sfpl/error.hpp"
#include "sfpl/simd.hpp"

namespace sfpl {
namespace {

std::vector<double> values_on_grid(std::span<const double> coeffs, const BSplineBasis& basis,
                                   const Grid& grid) {
    const Matrix design = basis.design(grid.points());
    const Eigen::Map<const Vector> c(coeffs.data(), static_cast<Eigen::Index>(coeffs.size()));
    const Vector v = design * c;
    return {v.data(), v.data() + v.size()};
}

// Index of the first grid point at or after `from` where theta is nonzero.
std::size_t anchor_index(std::span<const double> values, const Grid& grid, double from) {
    double scale = 0.0;
    for (double v : values) scale = std::max(scale, std::fabs(v));
    const double tol = 1e-12 * scale;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (grid[i] >= from && std::fabs(values[i]) > tol) return i;
    }
    throw DegenerateDirectionError("direction vanishes on the grid at and after the anchor");
}

void check_shapes(std::span<const double> coeffs, const std::shared_ptr<const BSplineBasis>& basis,
                  const std::shared_ptr<const Grid>& grid) {
    if (!basis || !grid) throw ParameterError("direction requires a basis and a grid");
    if (coeffs.size() != basis->dimension()) {
        throw DimensionError("direction has " + std::to_string(coeffs.size()) +
                             " coefficients for a basis of dimension " +
                             std::to_string(basis->dimension()));
    }
}

}  // namespace

Direction::Direction(std::vector<double> coeffs, std::shared_ptr<const BSplineBasis> basis,
                     std::shared_ptr<const Grid> grid, std::vector<double> values, double anchor)
    : coeffs_(std::move(coeffs)),
      basis_(std::move(basis)),
      grid_(std::move(grid)),
      values_(std::move(values)),
      anchor_(anchor) {}

Direction Direction::from_normalized(std::vector<double> coeffs,
                                     std::shared_ptr<const BSplineBasis> basis,
                                     std::shared_ptr<const Grid> grid) {
    check_shapes(coeffs, basis, grid);
    std::vector<double> values = values_on_grid(coeffs, *basis, *grid);
    const double norm2 = inner_product(values, values, *grid);
    if (std::fabs(norm2 - 1.0) > 1e-8) {
        throw DegenerateDirectionError("direction is not unit-norm (<theta,theta> = " +
                                       std::to_string(norm2) + ")");
    }
    const std::size_t a = anchor_index(values, *grid, grid->lo());
    if (!(values[a] > 0.0)) {
        throw DegenerateDirectionError("direction is negative at its anchor");
    }
    const double t0 = (*grid)[a];
    return Direction(std::move(coeffs), std::move(basis), std::move(grid), std::move(values), t0);
}

Direction normalize_direction(std::span<const double> coeffs,
                              std::shared_ptr<const BSplineBasis> basis,
                              std::shared_ptr<const Grid> grid, std::optional<double> anchor) {
    check_shapes(coeffs, basis, grid);
    if (std::all_of(coeffs.begin(), coeffs.end(), [](double c) { return c == 0.0; })) {
        throw DegenerateDirectionError("cannot normalize the zero direction");
    }
    const std::vector<double> raw = values_on_grid(coeffs, *basis, *grid);
    const double norm2 = inner_product(raw, raw, *grid);
    if (!(norm2 > 0.0) || !std::isfinite(norm2)) {
        throw DegenerateDirectionError("direction has zero norm on the grid");
    }

    double sign_value = 0.0;
    double t0 = anchor.value_or(grid->lo());
    if (anchor.has_value()) sign_value = basis->combine(coeffs, *anchor);
    if (sign_value == 0.0) {
        const std::size_t a = anchor_index(raw, *grid, t0);
        sign_value = raw[a];
        t0 = (*grid)[a];
    }
    const double scale = (sign_value < 0.0 ? -1.0 : 1.0) / std::sqrt(norm2);

    std::vector<double> scaled(coeffs.begin(), coeffs.end());
    for (double& c : scaled) c *= scale;
    std::vector<double> values = values_on_grid(scaled, *basis, *grid);
    return Direction(std::move(scaled), std::move(basis), std::move(grid), std::move(values), t0);
}

double project(const Direction& theta, std::span<const double> chi) {
    if (chi.size() != theta.grid().size()) {
        throw DimensionError("curve has " + std::to_string(chi.size()) +
                             " values but the direction lives on a grid of " +
                             std::to_string(theta.grid().size()));
    }
    return simd::weighted_dot(theta.grid().weights(), theta.values(), chi);
}

std::vector<double> project_all(const Direction& theta, const FunctionalSample& sample) {
    if (sample.grid().size() != theta.grid().size()) {
        throw DimensionError("sample grid and direction grid differ in size");
    }
    std::vector<double> z(sample.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = project(theta, sample.curve(i));
    return z;
}

double integrated_squared_difference(const Direction& a, const Direction& b) {
    if (a.grid().size() != b.grid().size()) throw DimensionError("directions live on different grids");
    return simd::weighted_sq_dist(a.grid().weights(), a.values(), b.values());
}

}  // namespace sfpl
