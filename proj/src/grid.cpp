#include "sfpl/grid.hpp"

#include <cmath>
#include <string>

#include "sfpl/error.hpp"
#include "sfpl/simd.hpp"

namespace sfpl {

Grid::Grid(std::vector<double> points) : points_(std::move(points)) {
    if (points_.size() < 2) throw ParameterError("grid needs at least two points");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!std::isfinite(points_[i])) {
            throw ParameterError("grid point " + std::to_string(i) + " is not finite");
        }
        if (i > 0 && !(points_[i] > points_[i - 1])) {
            throw ParameterError("grid is not strictly increasing at index " + std::to_string(i));
        }
    }
    weights_.assign(points_.size(), 0.0);
    for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
        const double half = 0.5 * (points_[i + 1] - points_[i]);
        weights_[i] += half;
        weights_[i + 1] += half;
    }
}

Grid Grid::equispaced(double lo, double hi, std::size_t count) {
    if (count < 2) throw ParameterError("grid needs at least two points");
    if (!(hi > lo)) throw ParameterError("grid upper bound must exceed the lower bound");
    std::vector<double> pts(count);
    const double step = (hi - lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) pts[i] = lo + step * static_cast<double>(i);
    pts.back() = hi;
    return Grid(std::move(pts));
}

FunctionalSample::FunctionalSample(Grid grid, RowMatrix values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (static_cast<std::size_t>(values_.cols()) != grid_.size()) {
        throw DimensionError("sample has " + std::to_string(values_.cols()) +
                             " columns but the grid has " + std::to_string(grid_.size()) +
                             " points");
    }
    for (Eigen::Index i = 0; i < values_.rows(); ++i) {
        for (Eigen::Index j = 0; j < values_.cols(); ++j) {
            if (!std::isfinite(values_(i, j))) {
                throw ParameterError("curve " + std::to_string(i) + " has a non-finite value at grid index " +
                                     std::to_string(j));
            }
        }
    }
}

FunctionalSample FunctionalSample::subset(std::span<const std::size_t> rows) const {
    RowMatrix out(static_cast<Eigen::Index>(rows.size()), values_.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r] >= size()) throw DimensionError("row index out of range in subset");
        out.row(static_cast<Eigen::Index>(r)) = values_.row(static_cast<Eigen::Index>(rows[r]));
    }
    return FunctionalSample(grid_, std::move(out));
}

double inner_product(std::span<const double> f, std::span<const double> g, const Grid& grid) {
    if (f.size() != grid.size() || g.size() != grid.size()) {
        throw DimensionError("inner product operands have " + std::to_string(f.size()) + " and " +
                             std::to_string(g.size()) + " values on a grid of " +
                             std::to_string(grid.size()));
    }
    return simd::weighted_dot(grid.weights(), f, g);
}

double l2_distance(std::span<const double> f, std::span<const double> g, const Grid& grid) {
    if (f.size() != grid.size() || g.size() != grid.size()) {
        throw DimensionError("L2 distance operands do not match the grid size");
    }
    const double s = simd::weighted_sq_dist(grid.weights(), f, g);
    return std::sqrt(s > 0.0 ? s : 0.0);
}

}  // namespace sfpl
