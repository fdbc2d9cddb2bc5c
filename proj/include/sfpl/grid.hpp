#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sfpl/linalg.hpp"

namespace sfpl {

/// Strictly increasing observation abscissae t_1 < ... < t_G (G >= 2), with the
/// composite trapezoid weights used by every L2 computation on the grid.
class Grid {
public:
    explicit Grid(std::vector<double> points);

    static Grid equispaced(double lo, double hi, std::size_t count);

    [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
    [[nodiscard]] std::span<const double> points() const noexcept { return points_; }
    [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }
    [[nodiscard]] double lo() const noexcept { return points_.front(); }
    [[nodiscard]] double hi() const noexcept { return points_.back(); }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return points_[i]; }

    friend bool operator==(const Grid& a, const Grid& b) noexcept { return a.points_ == b.points_; }

private:
    std::vector<double> points_;
    std::vector<double> weights_;
};

/// n curves observed on a common grid; row i holds curve i.
class FunctionalSample {
public:
    FunctionalSample(Grid grid, RowMatrix values);

    [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
    [[nodiscard]] const RowMatrix& values() const noexcept { return values_; }
    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    [[nodiscard]] std::span<const double> curve(std::size_t i) const {
        return row_span(values_, static_cast<Eigen::Index>(i));
    }

    /// Curves at the given row indices, in that order.
    [[nodiscard]] FunctionalSample subset(std::span<const std::size_t> rows) const;

private:
    Grid grid_;
    RowMatrix values_;
};

/// Trapezoid approximation of the integral of f*g over the grid domain.
double inner_product(std::span<const double> f, std::span<const double> g, const Grid& grid);

/// sqrt of the trapezoid integral of (f - g)^2.
double l2_distance(std::span<const double> f, std::span<const double> g, const Grid& grid);

}  // namespace sfpl
