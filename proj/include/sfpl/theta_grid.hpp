#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "sfpl/bspline.hpp"
#include "sfpl/direction.hpp"

namespace sfpl {

struct ThetaGridSpec {
    BasisSpec basis{3, 3};
    std::vector<double> levels{-1.0, 0.0, 1.0};
};

/// Finite set of candidate directions. Elements are normalized and no two are
/// scalar multiples of one another.
class ThetaGrid {
public:
    ThetaGrid(std::vector<Direction> directions, std::vector<double> levels);

    [[nodiscard]] std::size_t size() const noexcept { return directions_.size(); }
    [[nodiscard]] const Direction& operator[](std::size_t i) const { return directions_[i]; }
    [[nodiscard]] auto begin() const noexcept { return directions_.begin(); }
    [[nodiscard]] auto end() const noexcept { return directions_.end(); }
    [[nodiscard]] std::span<const double> levels() const noexcept { return levels_; }

private:
    std::vector<Direction> directions_;
    std::vector<double> levels_;
};

/// Every coefficient vector in levels^d (lexicographic, first coordinate most
/// significant, levels ascending) except zero, normalized and deduplicated up
/// to scaling; first occurrence is kept. levels must contain -1, 0 and 1.
ThetaGrid build_theta_grid(std::shared_ptr<const BSplineBasis> basis,
                           std::shared_ptr<const Grid> grid, std::span<const double> levels);

ThetaGrid build_theta_grid(const Grid& grid, const ThetaGridSpec& spec);

}  // namespace sfpl
