#pragma once

#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "sfpl/grid.hpp"
#include "sfpl/linalg.hpp"

namespace sfpl::test {

inline std::vector<double> uniform_vector(std::mt19937_64& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

/// Smooth random curves a sin(2 pi t) + b cos(2 pi t) + c t on an equispaced grid.
inline FunctionalSample random_curves(std::mt19937_64& rng, std::size_t n, std::size_t G = 50) {
    Grid grid = Grid::equispaced(0.0, 1.0, G);
    std::normal_distribution<double> z(0.0, 1.0);
    RowMatrix v(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(G));
    for (std::size_t i = 0; i < n; ++i) {
        const double a = z(rng), b = z(rng), c = z(rng);
        for (std::size_t g = 0; g < G; ++g) {
            const double t = grid[g];
            v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(g)) =
                a * std::sin(2 * M_PI * t) + b * std::cos(2 * M_PI * t) + c * t;
        }
    }
    return FunctionalSample(grid, std::move(v));
}

inline Matrix random_matrix(std::mt19937_64& rng, std::size_t n, std::size_t p) {
    std::normal_distribution<double> z(0.0, 1.0);
    Matrix X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        for (Eigen::Index j = 0; j < X.cols(); ++j) X(i, j) = z(rng);
    return X;
}

}  // namespace sfpl::test
