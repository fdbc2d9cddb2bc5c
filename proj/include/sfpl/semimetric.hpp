#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sfpl/bspline.hpp"
#include "sfpl/direction.hpp"
#include "sfpl/grid.hpp"

namespace sfpl {

enum class MetricKind { projection, l2, derivative };

/// Pseudo-distance between curves:
///   projection(theta): |<theta, a - b>|
///   l2:                sqrt(integral (a - b)^2)
///   derivative(q):     l2 distance between q-th derivatives of the least-squares
///                      B-spline representations of a and b
class SemiMetric {
public:
    static SemiMetric projection(Direction theta);
    static SemiMetric l2();
    static SemiMetric derivative(int q, BasisSpec basis);

    [[nodiscard]] MetricKind kind() const noexcept { return kind_; }
    [[nodiscard]] const Direction* direction() const noexcept { return theta_ ? &*theta_ : nullptr; }
    [[nodiscard]] int derivative_order() const noexcept { return q_; }
    [[nodiscard]] const BasisSpec& basis() const noexcept { return basis_; }

    [[nodiscard]] double operator()(std::span<const double> a, std::span<const double> b,
                                    const Grid& grid) const;

    /// "projection", "l2" or "deriv(q=..,order=..,knots=..)".
    [[nodiscard]] std::string describe() const;

private:
    SemiMetric(MetricKind kind) : kind_(kind) {}

    MetricKind kind_;
    std::optional<Direction> theta_;
    int q_ = 0;
    BasisSpec basis_{};
};

/// Symmetric n x n matrix of d(chi_i, chi_j).
RowMatrix distance_matrix(const SemiMetric& metric, const FunctionalSample& sample);

/// d(chi_i, query) for every curve of the sample.
std::vector<double> distances_to(const SemiMetric& metric, std::span<const double> query,
                                 const FunctionalSample& sample);

/// Pairwise distances from scalar projections: |z_i - z_j|.
RowMatrix projection_distances(std::span<const double> z);

/// Pairwise L2 distances between the rows of the sample.
RowMatrix l2_distances(const FunctionalSample& sample);

}  // namespace sfpl
