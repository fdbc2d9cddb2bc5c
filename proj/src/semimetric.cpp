#include "sfpl/semimetric.hpp"

#include <cmath>

#include "sfpl/curves.hpp"
#include "sfpl/error.hpp"
#include "sfpl/simd.hpp"

namespace sfpl {

SemiMetric SemiMetric::projection(Direction theta) {
    SemiMetric m(MetricKind::projection);
    m.theta_.emplace(std::move(theta));
    return m;
}

SemiMetric SemiMetric::l2() { return SemiMetric(MetricKind::l2); }

SemiMetric SemiMetric::derivative(int q, BasisSpec basis) {
    if (q < 0) throw ParameterError("derivative order must be nonnegative");
    if (basis.order <= q) throw ParameterError("derivative semi-metric needs basis order > q");
    SemiMetric m(MetricKind::derivative);
    m.q_ = q;
    m.basis_ = basis;
    return m;
}

double SemiMetric::operator()(std::span<const double> a, std::span<const double> b,
                              const Grid& grid) const {
    if (a.size() != grid.size() || b.size() != grid.size()) {
        throw DimensionError("semi-metric operands do not match the grid size");
    }
    switch (kind_) {
        case MetricKind::projection: {
            std::vector<double> diff(a.size());
            for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
            return std::fabs(project(*theta_, diff));
        }
        case MetricKind::l2:
            return l2_distance(a, b, grid);
        case MetricKind::derivative: {
            const CurveTransform t(grid, basis_, q_);
            return l2_distance(t.apply(a), t.apply(b), grid);
        }
    }
    return 0.0;
}

std::string SemiMetric::describe() const {
    switch (kind_) {
        case MetricKind::projection:
            return "projection";
        case MetricKind::l2:
            return "l2";
        case MetricKind::derivative:
            return "deriv(q=" + std::to_string(q_) + ",order=" + std::to_string(basis_.order) +
                   ",knots=" + std::to_string(basis_.interior_knots) + ")";
    }
    return {};
}

RowMatrix projection_distances(std::span<const double> z) {
    const auto n = static_cast<Eigen::Index>(z.size());
    RowMatrix d(n, n);
    for (Eigen::Index i = 0; i < n; ++i) simd::abs_diff(z, z[static_cast<std::size_t>(i)], row_span(d, i));
    return d;
}

RowMatrix l2_distances(const FunctionalSample& sample) {
    const auto n = static_cast<Eigen::Index>(sample.size());
    RowMatrix d(n, n);
    const auto w = sample.grid().weights();
    for (Eigen::Index i = 0; i < n; ++i) {
        d(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double s = simd::weighted_sq_dist(w, sample.curve(static_cast<std::size_t>(i)),
                                                    sample.curve(static_cast<std::size_t>(j)));
            d(i, j) = d(j, i) = std::sqrt(s > 0.0 ? s : 0.0);
        }
    }
    return d;
}

RowMatrix distance_matrix(const SemiMetric& metric, const FunctionalSample& sample) {
    switch (metric.kind()) {
        case MetricKind::projection:
            return projection_distances(project_all(*metric.direction(), sample));
        case MetricKind::l2:
            return l2_distances(sample);
        case MetricKind::derivative: {
            const CurveTransform t(sample.grid(), metric.basis(), metric.derivative_order());
            return l2_distances(t.apply(sample));
        }
    }
    return {};
}

std::vector<double> distances_to(const SemiMetric& metric, std::span<const double> query,
                                 const FunctionalSample& sample) {
    if (query.size() != sample.grid().size()) {
        throw DimensionError("query curve does not match the sample grid");
    }
    std::vector<double> d(sample.size());
    switch (metric.kind()) {
        case MetricKind::projection: {
            const std::vector<double> z = project_all(*metric.direction(), sample);
            simd::abs_diff(z, project(*metric.direction(), query), d);
            break;
        }
        case MetricKind::l2:
            for (std::size_t i = 0; i < d.size(); ++i) d[i] = l2_distance(sample.curve(i), query, sample.grid());
            break;
        case MetricKind::derivative: {
            const CurveTransform t(sample.grid(), metric.basis(), metric.derivative_order());
            const FunctionalSample ts = t.apply(sample);
            const std::vector<double> tq = t.apply(query);
            for (std::size_t i = 0; i < d.size(); ++i) d[i] = l2_distance(ts.curve(i), tq, sample.grid());
            break;
        }
    }
    return d;
}

}  // namespace sfpl
