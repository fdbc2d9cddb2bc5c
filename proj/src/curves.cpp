#include "sfpl/curves.hpp"

#include <string>

#include "sfpl/error.hpp"

namespace sfpl {
namespace {

RowMatrix smoothing_operator(const Grid& grid, const BSplineBasis& basis, int q) {
    if (q < 0) throw ParameterError("derivative order must be nonnegative");
    if (basis.order() <= q) {
        throw ParameterError("basis order " + std::to_string(basis.order()) +
                             " cannot represent derivative of order " + std::to_string(q));
    }
    const auto g = static_cast<Eigen::Index>(grid.size());
    const auto d = static_cast<Eigen::Index>(basis.dimension());
    if (g < d) {
        throw IllPosedError("least-squares representation needs at least " + std::to_string(d) +
                            " grid points, got " + std::to_string(g));
    }
    const Matrix design = basis.design(grid.points());
    Eigen::ColPivHouseholderQR<Matrix> qr(design);
    if (qr.rank() < d) {
        throw IllPosedError("B-spline collocation matrix is rank deficient (rank " +
                            std::to_string(qr.rank()) + " < " + std::to_string(d) + ")");
    }
    const Matrix coef_op = qr.solve(Matrix::Identity(g, g));  // d x G
    const Matrix deriv = basis.design(grid.points(), q);        // G x d
    return RowMatrix(deriv * coef_op);
}

}  // namespace

CurveTransform::CurveTransform(const Grid& grid) : grid_(grid) {}

CurveTransform CurveTransform::identity(const Grid& grid) { return CurveTransform(grid); }

CurveTransform::CurveTransform(const Grid& grid, BasisSpec basis, int derivative)
    : grid_(grid), basis_(basis), derivative_(derivative) {
    const BSplineBasis b = build_basis(grid, basis.order, basis.interior_knots);
    op_ = smoothing_operator(grid, b, derivative);
}

FunctionalSample CurveTransform::apply(const FunctionalSample& sample) const {
    if (sample.grid().size() != grid_.size()) {
        throw DimensionError("curves have " + std::to_string(sample.grid().size()) +
                             " grid points, transform expects " + std::to_string(grid_.size()));
    }
    if (is_identity()) return sample;
    RowMatrix out = sample.values() * op_.transpose();
    return FunctionalSample(sample.grid(), std::move(out));
}

std::vector<double> CurveTransform::apply(std::span<const double> curve) const {
    if (curve.size() != grid_.size()) {
        throw DimensionError("curve has " + std::to_string(curve.size()) +
                             " values, transform expects " + std::to_string(grid_.size()));
    }
    if (is_identity()) return {curve.begin(), curve.end()};
    const Eigen::Map<const Vector> x(curve.data(), static_cast<Eigen::Index>(curve.size()));
    const Vector y = op_ * x;
    return {y.data(), y.data() + y.size()};
}

FunctionalSample represent_and_differentiate(const FunctionalSample& sample,
                                             const BSplineBasis& basis, int q) {
    const RowMatrix op = smoothing_operator(sample.grid(), basis, q);
    RowMatrix out = sample.values() * op.transpose();
    return FunctionalSample(sample.grid(), std::move(out));
}

}  // namespace sfpl
