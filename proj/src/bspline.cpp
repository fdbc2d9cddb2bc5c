#include "sfpl/bspline.hpp"

#include <algorithm>
#include <string>

#include "sfpl/error.hpp"

namespace sfpl {

BSplineBasis::BSplineBasis(int order, int interior_knots, double lo, double hi)
    : order_(order), interior_(interior_knots), lo_(lo), hi_(hi) {
    if (order < 2) throw ParameterError("B-spline order must be at least 2, got " + std::to_string(order));
    if (interior_knots < 0) throw ParameterError("interior knot count must be nonnegative");
    if (!(hi > lo)) throw ParameterError("B-spline domain must have hi > lo");

    knots_.reserve(static_cast<std::size_t>(2 * order + interior_knots));
    knots_.insert(knots_.end(), static_cast<std::size_t>(order), lo);
    for (int j = 1; j <= interior_knots; ++j) {
        knots_.push_back(lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(interior_knots + 1));
    }
    knots_.insert(knots_.end(), static_cast<std::size_t>(order), hi);
}

std::size_t BSplineBasis::find_span(double t) const noexcept {
    const std::size_t p = static_cast<std::size_t>(degree());
    const std::size_t n = dimension() - 1;
    if (t >= knots_[n + 1]) return n;
    if (t <= knots_[p]) return p;
    // Last index i in [p, n] with knots[i] <= t.
    const auto first = knots_.begin() + static_cast<std::ptrdiff_t>(p);
    const auto last = knots_.begin() + static_cast<std::ptrdiff_t>(n + 1);
    const auto it = std::upper_bound(first, last, t);
    return static_cast<std::size_t>(it - knots_.begin()) - 1;
}

// Nonzero basis functions and their derivatives on one knot span
// (Piegl & Tiller, "The NURBS Book", algorithm A2.3).
void BSplineBasis::evaluate(double t, std::span<double> out, int derivative) const {
    std::fill(out.begin(), out.end(), 0.0);
    if (derivative < 0) throw ParameterError("derivative order must be nonnegative");
    if (t < lo_ || t > hi_) return;
    const int p = degree();
    if (derivative > p) return;

    const std::size_t span = find_span(t);
    const auto& U = knots_;
    const int np1 = p + 1;

    std::vector<double> ndu(static_cast<std::size_t>(np1 * np1));
    std::vector<double> left(static_cast<std::size_t>(np1)), right(static_cast<std::size_t>(np1));
    auto NDU = [&](int r, int c) -> double& { return ndu[static_cast<std::size_t>(r * np1 + c)]; };

    NDU(0, 0) = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[static_cast<std::size_t>(j)] = t - U[span + 1 - static_cast<std::size_t>(j)];
        right[static_cast<std::size_t>(j)] = U[span + static_cast<std::size_t>(j)] - t;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            NDU(j, r) = right[static_cast<std::size_t>(r + 1)] + left[static_cast<std::size_t>(j - r)];
            const double temp = NDU(r, j - 1) / NDU(j, r);
            NDU(r, j) = saved + right[static_cast<std::size_t>(r + 1)] * temp;
            saved = left[static_cast<std::size_t>(j - r)] * temp;
        }
        NDU(j, j) = saved;
    }

    std::vector<double> ders(static_cast<std::size_t>(np1));
    if (derivative == 0) {
        for (int j = 0; j <= p; ++j) ders[static_cast<std::size_t>(j)] = NDU(j, p);
    } else {
        std::vector<double> a(static_cast<std::size_t>(2 * np1));
        auto A = [&](int s, int c) -> double& { return a[static_cast<std::size_t>(s * np1 + c)]; };
        const int k = derivative;
        for (int r = 0; r <= p; ++r) {
            int s1 = 0;
            int s2 = 1;
            A(0, 0) = 1.0;
            double d = 0.0;
            for (int kk = 1; kk <= k; ++kk) {
                d = 0.0;
                const int rk = r - kk;
                const int pk = p - kk;
                if (r >= kk) {
                    A(s2, 0) = A(s1, 0) / NDU(pk + 1, rk);
                    d = A(s2, 0) * NDU(rk, pk);
                }
                const int j1 = (rk >= -1) ? 1 : -rk;
                const int j2 = (r - 1 <= pk) ? kk - 1 : p - r;
                for (int j = j1; j <= j2; ++j) {
                    A(s2, j) = (A(s1, j) - A(s1, j - 1)) / NDU(pk + 1, rk + j);
                    d += A(s2, j) * NDU(rk + j, pk);
                }
                if (r <= pk) {
                    A(s2, kk) = -A(s1, kk - 1) / NDU(pk + 1, r);
                    d += A(s2, kk) * NDU(r, pk);
                }
                std::swap(s1, s2);
            }
            ders[static_cast<std::size_t>(r)] = d;
        }
        double factor = static_cast<double>(p);
        for (int kk = 1; kk < k; ++kk) factor *= static_cast<double>(p - kk);
        for (double& v : ders) v *= factor;
    }

    const std::size_t first = span - static_cast<std::size_t>(p);
    for (int j = 0; j <= p; ++j) out[first + static_cast<std::size_t>(j)] = ders[static_cast<std::size_t>(j)];
}

std::vector<double> BSplineBasis::evaluate(double t, int derivative) const {
    std::vector<double> out(dimension());
    evaluate(t, out, derivative);
    return out;
}

Matrix BSplineBasis::design(std::span<const double> points, int derivative) const {
    Matrix m(static_cast<Eigen::Index>(points.size()), static_cast<Eigen::Index>(dimension()));
    std::vector<double> row(dimension());
    for (std::size_t i = 0; i < points.size(); ++i) {
        evaluate(points[i], row, derivative);
        for (std::size_t j = 0; j < row.size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
    }
    return m;
}

double BSplineBasis::combine(std::span<const double> coeffs, double t, int derivative) const {
    if (coeffs.size() != dimension()) {
        throw DimensionError("expected " + std::to_string(dimension()) + " coefficients, got " +
                             std::to_string(coeffs.size()));
    }
    const std::vector<double> e = evaluate(t, derivative);
    double s = 0.0;
    for (std::size_t j = 0; j < e.size(); ++j) s += coeffs[j] * e[j];
    return s;
}

BSplineBasis build_basis(const Grid& grid, int order, int interior_knots) {
    return BSplineBasis(order, interior_knots, grid.lo(), grid.hi());
}

}  // namespace sfpl
