#include "sfpl/theta_grid.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "sfpl/error.hpp"

namespace sfpl {

ThetaGrid::ThetaGrid(std::vector<Direction> directions, std::vector<double> levels)
    : directions_(std::move(directions)), levels_(std::move(levels)) {}

ThetaGrid build_theta_grid(std::shared_ptr<const BSplineBasis> basis,
                           std::shared_ptr<const Grid> grid, std::span<const double> levels) {
    if (!basis || !grid) throw ConfigError("direction grid needs a basis and a grid");
    std::vector<double> lv(levels.begin(), levels.end());
    std::sort(lv.begin(), lv.end());
    lv.erase(std::unique(lv.begin(), lv.end()), lv.end());
    for (double required : {-1.0, 0.0, 1.0}) {
        if (!std::binary_search(lv.begin(), lv.end(), required)) {
            throw ConfigError("direction levels must contain -1, 0 and 1");
        }
    }

    const std::size_t d = basis->dimension();
    const std::size_t L = lv.size();
    double total = 1.0;
    for (std::size_t j = 0; j < d; ++j) total *= static_cast<double>(L);
    if (total > 5e6) throw ConfigError("direction grid would enumerate more than 5e6 vectors");

    std::vector<std::size_t> digit(d, 0);
    std::vector<double> coeffs(d);
    std::set<std::vector<long long>> seen;
    std::vector<Direction> out;
    for (;;) {
        bool zero = true;
        for (std::size_t j = 0; j < d; ++j) {
            coeffs[j] = lv[digit[j]];
            zero = zero && coeffs[j] == 0.0;
        }
        if (!zero) {
            Direction theta = normalize_direction(coeffs, basis, grid);
            std::vector<long long> key(d);
            for (std::size_t j = 0; j < d; ++j) key[j] = std::llround(theta.coeffs()[j] * 1e9);
            if (seen.insert(std::move(key)).second) out.push_back(std::move(theta));
        }
        // Odometer increment, last coordinate fastest.
        bool wrapped = true;
        for (std::size_t pos = d; pos > 0; --pos) {
            if (++digit[pos - 1] < L) {
                wrapped = false;
                break;
            }
            digit[pos - 1] = 0;
        }
        if (wrapped) break;
    }
    if (out.empty()) throw ConfigError("direction grid is empty");
    return ThetaGrid(std::move(out), std::move(lv));
}

ThetaGrid build_theta_grid(const Grid& grid, const ThetaGridSpec& spec) {
    auto g = std::make_shared<const Grid>(grid);
    auto b = std::make_shared<const BSplineBasis>(build_basis(grid, spec.basis.order, spec.basis.interior_knots));
    return build_theta_grid(std::move(b), std::move(g), spec.levels);
}

}  // namespace sfpl
