#include "sfpl/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "sfpl/error.hpp"
#include "sfpl/simd.hpp"

namespace sfpl {

std::string_view to_string(KernelFamily family) noexcept {
    switch (family) {
        case KernelFamily::uniform_half:
            return "uniform_half";
        case KernelFamily::quadratic:
            return "quadratic";
        case KernelFamily::triangular:
            return "triangular";
    }
    return "unknown";
}

KernelFamily parse_kernel_family(std::string_view name) {
    if (name == "uniform_half" || name == "uniform") return KernelFamily::uniform_half;
    if (name == "quadratic") return KernelFamily::quadratic;
    if (name == "triangular") return KernelFamily::triangular;
    throw ParameterError("unknown kernel family '" + std::string(name) + "'");
}

double kernel_eval(KernelSpec spec, double u) {
    if (!(u >= 0.0)) throw DomainError("kernel argument must be nonnegative");
    switch (spec.family) {
        case KernelFamily::uniform_half:
            return u <= 0.5 ? 1.0 : 0.0;
        case KernelFamily::quadratic:
            return u < 1.0 ? 1.0 - u * u : 0.0;
        case KernelFamily::triangular:
            return u < 1.0 ? 1.0 - u : 0.0;
    }
    return 0.0;
}

std::string describe(const SmoothingParam& param) {
    std::ostringstream os;
    if (const auto* k = std::get_if<NeighborCount>(&param)) {
        os << "knn(k=" << k->k << ")";
    } else {
        os.precision(17);
        os << "kernel(h=" << std::get<FixedBandwidth>(param).h << ")";
    }
    return os.str();
}

double knn_bandwidth(int k, std::span<const double> distances) {
    if (k < 1 || static_cast<std::size_t>(k) > distances.size()) {
        throw ParameterError("k = " + std::to_string(k) + " outside [1, " +
                             std::to_string(distances.size()) + "]");
    }
    std::vector<double> d(distances.begin(), distances.end());
    auto nth = d.begin() + (k - 1);
    std::nth_element(d.begin(), nth, d.end());
    return *nth;
}

double knn_bandwidth(int k, std::span<const double> query, const FunctionalSample& sample,
                     const SemiMetric& metric) {
    return knn_bandwidth(k, distances_to(metric, query, sample));
}

namespace detail {

WeightStatus fill_weights(std::span<const double> distances, double bandwidth, int k,
                          KernelSpec kernel, std::span<double> out) {
    const std::size_t n = distances.size();
    if (bandwidth > 0.0 && std::isfinite(bandwidth)) {
        simd::kernel_values(kernel.family, distances, bandwidth, out);
    } else {
        // Zero bandwidth: only exact ties with the query sit at u = 0.
        for (std::size_t i = 0; i < n; ++i) out[i] = distances[i] == 0.0 ? 1.0 : 0.0;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += out[i];
    if (sum > 0.0) {
        for (std::size_t i = 0; i < n; ++i) out[i] /= sum;
        return WeightStatus::ok;
    }

    std::fill(out.begin(), out.end(), 0.0);
    if (k > 0) {
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return distances[a] < distances[b]; });
        const double w = 1.0 / static_cast<double>(k);
        for (int j = 0; j < k; ++j) out[idx[static_cast<std::size_t>(j)]] = w;
        return WeightStatus::uniform_fallback;
    }
    std::size_t inside = 0;
    for (std::size_t i = 0; i < n; ++i) inside += distances[i] <= bandwidth ? 1 : 0;
    if (inside == 0) return WeightStatus::no_neighbor;
    const double w = 1.0 / static_cast<double>(inside);
    for (std::size_t i = 0; i < n; ++i) out[i] = distances[i] <= bandwidth ? w : 0.0;
    return WeightStatus::uniform_fallback;
}

}  // namespace detail

WeightVector weights(const SmoothingParam& param, std::span<const double> distances,
                     KernelSpec kernel) {
    WeightVector wv;
    wv.weights.resize(distances.size());
    if (const auto* knn = std::get_if<NeighborCount>(&param)) {
        wv.bandwidth = knn_bandwidth(knn->k, distances);
        wv.status = detail::fill_weights(distances, wv.bandwidth, knn->k, kernel, wv.weights);
    } else {
        const double h = std::get<FixedBandwidth>(param).h;
        if (!(h > 0.0) || !std::isfinite(h)) throw ParameterError("bandwidth must be positive and finite");
        wv.bandwidth = h;
        wv.status = detail::fill_weights(distances, h, 0, kernel, wv.weights);
    }
    return wv;
}

WeightVector weights(const SmoothingParam& param, std::span<const double> query,
                     const FunctionalSample& sample, const SemiMetric& metric, KernelSpec kernel) {
    return weights(param, distances_to(metric, query, sample), kernel);
}

Estimate nw_estimate(const WeightVector& w, std::span<const double> pseudo_responses) {
    if (w.weights.size() != pseudo_responses.size()) {
        throw DimensionError("weight vector has " + std::to_string(w.weights.size()) +
                             " entries but there are " + std::to_string(pseudo_responses.size()) +
                             " pseudo-responses");
    }
    if (w.status == WeightStatus::no_neighbor) return {0.0, true};
    double s = 0.0;
    for (std::size_t i = 0; i < w.weights.size(); ++i) s += w.weights[i] * pseudo_responses[i];
    return {s, false};
}

SmootherMatrix smoother_matrix(const SmoothingParam& param, const RowMatrix& distances,
                               KernelSpec kernel, std::string metric_description) {
    if (distances.rows() != distances.cols()) throw DimensionError("distance matrix must be square");
    SmootherMatrix sm{RowMatrix(distances.rows(), distances.cols()), param, std::move(metric_description), 0};
    for (Eigen::Index i = 0; i < distances.rows(); ++i) {
        WeightVector wv = weights(param, row_span(distances, i), kernel);
        if (wv.status != WeightStatus::ok) ++sm.fallback_rows;
        std::copy(wv.weights.begin(), wv.weights.end(), row_span(sm.w, i).begin());
    }
    return sm;
}

SmootherMatrix smoother_matrix(const SmoothingParam& param, const FunctionalSample& sample,
                               const SemiMetric& metric, KernelSpec kernel) {
    return smoother_matrix(param, distance_matrix(metric, sample), kernel, metric.describe());
}

}  // namespace sfpl
