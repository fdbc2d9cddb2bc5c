#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sfpl/grid.hpp"
#include "sfpl/kernel_family.hpp"
#include "sfpl/linalg.hpp"
#include "sfpl/semimetric.hpp"

namespace sfpl {

struct KernelSpec {
    KernelFamily family = KernelFamily::quadratic;

    /// Largest u with K(u) > 0 (closed for uniform_half, open otherwise).
    [[nodiscard]] double support() const noexcept {
        return family == KernelFamily::uniform_half ? 0.5 : 1.0;
    }
    friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

/// K(u) for u >= 0. Throws DomainError for negative or NaN u.
double kernel_eval(KernelSpec spec, double u);

/// Number of nearest neighbours; the bandwidth adapts to each query.
struct NeighborCount {
    int k;
};
/// Fixed bandwidth shared by every query.
struct FixedBandwidth {
    double h;
};
using SmoothingParam = std::variant<NeighborCount, FixedBandwidth>;

std::string describe(const SmoothingParam& param);

enum class WeightStatus {
    ok,
    /// Every kernel value vanished; uniform weights over the k nearest (kNN)
    /// or over the points within h (fixed bandwidth).
    uniform_fallback,
    /// Fixed bandwidth with no point within h: all weights are zero.
    no_neighbor,
};

struct WeightVector {
    std::vector<double> weights;
    double bandwidth = 0.0;
    WeightStatus status = WeightStatus::ok;
};

/// Smallest h with #{i : d_i <= h} >= k, i.e. the k-th order statistic of the distances.
double knn_bandwidth(int k, std::span<const double> distances);
double knn_bandwidth(int k, std::span<const double> query, const FunctionalSample& sample,
                     const SemiMetric& metric);

/// w_i = K(d_i / H) / sum_j K(d_j / H), H from the kNN rule or H = h.
WeightVector weights(const SmoothingParam& param, std::span<const double> distances,
                     KernelSpec kernel);
WeightVector weights(const SmoothingParam& param, std::span<const double> query,
                     const FunctionalSample& sample, const SemiMetric& metric, KernelSpec kernel);

struct Estimate {
    double value = 0.0;
    bool no_neighbor = false;
};

/// sum_i w_i r_i. When every weight is zero the value is 0 and no_neighbor is set;
/// callers decide the fallback.
Estimate nw_estimate(const WeightVector& w, std::span<const double> pseudo_responses);

struct SmootherMatrix {
    RowMatrix w;
    SmoothingParam param;
    std::string metric;
    std::size_t fallback_rows = 0;
};

/// Row i holds weights(param, distances row i); the diagonal (self) is included.
SmootherMatrix smoother_matrix(const SmoothingParam& param, const RowMatrix& distances,
                               KernelSpec kernel, std::string metric_description = {});
SmootherMatrix smoother_matrix(const SmoothingParam& param, const FunctionalSample& sample,
                               const SemiMetric& metric, KernelSpec kernel);

namespace detail {

/// Writes normalized weights for bandwidth H into out; returns the status.
/// `k` is the neighbour count used by the uniform fallback (0 for fixed bandwidth).
WeightStatus fill_weights(std::span<const double> distances, double bandwidth, int k,
                          KernelSpec kernel, std::span<double> out);

}  // namespace detail

}  // namespace sfpl
