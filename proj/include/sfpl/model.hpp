#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sfpl/curves.hpp"
#include "sfpl/direction.hpp"
#include "sfpl/grid.hpp"
#include "sfpl/linalg.hpp"
#include "sfpl/smoothing.hpp"
#include "sfpl/theta_grid.hpp"

namespace sfpl {

/// sfplsim: Y = X'beta + m(<theta, chi>) + e     sfplm: Y = X'beta + r(chi) + e
/// fsim:    Y = m(<theta, chi>) + e               fnm:   Y = r(chi) + e
/// lm:      Y = b0 + X'beta + e
enum class ModelKind { sfplsim, sfplm, fsim, fnm, lm };
enum class Estimator { knn, kernel };

std::string_view to_string(ModelKind kind) noexcept;
std::string_view to_string(Estimator estimator) noexcept;
ModelKind parse_model_kind(std::string_view name);
Estimator parse_estimator(std::string_view name);

[[nodiscard]] constexpr bool is_single_index(ModelKind k) noexcept {
    return k == ModelKind::sfplsim || k == ModelKind::fsim;
}
[[nodiscard]] constexpr bool uses_scalars(ModelKind k) noexcept {
    return k == ModelKind::sfplsim || k == ModelKind::sfplm || k == ModelKind::lm;
}

/// Scalar covariates (n x p, p may be 0), curves and responses of one sample.
struct TrainingData {
    Matrix X;
    FunctionalSample curves;
    Vector y;

    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(y.size()); }
    void validate() const;
};

struct FitConfig {
    Estimator estimator = Estimator::knn;
    /// Candidate neighbour counts; empty selects default_k_grid(n).
    std::vector<int> k_grid;
    /// Candidate bandwidths as quantile levels of the pairwise distances under
    /// the current semi-metric; empty selects default_h_levels().
    std::vector<double> h_levels;
    KernelSpec kernel{};
    int folds = 10;
    std::uint64_t seed = 1;
    /// Candidate directions for single-index kinds. Built from `theta` on the
    /// curve grid when null.
    std::shared_ptr<const ThetaGrid> theta_grid;
    ThetaGridSpec theta{};
    /// Curves are replaced by the q-th derivative of their least-squares spline
    /// representation when q > 0 (q = 0 keeps the raw curves).
    int deriv_order = 0;
    BasisSpec deriv_basis{5, 20};
    unsigned threads = 0;
};

/// About 20 geometrically spaced integers in [max(3, ceil(n/20)), ceil(n/2)].
std::vector<int> default_k_grid(std::size_t n);
/// 0.05, 0.0737, ..., 0.50 (20 levels).
std::vector<double> default_h_levels();

/// One smoothing candidate of the sweep.
struct CandidateTrace {
    /// k for kNN, quantile level for kernel fits.
    double parameter = 0.0;
    /// Bandwidth h at the chosen direction (kernel fits only).
    double bandwidth = 0.0;
    /// Index into the direction grid (single-index kinds), else 0.
    std::size_t theta_index = 0;
    /// Profile score Q* at the best direction; +inf when every direction was singular.
    double profile_score = 0.0;
    double cv_score = 0.0;
    std::size_t cv_fallbacks = 0;
    std::vector<double> beta;
};

struct ModelFit {
    ModelKind kind = ModelKind::lm;
    Estimator estimator = Estimator::knn;
    KernelSpec kernel{};

    Vector beta;
    /// lm only.
    double intercept = 0.0;
    std::optional<Direction> theta;
    std::size_t theta_index = 0;
    int k = 0;
    double h = 0.0;
    double h_level = 0.0;

    /// Applied to every curve before smoothing (training and new data).
    std::shared_ptr<const CurveTransform> transform;
    /// Transformed training curves, scalar covariates, responses.
    std::shared_ptr<const TrainingData> training;
    /// Y - X beta on the training sample.
    Vector pseudo_responses;
    /// <theta, chi_i> of the transformed training curves (single-index kinds).
    std::vector<double> projections;

    std::vector<CandidateTrace> trace;
    std::size_t selected = 0;
    double cv_score = 0.0;
    std::uint64_t checksum = 0;

    /// Nonparametric stage fitted to the residuals of this one (fsim + fnm boosting).
    std::shared_ptr<const ModelFit> boost;

    std::vector<std::string> covariate_names;
    std::string response_name;

    [[nodiscard]] std::size_t covariates() const noexcept { return static_cast<std::size_t>(beta.size()); }
    [[nodiscard]] std::string metric_description() const;
};

struct Prediction {
    double value = 0.0;
    /// Nonparametric part fell back to the mean pseudo-response (no neighbour within h).
    bool fallback = false;
};

/// x_new' beta (+ intercept) + smoothed pseudo-responses at chi_new; chi_new is
/// a raw curve on the training grid and goes through the fit's transform.
Prediction predict(const ModelFit& fit, std::span<const double> x_new, std::span<const double> chi_new);
std::vector<Prediction> predict_all(const ModelFit& fit, const Matrix& X, const FunctionalSample& curves);

/// FNV-1a over the bytes of X, the curves and y.
std::uint64_t training_checksum(const Matrix& X, const FunctionalSample& curves, const Vector& y);

}  // namespace sfpl
