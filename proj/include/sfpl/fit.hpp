#pragma once

#include "sfpl/model.hpp"
#include "sfpl/smoothing.hpp"

namespace sfpl {

/// (I - W) A.
Matrix residual_transform(const Matrix& A, const RowMatrix& W);

struct ProfileResult {
    Vector beta;
    /// Q* = 0.5 * |Y~ - X~ beta|^2
    double score = 0.0;
};

/// Least squares on already transformed data. p = 0 gives an empty beta and
/// score 0.5 |Y~|^2. Throws RankError naming the dependent columns.
ProfileResult solve_profile(const Matrix& X_tilde, const Vector& y_tilde);

/// beta minimizing Q*(beta) = 0.5 |(I-W)(Y - X beta)|^2 for a given smoother.
ProfileResult profile_ols(const RowMatrix& W, const Matrix& X, const Vector& y);

/// Same, with the smoother built from (param, theta) on the sample.
ProfileResult profile_ols(const SmoothingParam& param, const Direction& theta, const Matrix& X,
                          const Vector& y, const FunctionalSample& sample, KernelSpec kernel);

/// Fits `kind` with smoothing parameter (and direction) chosen by minimizing
/// Q* over the direction grid for each candidate and cross-validating the candidates.
/// Columns of X are ignored for fsim and fnm.
ModelFit fit_model(ModelKind kind, const TrainingData& data, const FitConfig& config);

/// Fits an fnm stage (semi-metric from config) to the in-sample residuals of a
/// fitted fsim model; predictions add both stages.
ModelFit boost_residuals(const ModelFit& base, const TrainingData& data, const FitConfig& config);

/// In-sample fitted values (full training smoother, self included).
Vector fitted_values(const ModelFit& fit);

}  // namespace sfpl
