#include "sfpl/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "sfpl/cv.hpp"
#include "sfpl/error.hpp"
#include "sfpl/parallel.hpp"
#include "sfpl/simd.hpp"

namespace sfpl {

Matrix residual_transform(const Matrix& A, const RowMatrix& W) {
    if (W.rows() != W.cols() || W.cols() != A.rows()) {
        throw DimensionError("smoother is " + std::to_string(W.rows()) + "x" + std::to_string(W.cols()) +
                             " but the matrix has " + std::to_string(A.rows()) + " rows");
    }
    Matrix out = A;
    out.noalias() -= W * A;
    return out;
}

ProfileResult solve_profile(const Matrix& X_tilde, const Vector& y_tilde) {
    if (X_tilde.rows() != y_tilde.size()) throw DimensionError("X~ and Y~ differ in row count");
    ProfileResult r;
    if (X_tilde.cols() == 0) {
        r.beta = Vector(0);
        r.score = 0.5 * y_tilde.squaredNorm();
        return r;
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(X_tilde);
    if (qr.rank() < X_tilde.cols()) {
        std::string cols;
        const auto& perm = qr.colsPermutation().indices();
        for (Eigen::Index j = qr.rank(); j < X_tilde.cols(); ++j) {
            if (!cols.empty()) cols += ", ";
            cols += std::to_string(perm(j));
        }
        throw RankError("singular normal equations: column(s) " + cols +
                        " of the transformed covariates are linearly dependent on the others");
    }
    r.beta = qr.solve(y_tilde);
    r.score = 0.5 * (y_tilde - X_tilde * r.beta).squaredNorm();
    return r;
}

ProfileResult profile_ols(const RowMatrix& W, const Matrix& X, const Vector& y) {
    if (X.rows() != y.size()) throw DimensionError("X and Y differ in row count");
    const Matrix Xt = residual_transform(X, W);
    const Matrix Yt = residual_transform(Matrix(y), W);
    return solve_profile(Xt, Yt.col(0));
}

ProfileResult profile_ols(const SmoothingParam& param, const Direction& theta, const Matrix& X,
                          const Vector& y, const FunctionalSample& sample, KernelSpec kernel) {
    const SmootherMatrix W = smoother_matrix(param, sample, SemiMetric::projection(theta), kernel);
    return profile_ols(W.w, X, y);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Type-7 quantile of a sorted sample.
double sorted_quantile(const std::vector<double>& sorted, double level) {
    if (sorted.empty()) return 0.0;
    const double pos = level * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::vector<double> sorted_pairwise(const RowMatrix& D) {
    std::vector<double> u;
    const Eigen::Index n = D.rows();
    u.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) u.push_back(D(i, j));
    }
    std::sort(u.begin(), u.end());
    return u;
}

// Positive bandwidth at a quantile level; 0 when every pairwise distance vanishes.
double bandwidth_at_level(const std::vector<double>& sorted, double level) {
    double h = sorted_quantile(sorted, level);
    if (h > 0.0) return h;
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), 0.0);
    return it == sorted.end() ? 0.0 : *it;
}

struct Prepared {
    std::shared_ptr<const CurveTransform> transform;
    std::shared_ptr<const TrainingData> train;
    std::shared_ptr<const ThetaGrid> thetas;
    std::vector<int> ks;
    std::vector<double> levels;
    std::size_t metrics = 1;

    [[nodiscard]] std::size_t candidates() const { return ks.empty() ? levels.size() : ks.size(); }
};

RowMatrix metric_distances(const Prepared& prep, std::size_t m) {
    if (prep.thetas) return projection_distances(project_all((*prep.thetas)[m], prep.train->curves));
    return l2_distances(prep.train->curves);
}

// (I - W) A for the smoother defined by per-row bandwidths.
Matrix smooth_residuals(const RowMatrix& D, std::span<const double> bandwidth, int k, KernelSpec kernel,
                        const Matrix& A) {
    const Eigen::Index n = D.rows();
    Matrix out(A.rows(), A.cols());
    std::vector<double> w(static_cast<std::size_t>(n));
    const auto& tab = simd::active();
    for (Eigen::Index i = 0; i < n; ++i) {
        detail::fill_weights(row_span(D, i), bandwidth[static_cast<std::size_t>(i)], k, kernel, w);
        for (Eigen::Index c = 0; c < A.cols(); ++c) {
            out(i, c) = A(i, c) - tab.dot(w.data(), A.col(c).data(), static_cast<std::size_t>(n));
        }
    }
    return out;
}

struct SweepCell {
    double score = kInf;
    double bandwidth = 0.0;
    Vector beta;
};

std::shared_ptr<const ThetaGrid> theta_grid_for(const Grid& grid, const FitConfig& config) {
    if (config.theta_grid) {
        if (config.theta_grid->size() == 0) throw ConfigError("direction grid is empty");
        if ((*config.theta_grid)[0].grid().size() != grid.size()) {
            throw DimensionError("direction grid does not live on the curve grid");
        }
        return config.theta_grid;
    }
    return std::make_shared<const ThetaGrid>(build_theta_grid(grid, config.theta));
}

Prepared prepare(ModelKind kind, const TrainingData& data, const FitConfig& config) {
    Prepared prep;
    const Grid& grid = data.curves.grid();
    prep.transform = config.deriv_order > 0
                         ? std::make_shared<const CurveTransform>(grid, config.deriv_basis, config.deriv_order)
                         : std::make_shared<const CurveTransform>(CurveTransform::identity(grid));

    auto train = std::make_shared<TrainingData>(TrainingData{
        uses_scalars(kind) ? data.X : Matrix(data.X.rows(), 0), prep.transform->apply(data.curves), data.y});
    prep.train = std::move(train);

    const std::size_t n = data.size();
    if (is_single_index(kind)) {
        prep.thetas = theta_grid_for(grid, config);
        prep.metrics = prep.thetas->size();
    }
    if (config.estimator == Estimator::knn) {
        const std::vector<int> raw = config.k_grid.empty() ? default_k_grid(n) : config.k_grid;
        for (int k : raw) {
            if (k >= 1 && static_cast<std::size_t>(k) <= n) prep.ks.push_back(k);
        }
        if (prep.ks.empty()) throw ConfigError("no neighbour count in the k grid lies in [1, n]");
    } else {
        prep.levels = config.h_levels.empty() ? default_h_levels() : config.h_levels;
        for (double l : prep.levels) {
            if (!(l > 0.0 && l <= 1.0)) throw ConfigError("bandwidth quantile levels must lie in (0, 1]");
        }
    }
    if (config.folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
    if (static_cast<std::size_t>(config.folds) > n) throw ConfigError("more folds than observations");
    return prep;
}

Matrix stacked(const TrainingData& t) {
    Matrix A(t.X.rows(), t.X.cols() + 1);
    A.leftCols(t.X.cols()) = t.X;
    A.col(t.X.cols()) = t.y;
    return A;
}

ModelFit fit_linear(const TrainingData& data) {
    const auto n = static_cast<Eigen::Index>(data.size());
    Matrix design(n, data.X.cols() + 1);
    design.col(0).setOnes();
    design.rightCols(data.X.cols()) = data.X;
    ProfileResult r;
    try {
        r = solve_profile(design, data.y);
    } catch (const RankError& e) {
        throw RankError(std::string("linear model: ") + e.what() + " (column 0 is the intercept)");
    }
    ModelFit fit;
    fit.kind = ModelKind::lm;
    fit.intercept = r.beta(0);
    fit.beta = r.beta.tail(data.X.cols());
    fit.transform = std::make_shared<const CurveTransform>(CurveTransform::identity(data.curves.grid()));
    fit.training = std::make_shared<const TrainingData>(data);
    fit.pseudo_responses = data.y - data.X * fit.beta;
    fit.checksum = training_checksum(data.X, data.curves, data.y);
    fit.cv_score = 0.0;
    return fit;
}

}  // namespace

ModelFit fit_model(ModelKind kind, const TrainingData& data, const FitConfig& config) {
    data.validate();
    if (kind == ModelKind::lm) return fit_linear(data);

    const Prepared prep = prepare(kind, data, config);
    const TrainingData& train = *prep.train;
    const std::size_t n = train.size();
    const auto p = train.X.cols();
    const Matrix A = stacked(train);
    const std::size_t C = prep.candidates();
    const bool knn = config.estimator == Estimator::knn;

    // Profile sweep: for every direction (or the single fixed metric) and every
    // smoothing candidate, the closed-form beta and its Q* score.
    std::vector<SweepCell> cells(prep.metrics * C);
    parallel_for(prep.metrics, config.threads, [&](std::size_t m) {
        const RowMatrix D = metric_distances(prep, m);
        RowMatrix sorted_rows;
        std::vector<double> pairwise;
        if (knn) {
            sorted_rows = D;
            for (Eigen::Index i = 0; i < D.rows(); ++i) {
                auto r = row_span(sorted_rows, i);
                std::sort(r.begin(), r.end());
            }
        } else {
            pairwise = sorted_pairwise(D);
        }
        std::vector<double> bw(n);
        for (std::size_t c = 0; c < C; ++c) {
            SweepCell& cell = cells[m * C + c];
            int k = 0;
            if (knn) {
                k = prep.ks[c];
                for (std::size_t i = 0; i < n; ++i) {
                    bw[i] = sorted_rows(static_cast<Eigen::Index>(i), k - 1);
                }
            } else {
                const double h = bandwidth_at_level(pairwise, prep.levels[c]);
                if (!(h > 0.0)) continue;
                std::fill(bw.begin(), bw.end(), h);
                cell.bandwidth = h;
            }
            const Matrix At = smooth_residuals(D, bw, k, config.kernel, A);
            try {
                ProfileResult r = solve_profile(At.leftCols(p), At.col(p));
                cell.score = r.score;
                cell.beta = std::move(r.beta);
            } catch (const RankError&) {
                cell.score = kInf;
            }
        }
    });

    // Best direction per candidate; ties go to the earlier direction.
    std::vector<CandidateTrace> trace(C);
    for (std::size_t c = 0; c < C; ++c) {
        CandidateTrace& t = trace[c];
        t.parameter = knn ? static_cast<double>(prep.ks[c]) : prep.levels[c];
        t.profile_score = kInf;
        for (std::size_t m = 0; m < prep.metrics; ++m) {
            const SweepCell& cell = cells[m * C + c];
            if (cell.score < t.profile_score) {
                t.profile_score = cell.score;
                t.theta_index = m;
                t.bandwidth = cell.bandwidth;
                t.beta.assign(cell.beta.data(), cell.beta.data() + cell.beta.size());
            }
        }
    }
    if (std::all_of(trace.begin(), trace.end(), [](const CandidateTrace& t) { return !std::isfinite(t.profile_score); })) {
        throw RankError("every smoothing candidate produced singular normal equations");
    }

    // Distances of the directions that won at least one candidate.
    std::map<std::size_t, RowMatrix> distances;
    for (const CandidateTrace& t : trace) {
        if (std::isfinite(t.profile_score) && !distances.contains(t.theta_index)) {
            distances.emplace(t.theta_index, metric_distances(prep, t.theta_index));
        }
    }

    // Cross-validation of the nonparametric stage with (theta_c, beta_c) held fixed.
    const FoldScorer scorer = [&](std::size_t c, std::span<const std::size_t> tr,
                                  std::span<const std::size_t> held) -> FoldScore {
        const CandidateTrace& t = trace[c];
        FoldScore s;
        if (!std::isfinite(t.profile_score)) {
            s.squared_errors.assign(held.size(), kInf);
            return s;
        }
        const RowMatrix& D = distances.at(t.theta_index);
        const Eigen::Map<const Vector> beta(t.beta.data(), static_cast<Eigen::Index>(t.beta.size()));
        const Vector lin = train.X * beta;
        std::vector<double> r(tr.size());
        double r_mean = 0.0;
        for (std::size_t j = 0; j < tr.size(); ++j) {
            const auto row = static_cast<Eigen::Index>(tr[j]);
            r[j] = train.y(row) - lin(row);
            r_mean += r[j];
        }
        r_mean /= static_cast<double>(tr.size());

        std::vector<double> d(tr.size()), w(tr.size());
        const int k_eff = knn ? std::min(static_cast<int>(t.parameter), static_cast<int>(tr.size())) : 0;
        s.squared_errors.reserve(held.size());
        for (std::size_t i : held) {
            for (std::size_t j = 0; j < tr.size(); ++j) d[j] = D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(tr[j]));
            const double bw = knn ? knn_bandwidth(k_eff, d) : t.bandwidth;
            const WeightStatus st = detail::fill_weights(d, bw, k_eff, config.kernel, w);
            double m_hat = 0.0;
            if (st == WeightStatus::no_neighbor) {
                m_hat = r_mean;
                ++s.fallbacks;
            } else {
                for (std::size_t j = 0; j < tr.size(); ++j) m_hat += w[j] * r[j];
            }
            const double e = train.y(static_cast<Eigen::Index>(i)) - lin(static_cast<Eigen::Index>(i)) - m_hat;
            s.squared_errors.push_back(e * e);
        }
        return s;
    };
    const CVResult cv = cross_validate(C, n, scorer, config.folds, config.seed, config.threads);
    for (std::size_t c = 0; c < C; ++c) {
        trace[c].cv_score = cv.scores[c];
        trace[c].cv_fallbacks = cv.fallbacks[c];
    }

    const CandidateTrace& best = trace[cv.best];
    ModelFit fit;
    fit.kind = kind;
    fit.estimator = config.estimator;
    fit.kernel = config.kernel;
    fit.beta = Eigen::Map<const Vector>(best.beta.data(), static_cast<Eigen::Index>(best.beta.size()));
    if (knn) {
        fit.k = static_cast<int>(best.parameter);
    } else {
        fit.h = best.bandwidth;
        fit.h_level = best.parameter;
    }
    if (prep.thetas) {
        fit.theta = (*prep.thetas)[best.theta_index];
        fit.theta_index = best.theta_index;
        fit.projections = project_all(*fit.theta, train.curves);
    }
    fit.transform = prep.transform;
    fit.training = prep.train;
    fit.pseudo_responses = train.y - train.X * fit.beta;
    fit.trace = std::move(trace);
    fit.selected = cv.best;
    fit.cv_score = cv.scores[cv.best];
    fit.checksum = training_checksum(data.X, data.curves, data.y);
    return fit;
}

ModelFit boost_residuals(const ModelFit& base, const TrainingData& data, const FitConfig& config) {
    if (base.kind != ModelKind::fsim) throw ConfigError("boosting expects an fsim base fit");
    if (base.boost) throw ConfigError("fit already carries a boosting stage");
    if (data.size() != base.training->size()) {
        throw DimensionError("boosting data has " + std::to_string(data.size()) +
                             " rows, the base fit was trained on " + std::to_string(base.training->size()));
    }
    const Vector fitted = fitted_values(base);
    TrainingData residual{Matrix(data.X.rows(), 0), data.curves, data.y - fitted};
    auto stage = std::make_shared<ModelFit>(fit_model(ModelKind::fnm, residual, config));
    ModelFit out = base;
    out.boost = std::move(stage);
    out.cv_score = out.boost->cv_score;
    return out;
}

}  // namespace sfpl
