#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "sfpl/error.hpp"
#include "sfpl/fit.hpp"
#include "sfpl/model.hpp"
#include "sfpl/simd.hpp"

namespace sfpl {

std::string_view to_string(ModelKind kind) noexcept {
    switch (kind) {
        case ModelKind::sfplsim: return "sfplsim";
        case ModelKind::sfplm: return "sfplm";
        case ModelKind::fsim: return "fsim";
        case ModelKind::fnm: return "fnm";
        case ModelKind::lm: return "lm";
    }
    return "unknown";
}

std::string_view to_string(Estimator estimator) noexcept {
    return estimator == Estimator::knn ? "knn" : "kernel";
}

ModelKind parse_model_kind(std::string_view name) {
    if (name == "sfplsim") return ModelKind::sfplsim;
    if (name == "sfplm") return ModelKind::sfplm;
    if (name == "fsim") return ModelKind::fsim;
    if (name == "fnm") return ModelKind::fnm;
    if (name == "lm") return ModelKind::lm;
    throw ParameterError("unknown model kind '" + std::string(name) + "'");
}

Estimator parse_estimator(std::string_view name) {
    if (name == "knn") return Estimator::knn;
    if (name == "kernel") return Estimator::kernel;
    throw ParameterError("unknown estimator '" + std::string(name) + "'");
}

void TrainingData::validate() const {
    const auto n = y.size();
    if (X.rows() != n || static_cast<Eigen::Index>(curves.size()) != n) {
        throw DimensionError("training data rows disagree: X has " + std::to_string(X.rows()) + ", curves " +
                             std::to_string(curves.size()) + ", Y " + std::to_string(n));
    }
    if (n == 0) throw DimensionError("training data is empty");
    if (!X.allFinite() || !y.allFinite()) throw ParameterError("training data contains non-finite values");
}

std::vector<int> default_k_grid(std::size_t n) {
    const auto half_up = [](std::size_t a, std::size_t b) { return (a + b - 1) / b; };
    const int lo = static_cast<int>(std::max<std::size_t>(3, half_up(n, 20)));
    const int hi = static_cast<int>(half_up(n, 2));
    std::vector<int> ks;
    if (hi <= lo) {
        ks.push_back(std::min(lo, static_cast<int>(n)));
        return ks;
    }
    constexpr int count = 20;
    const double ratio = static_cast<double>(hi) / static_cast<double>(lo);
    for (int j = 0; j < count; ++j) {
        const double v = static_cast<double>(lo) * std::pow(ratio, static_cast<double>(j) / (count - 1));
        const int k = static_cast<int>(std::lround(v));
        if (ks.empty() || k != ks.back()) ks.push_back(k);
    }
    return ks;
}

std::vector<double> default_h_levels() {
    std::vector<double> levels(20);
    for (int j = 0; j < 20; ++j) levels[static_cast<std::size_t>(j)] = 0.05 + 0.45 * j / 19.0;
    return levels;
}

std::string ModelFit::metric_description() const {
    if (kind == ModelKind::lm) return "none";
    if (is_single_index(kind)) return "projection";
    if (transform && !transform->is_identity()) {
        return SemiMetric::derivative(transform->derivative(), *transform->basis()).describe();
    }
    return "l2";
}

namespace {

Prediction nonparametric_part(const ModelFit& fit, std::span<const double> tcurve) {
    const TrainingData& train = *fit.training;
    const std::size_t n = train.size();
    std::vector<double> d(n);
    if (fit.theta) {
        simd::abs_diff(fit.projections, project(*fit.theta, tcurve), d);
    } else {
        const Grid& g = train.curves.grid();
        for (std::size_t i = 0; i < n; ++i) d[i] = l2_distance(train.curves.curve(i), tcurve, g);
    }
    std::vector<double> w(n);
    WeightStatus st;
    if (fit.estimator == Estimator::knn) {
        st = detail::fill_weights(d, knn_bandwidth(fit.k, d), fit.k, fit.kernel, w);
    } else {
        st = detail::fill_weights(d, fit.h, 0, fit.kernel, w);
    }
    if (st == WeightStatus::no_neighbor) return {fit.pseudo_responses.mean(), true};
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += w[i] * fit.pseudo_responses(static_cast<Eigen::Index>(i));
    return {s, false};
}

double linear_part(const ModelFit& fit, std::span<const double> x_new) {
    if (x_new.size() != fit.covariates()) {
        throw DimensionError("model expects " + std::to_string(fit.covariates()) + " scalar covariate(s), got " +
                             std::to_string(x_new.size()));
    }
    double s = fit.intercept;
    for (std::size_t j = 0; j < x_new.size(); ++j) s += x_new[j] * fit.beta(static_cast<Eigen::Index>(j));
    return s;
}

}  // namespace

Prediction predict(const ModelFit& fit, std::span<const double> x_new, std::span<const double> chi_new) {
    if (!fit.training || !fit.transform) throw ConfigError("model fit is incomplete");
    const double lin = linear_part(fit, x_new);
    if (fit.kind == ModelKind::lm) return {lin, false};
    const std::vector<double> tcurve = fit.transform->apply(chi_new);
    Prediction p = nonparametric_part(fit, tcurve);
    p.value += lin;
    if (fit.boost) {
        const Prediction b = predict(*fit.boost, {}, chi_new);
        p.value += b.value;
        p.fallback = p.fallback || b.fallback;
    }
    return p;
}

std::vector<Prediction> predict_all(const ModelFit& fit, const Matrix& X, const FunctionalSample& curves) {
    if (X.rows() != static_cast<Eigen::Index>(curves.size())) {
        throw DimensionError("prediction inputs disagree: X has " + std::to_string(X.rows()) + " rows, " +
                             std::to_string(curves.size()) + " curves");
    }
    if (static_cast<std::size_t>(X.cols()) != fit.covariates()) {
        throw DimensionError("model expects " + std::to_string(fit.covariates()) + " scalar covariate column(s), got " +
                             std::to_string(X.cols()));
    }
    std::vector<Prediction> out;
    out.reserve(curves.size());
    std::vector<double> x(static_cast<std::size_t>(X.cols()));
    for (std::size_t i = 0; i < curves.size(); ++i) {
        for (std::size_t j = 0; j < x.size(); ++j) x[j] = X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        out.push_back(predict(fit, x, curves.curve(i)));
    }
    return out;
}

Vector fitted_values(const ModelFit& fit) {
    if (!fit.training) throw ConfigError("model fit is incomplete");
    const TrainingData& train = *fit.training;
    const auto n = static_cast<Eigen::Index>(train.size());
    Vector out(n);
    const Vector lin = train.X * fit.beta;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (fit.kind == ModelKind::lm) {
            out(i) = fit.intercept + lin(i);
        } else {
            out(i) = lin(i) + nonparametric_part(fit, train.curves.curve(static_cast<std::size_t>(i))).value;
        }
    }
    if (fit.boost) out += fitted_values(*fit.boost);
    return out;
}

std::uint64_t training_checksum(const Matrix& X, const FunctionalSample& curves, const Vector& y) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](const double* data, Eigen::Index count) {
        for (Eigen::Index i = 0; i < count; ++i) {
            unsigned char bytes[sizeof(double)];
            std::memcpy(bytes, data + i, sizeof(double));
            for (unsigned char b : bytes) {
                h ^= b;
                h *= 1099511628211ULL;
            }
        }
    };
    // Row-major traversal of X so the value does not depend on storage order.
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        for (Eigen::Index j = 0; j < X.cols(); ++j) mix(&X(i, j), 1);
    }
    mix(curves.values().data(), curves.values().size());
    mix(y.data(), y.size());
    return h;
}

}  // namespace sfpl
