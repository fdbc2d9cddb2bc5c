#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sfpl/direction.hpp"
#include "sfpl/model.hpp"

namespace sfpl {

/// Y = X'beta0 + alpha <theta0, chi>^3 + (1 - alpha) 2 sqrt(c_chi) + e, with
/// chi(t) = a cos(2 pi t) + b sin(4 pi t) + 2 c (t - 0.25)(t - 0.5) on [0, 1],
/// X ~ N(0, (rho^|j-k|)), e ~ N(0, noise_ratio * var(regression)).
struct SimulationScenario {
    std::size_t n = 100;
    std::size_t n_test = 25;
    double rho = 0.0;
    double alpha = 1.0;
    double noise_ratio = 0.025;
    std::size_t grid_size = 100;
    std::size_t replicates = 20;
    std::uint64_t seed = 1;

    void validate() const;
};

inline const std::vector<double> kTrueBeta{-1.0, 0.5, 1.5};

struct TruthRecord {
    Vector beta;
    std::shared_ptr<const Direction> theta;
    Vector a, b, c;
    /// <theta0, chi_i>
    Vector index;
    /// Noise-free response X'beta0 + alpha m + (1 - alpha) r
    Vector regression;
    Vector noise;
    double regression_variance = 0.0;
    double noise_variance = 0.0;
};

struct SimulatedDataset {
    Matrix X;
    FunctionalSample curves;
    Vector y;
    TruthRecord truth;
};

/// n + n_test rows; deterministic in (scenario.seed, replicate).
SimulatedDataset gen_dataset(const SimulationScenario& scenario, std::size_t replicate);

/// Normalization of (1, 1, 1, 1, 0, 0) in a 6-dimensional basis.
Direction true_direction(std::shared_ptr<const BSplineBasis> basis, std::shared_ptr<const Grid> grid);

/// Mean squared prediction error.
double msep(std::span<const double> predictions, std::span<const double> actuals);

struct ParamErrors {
    double beta_err = 0.0;
    double theta_err = 0.0;
};

/// sum_j (beta_hat_j - beta0_j)^2 and the trapezoid integral of (theta_hat - theta0)^2.
ParamErrors param_errors(const ModelFit& fit, const TruthRecord& truth);

struct ReplicateRecord {
    std::size_t replicate = 0;
    Estimator estimator = Estimator::knn;
    double msep = 0.0;
    double beta_err = 0.0;
    double theta_err = 0.0;
    /// k or h selected by cross-validation
    double parameter = 0.0;
    bool ok = true;
    std::string error;
};

struct EstimatorSummary {
    Estimator estimator = Estimator::knn;
    std::size_t replicates = 0;
    double msep = 0.0;
    double beta_err = 0.0;
    double theta_err = 0.0;
};

struct ScenarioResult {
    SimulationScenario scenario;
    std::vector<ReplicateRecord> records;
    std::vector<EstimatorSummary> summary;
};

/// Scenario plus fit settings, as read from a key = value file.
struct ScenarioFile {
    SimulationScenario scenario;
    FitConfig fit;
};

ScenarioFile parse_scenario(std::istream& in);
ScenarioFile load_scenario(const std::string& path);

/// kNN and kernel configurations derived from a template (direction grid built once).
std::vector<FitConfig> scenario_fit_configs(const SimulationScenario& scenario, const FitConfig& base);

/// Fits every configuration on every replicate (train = first n rows, test = last n_test)
/// and averages the metrics. Replicate failures are recorded, not thrown.
ScenarioResult run_scenario(const SimulationScenario& scenario, std::span<const FitConfig> configs,
                            unsigned threads = 0);

/// Averages per estimator over the successful records, in replicate order.
std::vector<EstimatorSummary> summarize(std::span<const ReplicateRecord> records);

void write_replicates_csv(std::ostream& out, const ScenarioResult& result);
void write_summary_csv(std::ostream& out, const ScenarioResult& result);

}  // namespace sfpl
