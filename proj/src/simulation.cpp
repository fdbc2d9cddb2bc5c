#include "sfpl/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <Eigen/Cholesky>

#include "sfpl/error.hpp"
#include "sfpl/fit.hpp"
#include "sfpl/parallel.hpp"
#include "sfpl/rng.hpp"

namespace sfpl {

void SimulationScenario::validate() const {
    if (n < 30) throw ConfigError("scenario n must be at least 30");
    if (n_test < 1) throw ConfigError("scenario n_test must be positive");
    if (!(rho > -1.0 && rho < 1.0)) throw ConfigError("scenario rho must lie in (-1, 1)");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("scenario alpha must lie in [0, 1]");
    if (!(noise_ratio >= 0.0) || !std::isfinite(noise_ratio)) throw ConfigError("scenario noise ratio must be >= 0");
    if (grid_size < 2) throw ConfigError("scenario grid size must be at least 2");
    if (replicates < 1) throw ConfigError("scenario needs at least one replicate");
}

namespace {

std::shared_ptr<const Grid> unit_grid(std::size_t size) {
    return std::make_shared<const Grid>(Grid::equispaced(0.0, 1.0, size));
}

std::shared_ptr<const BSplineBasis> truth_basis(const Grid& grid) {
    return std::make_shared<const BSplineBasis>(build_basis(grid, 3, 3));
}

double mixture_draw(std::mt19937_64& rng) {
    std::bernoulli_distribution coin(0.5);
    if (coin(rng)) return std::uniform_real_distribution<double>(5.0, 10.0)(rng);
    return std::uniform_real_distribution<double>(20.0, 20.5)(rng);
}

}  // namespace

Direction true_direction(std::shared_ptr<const BSplineBasis> basis, std::shared_ptr<const Grid> grid) {
    if (!basis || basis->dimension() != 6) throw ConfigError("true direction is defined in a 6-dimensional basis");
    const std::vector<double> c{1.0, 1.0, 1.0, 1.0, 0.0, 0.0};
    return normalize_direction(c, std::move(basis), std::move(grid));
}

SimulatedDataset gen_dataset(const SimulationScenario& scenario, std::size_t replicate) {
    scenario.validate();
    const std::size_t total = scenario.n + scenario.n_test;
    const auto N = static_cast<Eigen::Index>(total);
    const auto grid = unit_grid(scenario.grid_size);
    const std::size_t G = grid->size();
    auto rng = stream_engine(scenario.seed, replicate);

    TruthRecord truth;
    truth.beta = Eigen::Map<const Vector>(kTrueBeta.data(), static_cast<Eigen::Index>(kTrueBeta.size()));
    truth.theta = std::make_shared<const Direction>(true_direction(truth_basis(*grid), grid));
    truth.a.resize(N);
    truth.b.resize(N);
    truth.c.resize(N);

    RowMatrix curves(N, static_cast<Eigen::Index>(G));
    constexpr double pi = std::numbers::pi;
    for (Eigen::Index i = 0; i < N; ++i) {
        const double a = mixture_draw(rng);
        const double b = mixture_draw(rng);
        const double c = mixture_draw(rng);
        truth.a(i) = a;
        truth.b(i) = b;
        truth.c(i) = c;
        for (std::size_t g = 0; g < G; ++g) {
            const double t = (*grid)[g];
            curves(i, static_cast<Eigen::Index>(g)) =
                a * std::cos(2.0 * pi * t) + b * std::sin(4.0 * pi * t) + 2.0 * c * (t - 0.25) * (t - 0.5);
        }
    }

    const auto p = truth.beta.size();
    Matrix sigma(p, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index k = 0; k < p; ++k) sigma(j, k) = std::pow(scenario.rho, static_cast<double>(std::abs(j - k)));
    }
    const Matrix L = Eigen::LLT<Matrix>(sigma).matrixL();
    std::normal_distribution<double> standard(0.0, 1.0);
    Matrix X(N, p);
    Vector z(p);
    for (Eigen::Index i = 0; i < N; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) z(j) = standard(rng);
        X.row(i) = (L * z).transpose();
    }

    FunctionalSample sample(*grid, std::move(curves));
    truth.index.resize(N);
    truth.regression.resize(N);
    for (Eigen::Index i = 0; i < N; ++i) {
        const double u = project(*truth.theta, sample.curve(static_cast<std::size_t>(i)));
        truth.index(i) = u;
        truth.regression(i) = X.row(i).dot(truth.beta) + scenario.alpha * u * u * u +
                              (1.0 - scenario.alpha) * 2.0 * std::sqrt(truth.c(i));
    }
    const double mean = truth.regression.mean();
    truth.regression_variance = (truth.regression.array() - mean).square().sum() / static_cast<double>(N - 1);
    truth.noise_variance = scenario.noise_ratio * truth.regression_variance;

    truth.noise.resize(N);
    std::normal_distribution<double> noise(0.0, std::sqrt(truth.noise_variance));
    for (Eigen::Index i = 0; i < N; ++i) truth.noise(i) = truth.noise_variance > 0.0 ? noise(rng) : 0.0;

    Vector y = truth.regression + truth.noise;
    return SimulatedDataset{std::move(X), std::move(sample), std::move(y), std::move(truth)};
}

double msep(std::span<const double> predictions, std::span<const double> actuals) {
    if (predictions.size() != actuals.size()) {
        throw DimensionError("msep needs equal lengths, got " + std::to_string(predictions.size()) + " and " +
                             std::to_string(actuals.size()));
    }
    if (predictions.empty()) throw DimensionError("msep of an empty sample");
    double s = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double e = actuals[i] - predictions[i];
        s += e * e;
    }
    return s / static_cast<double>(predictions.size());
}

ParamErrors param_errors(const ModelFit& fit, const TruthRecord& truth) {
    if (fit.beta.size() != truth.beta.size()) {
        throw DimensionError("fit has " + std::to_string(fit.beta.size()) + " coefficient(s), truth has " +
                             std::to_string(truth.beta.size()));
    }
    if (!fit.theta || !truth.theta) throw ConfigError("parameter errors need a fitted and a true direction");
    if (fit.theta->grid().size() != truth.theta->grid().size()) {
        throw DimensionError("fitted and true directions live on different grids");
    }
    ParamErrors e;
    e.beta_err = (fit.beta - truth.beta).squaredNorm();
    e.theta_err = integrated_squared_difference(*fit.theta, *truth.theta);
    return e;
}

std::vector<FitConfig> scenario_fit_configs(const SimulationScenario& scenario, const FitConfig& base) {
    FitConfig cfg = base;
    if (!cfg.theta_grid) {
        cfg.theta_grid = std::make_shared<const ThetaGrid>(
            build_theta_grid(Grid::equispaced(0.0, 1.0, scenario.grid_size), cfg.theta));
    }
    std::vector<FitConfig> out(2, cfg);
    out[0].estimator = Estimator::knn;
    out[1].estimator = Estimator::kernel;
    return out;
}

std::vector<EstimatorSummary> summarize(std::span<const ReplicateRecord> records) {
    std::vector<const ReplicateRecord*> order;
    for (const auto& r : records) order.push_back(&r);
    std::stable_sort(order.begin(), order.end(),
                     [](const ReplicateRecord* a, const ReplicateRecord* b) { return a->replicate < b->replicate; });
    std::vector<EstimatorSummary> out;
    for (Estimator est : {Estimator::knn, Estimator::kernel}) {
        EstimatorSummary s;
        s.estimator = est;
        bool present = false;
        for (const auto* r : order) {
            if (r->estimator != est) continue;
            present = true;
            if (!r->ok) continue;
            ++s.replicates;
            s.msep += r->msep;
            s.beta_err += r->beta_err;
            s.theta_err += r->theta_err;
        }
        if (!present) continue;
        if (s.replicates > 0) {
            const auto m = static_cast<double>(s.replicates);
            s.msep /= m;
            s.beta_err /= m;
            s.theta_err /= m;
        } else {
            s.msep = s.beta_err = s.theta_err = std::nan("");
        }
        out.push_back(s);
    }
    return out;
}

ScenarioResult run_scenario(const SimulationScenario& scenario, std::span<const FitConfig> configs, unsigned threads) {
    scenario.validate();
    if (configs.empty()) throw ConfigError("run_scenario needs at least one fit configuration");
    std::vector<FitConfig> cfgs(configs.begin(), configs.end());
    for (auto& c : cfgs) {
        if (!c.theta_grid) {
            c.theta_grid = std::make_shared<const ThetaGrid>(
                build_theta_grid(Grid::equispaced(0.0, 1.0, scenario.grid_size), c.theta));
        }
        c.threads = 1;
    }

    const std::size_t R = scenario.replicates;
    std::vector<ReplicateRecord> records(R * cfgs.size());
    parallel_for(R, threads, [&](std::size_t r) {
        std::string failure;
        std::optional<SimulatedDataset> data;
        try {
            data.emplace(gen_dataset(scenario, r));
        } catch (const std::exception& e) {
            failure = std::string("data generation: ") + e.what();
        }
        std::vector<std::size_t> train_rows(scenario.n), test_rows(scenario.n_test);
        for (std::size_t i = 0; i < scenario.n; ++i) train_rows[i] = i;
        for (std::size_t i = 0; i < scenario.n_test; ++i) test_rows[i] = scenario.n + i;

        for (std::size_t c = 0; c < cfgs.size(); ++c) {
            ReplicateRecord& rec = records[r * cfgs.size() + c];
            rec.replicate = r;
            rec.estimator = cfgs[c].estimator;
            if (!data) {
                rec.ok = false;
                rec.error = failure;
                continue;
            }
            try {
                const auto n = static_cast<Eigen::Index>(scenario.n);
                const auto nt = static_cast<Eigen::Index>(scenario.n_test);
                TrainingData train{data->X.topRows(n), data->curves.subset(train_rows), data->y.head(n)};
                FitConfig cfg = cfgs[c];
                cfg.seed = derive_seed(scenario.seed, r);
                const ModelFit fit = fit_model(ModelKind::sfplsim, train, cfg);
                const Matrix Xt = data->X.bottomRows(nt);
                const auto preds = predict_all(fit, Xt, data->curves.subset(test_rows));
                std::vector<double> pv, av;
                for (Eigen::Index i = 0; i < nt; ++i) {
                    pv.push_back(preds[static_cast<std::size_t>(i)].value);
                    av.push_back(data->y(n + i));
                }
                rec.msep = msep(pv, av);
                const ParamErrors pe = param_errors(fit, data->truth);
                rec.beta_err = pe.beta_err;
                rec.theta_err = pe.theta_err;
                rec.parameter = cfg.estimator == Estimator::knn ? static_cast<double>(fit.k) : fit.h;
            } catch (const std::exception& e) {
                rec.ok = false;
                rec.error = e.what();
            }
        }
    });

    ScenarioResult result;
    result.scenario = scenario;
    result.records = std::move(records);
    result.summary = summarize(result.records);
    return result;
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::ostream& num(std::ostream& out, double v) {
    if (std::isnan(v)) return out << "NA";
    return out << std::setprecision(10) << v;
}

void scenario_prefix(std::ostream& out, const SimulationScenario& s) {
    out << s.n << ',';
    num(out, s.rho) << ',';
    num(out, s.alpha) << ',';
    num(out, s.noise_ratio) << ',';
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("scenario key '" + key + "': '" + item + "' is not a number");
        }
    }
    if (out.empty()) throw ConfigError("scenario key '" + key + "' has an empty list");
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

void write_replicates_csv(std::ostream& out, const ScenarioResult& result) {
    out << "n,rho,alpha,noise_ratio,replicate,estimator,msep,beta_err,theta_err,parameter,status\n";
    for (const auto& r : result.records) {
        scenario_prefix(out, result.scenario);
        out << r.replicate << ',' << to_string(r.estimator) << ',';
        if (r.ok) {
            num(out, r.msep) << ',';
            num(out, r.beta_err) << ',';
            num(out, r.theta_err) << ',';
            num(out, r.parameter) << ",ok\n";
        } else {
            out << "NA,NA,NA,NA," << csv_field("error: " + r.error) << '\n';
        }
    }
}

void write_summary_csv(std::ostream& out, const ScenarioResult& result) {
    out << "n,rho,alpha,noise_ratio,estimator,replicates,failed,msep,beta_err,theta_err\n";
    for (const auto& s : result.summary) {
        std::size_t total = 0;
        for (const auto& r : result.records) total += r.estimator == s.estimator ? 1 : 0;
        scenario_prefix(out, result.scenario);
        out << to_string(s.estimator) << ',' << s.replicates << ',' << (total - s.replicates) << ',';
        num(out, s.msep) << ',';
        num(out, s.beta_err) << ',';
        num(out, s.theta_err) << '\n';
    }
}

ScenarioFile parse_scenario(std::istream& in) {
    ScenarioFile file;
    SimulationScenario& s = file.scenario;
    FitConfig& f = file.fit;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find_first_of("=:");
        if (eq == std::string::npos) {
            throw ConfigError("scenario line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto one = [&]() {
            const auto v = parse_list(key, value);
            if (v.size() != 1) throw ConfigError("scenario key '" + key + "' takes a single value");
            return v[0];
        };
        const auto count = [&]() {
            const double v = one();
            if (v < 0 || v != std::floor(v)) throw ConfigError("scenario key '" + key + "' must be a non-negative integer");
            return static_cast<std::size_t>(v);
        };
        if (key == "n") s.n = count();
        else if (key == "n_test") s.n_test = count();
        else if (key == "rho") s.rho = one();
        else if (key == "alpha") s.alpha = one();
        else if (key == "noise_ratio" || key == "c") s.noise_ratio = one();
        else if (key == "grid_size") s.grid_size = count();
        else if (key == "replicates") s.replicates = count();
        else if (key == "seed") s.seed = static_cast<std::uint64_t>(count());
        else if (key == "folds") f.folds = static_cast<int>(count());
        else if (key == "kernel") f.kernel.family = parse_kernel_family(value);
        else if (key == "k_grid") {
            f.k_grid.clear();
            for (double v : parse_list(key, value)) f.k_grid.push_back(static_cast<int>(v));
        } else if (key == "h_levels") f.h_levels = parse_list(key, value);
        else if (key == "theta_levels") f.theta.levels = parse_list(key, value);
        else if (key == "theta_order") f.theta.basis.order = static_cast<int>(count());
        else if (key == "theta_knots") f.theta.basis.interior_knots = static_cast<int>(count());
        else throw ConfigError("scenario line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    s.validate();
    return file;
}

ScenarioFile load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
    return parse_scenario(in);
}

}  // namespace sfpl
