#include "sfpl/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "sfpl/dataio.hpp"
#include "sfpl/error.hpp"
#include "sfpl/fit.hpp"
#include "sfpl/simd.hpp"
#include "sfpl/simulation.hpp"

namespace sfpl {

namespace {

namespace fs = std::filesystem;

struct Common {
    unsigned threads = 0;
    std::string simd = "auto";
    bool no_timestamp = false;
};

struct SimulateArgs {
    std::string scenario;
    std::optional<std::size_t> replicates;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> n;
    std::optional<double> rho;
    std::optional<double> alpha;
    std::string out;
};

struct FitArgs {
    std::string data;
    std::string model = "sfplsim";
    std::string estimator = "knn";
    std::string out;
    std::string response = "fat";
    std::vector<std::string> scalars;
    bool scalars_given = false;
    std::string split;
    std::string kernel = "quadratic";
    int folds = 10;
    std::uint64_t seed = 1;
    std::vector<int> k_grid;
    std::vector<double> h_levels;
    std::vector<int> deriv{0};
    std::vector<int> knots{3};
    int theta_order = 3;
    std::vector<double> theta_levels{-1.0, 0.0, 1.0};
    int deriv_basis_order = 5;
    int deriv_basis_knots = 20;
    bool boost = false;
    int boost_deriv = 1;
};

struct PredictArgs {
    std::string fit;
    std::string data;
    std::string out;
};

struct ReportArgs {
    std::string in;
    std::string out;
};

std::string fmt(double v) {
    if (std::isnan(v)) return "NA";
    std::ostringstream s;
    s << std::setprecision(10) << v;
    return s.str();
}

std::string timestamp_line(const Common& common) {
    if (common.no_timestamp) return {};
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream s;
    s << "# generated " << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ") << '\n';
    return s.str();
}

std::string default_out_dir() {
    if (const char* env = std::getenv("SFPL_OUT_DIR"); env && *env) return env;
    return "sfpl_out";
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory '" + dir.string() + "'");
}

/// Relative paths land in SFPL_OUT_DIR when that variable is set.
fs::path output_path(const std::string& given) {
    fs::path p(given);
    if (p.is_relative()) {
        if (const char* env = std::getenv("SFPL_OUT_DIR"); env && *env) p = fs::path(env) / p;
    }
    if (p.has_parent_path()) ensure_dir(p.parent_path());
    return p;
}

fs::path summary_path(const fs::path& artifact) {
    fs::path p = artifact;
    p.replace_filename(artifact.stem().string() + "_summary.csv");
    return p;
}

void apply_common(const Common& common) {
    const auto backend = simd::parse_backend(common.simd);
    if (!backend) throw ConfigError("unknown --simd value '" + common.simd + "' (scalar, avx2 or auto)");
    if (!simd::select_backend(*backend)) {
        throw ConfigError("SIMD backend '" + common.simd + "' is not available on this host");
    }
}

int cmd_simulate(const SimulateArgs& a, const Common& common, std::ostream& out) {
    ScenarioFile file;
    if (!a.scenario.empty()) file = load_scenario(a.scenario);
    SimulationScenario& s = file.scenario;
    if (a.replicates) s.replicates = *a.replicates;
    if (a.seed) s.seed = *a.seed;
    if (a.n) s.n = *a.n;
    if (a.rho) s.rho = *a.rho;
    if (a.alpha) s.alpha = *a.alpha;
    s.validate();
    file.fit.threads = common.threads;

    const fs::path dir = a.out.empty() ? fs::path(default_out_dir()) : fs::path(a.out);
    ensure_dir(dir);
    const auto configs = scenario_fit_configs(s, file.fit);
    const ScenarioResult result = run_scenario(s, configs, common.threads);

    std::ostringstream reps, summary;
    reps << timestamp_line(common);
    write_replicates_csv(reps, result);
    summary << timestamp_line(common);
    write_summary_csv(summary, result);
    write_file_atomic((dir / "replicates.csv").string(), reps.str());
    write_file_atomic((dir / "summary.csv").string(), summary.str());

    for (const auto& e : result.summary) {
        out << to_string(e.estimator) << ": msep " << fmt(e.msep) << ", beta_err " << fmt(e.beta_err)
            << ", theta_err " << fmt(e.theta_err) << " over " << e.replicates << " replicate(s)\n";
    }
    std::size_t failed = 0;
    for (const auto& r : result.records) failed += r.ok ? 0 : 1;
    if (failed) out << failed << " replicate fit(s) failed; see replicates.csv\n";
    out << "wrote " << (dir / "replicates.csv").string() << " and " << (dir / "summary.csv").string() << '\n';
    return 0;
}

std::vector<double> prediction_values(const std::vector<Prediction>& p, std::size_t* fallbacks) {
    std::vector<double> v;
    v.reserve(p.size());
    for (const auto& x : p) {
        v.push_back(x.value);
        if (fallbacks && x.fallback) ++*fallbacks;
    }
    return v;
}

int cmd_fit(const FitArgs& a, const Common& common, std::ostream& out) {
    const ModelKind kind = parse_model_kind(a.model);
    DatasetSchema schema;
    schema.response = a.response;
    if (a.scalars_given) schema.scalars = a.scalars;
    const TabularFunctionalDataset all = load_dataset(a.data, schema);

    TabularFunctionalDataset train = all;
    std::optional<TabularFunctionalDataset> test;
    std::optional<SplitSpec> spec;
    if (!a.split.empty()) {
        spec = SplitSpec::parse(a.split);
        auto [tr, te] = split(all, *spec);
        train = std::move(tr);
        test = std::move(te);
    }
    if (uses_scalars(kind) && kind != ModelKind::lm && train.X.cols() == 0) {
        throw ConfigError("model " + a.model + " needs scalar covariates, the data has none");
    }
    if (a.boost && kind != ModelKind::fsim) throw ConfigError("--boost applies to --model fsim only");

    FitConfig base;
    base.estimator = parse_estimator(a.estimator);
    base.kernel.family = parse_kernel_family(a.kernel);
    base.folds = a.folds;
    base.seed = a.seed;
    base.k_grid = a.k_grid;
    base.h_levels = a.h_levels;
    base.theta.levels = a.theta_levels;
    base.theta.basis.order = a.theta_order;
    base.deriv_basis = {a.deriv_basis_order, a.deriv_basis_knots};
    base.threads = common.threads;

    TrainingData data = train.training();
    if (!uses_scalars(kind)) data.X = Matrix(data.X.rows(), 0);
    const std::vector<int> knots = is_single_index(kind) ? a.knots : std::vector<int>{a.knots.front()};

    std::optional<ModelFit> best;
    int best_q = 0, best_m = 0;
    std::ostringstream selection;
    const std::vector<int> qs = kind == ModelKind::lm ? std::vector<int>{0} : a.deriv;
    for (int q : qs) {
        for (int m : knots) {
            FitConfig cfg = base;
            cfg.deriv_order = q;
            cfg.theta.basis.interior_knots = m;
            ModelFit fit = fit_model(kind, data, cfg);
            if (a.boost) {
                FitConfig stage = cfg;
                stage.deriv_order = a.boost_deriv;
                fit = boost_residuals(fit, data, stage);
            }
            selection << "deriv " << q << (is_single_index(kind) ? ", knots " + std::to_string(m) : std::string())
                      << ": cv " << fmt(fit.cv_score) << '\n';
            if (!best || fit.cv_score < best->cv_score) {
                best = std::move(fit);
                best_q = q;
                best_m = m;
            }
            if (!is_single_index(kind)) break;
        }
    }
    ModelFit& fit = *best;
    fit.covariate_names = uses_scalars(kind) ? train.scalar_names : std::vector<std::string>{};
    fit.response_name = train.response_name;

    std::ostringstream s;
    s << timestamp_line(common) << "key,value\n";
    s << "model," << to_string(fit.kind) << (fit.boost ? "+fnm" : "") << '\n';
    s << "estimator," << to_string(fit.estimator) << '\n';
    s << "kernel," << to_string(fit.kernel.family) << '\n';
    s << "metric," << fit.metric_description() << '\n';
    s << "deriv," << best_q << '\n';
    if (fit.boost) s << "boost_deriv," << a.boost_deriv << '\n';
    if (is_single_index(kind)) s << "knots," << best_m << "\ntheta_index," << fit.theta_index << '\n';
    if (kind != ModelKind::lm) {
        if (fit.estimator == Estimator::knn) s << "k," << fit.k << '\n';
        else s << "h," << fmt(fit.h) << "\nh_level," << fmt(fit.h_level) << '\n';
    }
    if (kind == ModelKind::lm) s << "intercept," << fmt(fit.intercept) << '\n';
    for (std::size_t j = 0; j < fit.covariates(); ++j) {
        s << "beta[" << fit.covariate_names[j] << "]," << fmt(fit.beta(static_cast<Eigen::Index>(j))) << '\n';
    }
    s << "cv_score," << fmt(fit.cv_score) << '\n';
    s << "n_train," << train.size() << '\n';
    if (spec) s << "split," << spec->describe() << '\n';

    std::optional<double> test_msep;
    if (test) {
        std::size_t fallbacks = 0;
        const Matrix Xt = uses_scalars(kind) ? test->X : Matrix(test->X.rows(), 0);
        const auto preds = prediction_values(predict_all(fit, Xt, test->curves), &fallbacks);
        const std::vector<double> obs(test->y.data(), test->y.data() + test->y.size());
        test_msep = msep(preds, obs);
        s << "n_test," << test->size() << "\ntest_msep," << fmt(*test_msep) << "\ntest_fallbacks," << fallbacks
          << '\n';
    }

    const fs::path fit_path = output_path(a.out);
    std::ostringstream json;
    store_fit(fit, json);
    write_file_atomic(fit_path.string(), json.str());
    write_file_atomic(summary_path(fit_path).string(), s.str());

    out << selection.str();
    out << to_string(fit.kind) << (fit.boost ? "+fnm" : "") << " (" << to_string(fit.estimator) << "): cv "
        << fmt(fit.cv_score);
    if (test_msep) out << ", test MSEP " << fmt(*test_msep);
    out << "\nwrote " << fit_path.string() << " and " << summary_path(fit_path).string() << '\n';
    return 0;
}

int cmd_predict(const PredictArgs& a, const Common& common, std::ostream& out) {
    const ModelFit fit = load_fit(a.fit);
    DatasetSchema schema;
    schema.response = fit.response_name;
    schema.response_optional = true;
    const TabularFunctionalDataset data = load_dataset(a.data, schema);

    Matrix X(static_cast<Eigen::Index>(data.size()), static_cast<Eigen::Index>(fit.covariates()));
    if (fit.covariates() > 0) {
        std::vector<Eigen::Index> cols;
        for (const auto& name : fit.covariate_names) {
            const auto it = std::find(data.scalar_names.begin(), data.scalar_names.end(), name);
            if (it == data.scalar_names.end()) break;
            cols.push_back(static_cast<Eigen::Index>(it - data.scalar_names.begin()));
        }
        if (cols.size() != fit.covariates() || data.X.cols() != static_cast<Eigen::Index>(fit.covariates())) {
            std::string names;
            for (const auto& n : fit.covariate_names) names += (names.empty() ? "" : ", ") + n;
            throw DimensionError("model expects " + std::to_string(fit.covariates()) + " scalar covariate column(s) (" +
                                 names + "), data has " + std::to_string(data.X.cols()));
        }
        for (std::size_t j = 0; j < cols.size(); ++j) X.col(static_cast<Eigen::Index>(j)) = data.X.col(cols[j]);
    }
    if (data.curves.grid().size() != fit.transform->grid().size() || !(data.curves.grid() == fit.transform->grid())) {
        throw DimensionError("data has " + std::to_string(data.curves.grid().size()) +
                             " curve columns on a different grid than the fit (" +
                             std::to_string(fit.transform->grid().size()) + ")");
    }

    const auto preds = predict_all(fit, X, data.curves);
    std::ostringstream csv;
    csv << timestamp_line(common) << "row,prediction,fallback" << (data.has_response() ? ",observed" : "") << '\n';
    std::size_t fallbacks = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        csv << i + 1 << ',' << std::setprecision(17) << preds[i].value << ',' << (preds[i].fallback ? 1 : 0);
        if (data.has_response()) csv << ',' << std::setprecision(17) << data.y(static_cast<Eigen::Index>(i));
        csv << '\n';
        fallbacks += preds[i].fallback ? 1 : 0;
    }
    const fs::path path = output_path(a.out);
    std::optional<double> err;
    std::ostringstream s;
    s << timestamp_line(common) << "key,value\nn," << preds.size() << "\nfallbacks," << fallbacks << '\n';
    if (data.has_response()) {
        const std::vector<double> obs(data.y.data(), data.y.data() + data.y.size());
        err = msep(prediction_values(preds, nullptr), obs);
        s << "msep," << fmt(*err) << '\n';
    }
    write_file_atomic(path.string(), csv.str());
    write_file_atomic(summary_path(path).string(), s.str());
    if (err) out << "MSEP " << fmt(*err) << " on " << preds.size() << " curve(s)\n";
    out << "wrote " << path.string() << '\n';
    return 0;
}

// ---- report

std::vector<std::vector<std::string>> read_csv_rows(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw LoadError("cannot open '" + p.string() + "'");
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cells.push_back(c);
        rows.push_back(std::move(cells));
    }
    return rows;
}

struct SimRow {
    std::string n, rho, alpha, estimator;
    std::map<std::string, std::string> metrics;
};

struct FitRow {
    std::string model, deriv, estimator, msep;
};

double as_number(const std::string& s) {
    try {
        return std::stod(s);
    } catch (...) {
        return std::nan("");
    }
}

bool numeric_less(const std::string& a, const std::string& b) {
    const double x = as_number(a), y = as_number(b);
    if (std::isnan(x) || std::isnan(y)) return a < b;
    return x < y;
}

int cmd_report(const ReportArgs& a, const Common& common, std::ostream& out) {
    const fs::path in(a.in);
    if (!fs::is_directory(in)) throw ConfigError("report input '" + a.in + "' is not a directory");
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(in)) {
        if (!e.is_regular_file()) continue;
        const std::string name = e.path().filename().string();
        if (name.size() >= 11 && name.compare(name.size() - 11, 11, "summary.csv") == 0) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());

    std::vector<SimRow> sims;
    std::vector<FitRow> fits;
    for (const auto& f : files) {
        const auto rows = read_csv_rows(f);
        if (rows.empty()) continue;
        const auto& h = rows[0];
        if (h.size() >= 5 && h[0] == "n" && h[1] == "rho" && h[2] == "alpha") {
            for (std::size_t r = 1; r < rows.size(); ++r) {
                SimRow s;
                std::map<std::string, std::string> cell;
                for (std::size_t c = 0; c < h.size() && c < rows[r].size(); ++c) cell[h[c]] = rows[r][c];
                s.n = cell["n"];
                s.rho = cell["rho"];
                s.alpha = cell["alpha"];
                s.estimator = cell["estimator"];
                s.metrics = cell;
                sims.push_back(std::move(s));
            }
        } else if (h.size() == 2 && h[0] == "key" && h[1] == "value") {
            std::map<std::string, std::string> kv;
            for (std::size_t r = 1; r < rows.size(); ++r) {
                if (rows[r].size() >= 2) kv[rows[r][0]] = rows[r][1];
            }
            if (!kv.count("model") || !kv.count("estimator")) continue;
            FitRow fr{kv["model"], kv["deriv"], kv["estimator"],
                      kv.count("test_msep") ? kv["test_msep"] : std::string("NA")};
            fits.push_back(std::move(fr));
        }
    }
    if (sims.empty() && fits.empty()) throw ConfigError("no summary files found under '" + a.in + "'");

    std::ostringstream md, csv;
    md << timestamp_line(common);
    csv << timestamp_line(common);
    if (!sims.empty()) {
        std::set<std::string, decltype(&numeric_less)> ns(&numeric_less);
        std::set<std::pair<std::string, std::string>> groups;
        for (const auto& s : sims) {
            ns.insert(s.n);
            groups.insert({s.alpha, s.rho});
        }
        std::vector<std::pair<std::string, std::string>> order(groups.begin(), groups.end());
        std::sort(order.begin(), order.end(), [](const auto& x, const auto& y) {
            if (x.first != y.first) return numeric_less(y.first, x.first);
            return numeric_less(x.second, y.second);
        });
        const auto lookup = [&](const std::string& metric, const std::string& alpha, const std::string& rho,
                                const std::string& n, const std::string& est) -> std::string {
            for (const auto& s : sims) {
                if (s.alpha == alpha && s.rho == rho && s.n == n && s.estimator == est) {
                    auto it = s.metrics.find(metric);
                    return it == s.metrics.end() ? "NA" : it->second;
                }
            }
            return "-";
        };
        csv << "metric,alpha,rho";
        for (const auto& n : ns) csv << ",n=" << n << " kernel,n=" << n << " knn";
        csv << '\n';
        for (const std::string metric : {"msep", "beta_err", "theta_err"}) {
            md << "## Simulation: averaged " << metric << "\n\n| alpha | rho |";
            for (const auto& n : ns) md << " n=" << n << " kernel | n=" << n << " kNN |";
            md << "\n|---|---|";
            for (std::size_t i = 0; i < ns.size(); ++i) md << "---|---|";
            md << '\n';
            for (const auto& [alpha, rho] : order) {
                md << "| " << alpha << " | " << rho << " |";
                csv << metric << ',' << alpha << ',' << rho;
                for (const auto& n : ns) {
                    const auto k = lookup(metric, alpha, rho, n, "kernel");
                    const auto knn = lookup(metric, alpha, rho, n, "knn");
                    md << ' ' << k << " | " << knn << " |";
                    csv << ',' << k << ',' << knn;
                }
                md << '\n';
                csv << '\n';
            }
            md << '\n';
        }
    }
    if (!fits.empty()) {
        std::vector<std::string> models;
        for (const auto& f : fits) {
            const std::string label = f.model + (f.deriv.empty() || f.deriv == "0" ? "" : " (deriv " + f.deriv + ")");
            if (std::find(models.begin(), models.end(), label) == models.end()) models.push_back(label);
        }
        std::ostringstream fcsv;
        md << "## Test MSEP by model\n\n| model | kernel | kNN |\n|---|---|---|\n";
        fcsv << "model,kernel,knn\n";
        for (const auto& label : models) {
            std::string k = "-", knn = "-";
            for (const auto& f : fits) {
                const std::string l = f.model + (f.deriv.empty() || f.deriv == "0" ? "" : " (deriv " + f.deriv + ")");
                if (l != label) continue;
                (f.estimator == "knn" ? knn : k) = f.msep;
            }
            md << "| " << label << " | " << k << " | " << knn << " |\n";
            fcsv << label << ',' << k << ',' << knn << '\n';
        }
        if (sims.empty()) {
            csv << fcsv.str();
        } else {
            csv << "\n" << fcsv.str();
        }
    }

    const fs::path dir = a.out.empty() ? in : fs::path(a.out);
    ensure_dir(dir);
    write_file_atomic((dir / "report.md").string(), md.str());
    write_file_atomic((dir / "report.csv").string(), csv.str());
    out << "aggregated " << files.size() << " summary file(s); wrote " << (dir / "report.md").string() << " and "
        << (dir / "report.csv").string() << '\n';
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Semi-functional partial linear single-index regression with kNN and kernel estimators", "sfpl"};
    app.require_subcommand(1);
    Common common;
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--threads", common.threads, "Worker threads (0 = all cores)");
        sub->add_option("--simd", common.simd, "Kernel backend: scalar, avx2 or auto");
        sub->add_flag("--no-timestamp", common.no_timestamp, "Omit the timestamp header line from outputs");
    };

    SimulateArgs sa;
    auto* sim = app.add_subcommand("simulate", "Run a simulation scenario");
    sim->add_option("--scenario", sa.scenario, "Scenario file (key = value)")->check(CLI::ExistingFile);
    sim->add_option("--replicates", sa.replicates, "Number of replicates M");
    sim->add_option("--seed", sa.seed, "Master seed");
    sim->add_option("--n", sa.n, "Training sample size");
    sim->add_option("--rho", sa.rho, "Covariate correlation");
    sim->add_option("--alpha", sa.alpha, "Single-index share of the functional effect");
    sim->add_option("--out", sa.out, "Output directory (default $SFPL_OUT_DIR or ./sfpl_out)");
    add_common(sim);

    FitArgs fa;
    auto* fit = app.add_subcommand("fit", "Fit a model to a dataset");
    fit->add_option("--data", fa.data, "Dataset CSV")->required()->check(CLI::ExistingFile);
    fit->add_option("--model", fa.model, "sfplsim, sfplm, fsim, fnm or lm")
        ->check(CLI::IsMember({"sfplsim", "sfplm", "fsim", "fnm", "lm"}));
    fit->add_option("--estimator", fa.estimator, "knn or kernel")->check(CLI::IsMember({"knn", "kernel"}));
    fit->add_option("--out", fa.out, "Fit file to write")->required();
    fit->add_option("--response", fa.response, "Response column");
    auto* scalars = fit->add_option("--scalars", fa.scalars, "Scalar covariate columns")->delimiter(',');
    fit->add_option("--split", fa.split, "head:N or shuffle:N:SEED; fit on the first part, report test MSEP");
    fit->add_option("--kernel", fa.kernel, "uniform_half, quadratic or triangular");
    fit->add_option("--folds", fa.folds, "Cross-validation folds");
    fit->add_option("--seed", fa.seed, "Fold assignment seed");
    fit->add_option("--k-grid", fa.k_grid, "Candidate neighbour counts")->delimiter(',');
    fit->add_option("--h-levels", fa.h_levels, "Candidate bandwidth quantile levels")->delimiter(',');
    fit->add_option("--deriv", fa.deriv, "Candidate derivative orders q")->delimiter(',');
    fit->add_option("--knots", fa.knots, "Candidate interior knot counts for the direction basis")->delimiter(',');
    fit->add_option("--theta-order", fa.theta_order, "Spline order of the direction basis");
    fit->add_option("--theta-levels", fa.theta_levels, "Coefficient levels of candidate directions")->delimiter(',');
    fit->add_option("--deriv-basis-order", fa.deriv_basis_order, "Spline order used to differentiate curves");
    fit->add_option("--deriv-basis-knots", fa.deriv_basis_knots, "Interior knots used to differentiate curves");
    fit->add_flag("--boost", fa.boost, "Add an fnm stage on the fsim residuals");
    fit->add_option("--boost-deriv", fa.boost_deriv, "Derivative order of the boosting stage");
    add_common(fit);

    PredictArgs pa;
    auto* pred = app.add_subcommand("predict", "Predict with a stored fit");
    pred->add_option("--fit", pa.fit, "Fit file")->required()->check(CLI::ExistingFile);
    pred->add_option("--data", pa.data, "Dataset CSV")->required()->check(CLI::ExistingFile);
    pred->add_option("--out", pa.out, "Predictions CSV")->required();
    add_common(pred);

    ReportArgs ra;
    auto* rep = app.add_subcommand("report", "Aggregate summary CSVs into comparison tables");
    rep->add_option("--in", ra.in, "Directory holding summary CSVs")->required();
    rep->add_option("--out", ra.out, "Output directory (default: --in)");
    add_common(rep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }
    fa.scalars_given = scalars->count() > 0;

    try {
        apply_common(common);
        if (*sim) return cmd_simulate(sa, common, out);
        if (*fit) return cmd_fit(fa, common, out);
        if (*pred) return cmd_predict(pa, common, out);
        if (*rep) return cmd_report(ra, common, out);
    } catch (const std::exception& e) {
        err << "sfpl: error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv;
    argv.push_back("sfpl");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace sfpl
