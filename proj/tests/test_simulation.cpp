#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "sfpl/error.hpp"
#include "sfpl/simulation.hpp"

using namespace sfpl;

namespace {

SimulationScenario small_scenario() {
    SimulationScenario s;
    s.n = 40;
    s.replicates = 3;
    s.seed = 99;
    return s;
}

FitConfig quick_fit() {
    FitConfig f;
    f.k_grid = {4, 8};
    f.h_levels = {0.1, 0.3};
    f.folds = 5;
    f.theta.levels = {-1.0, 0.0, 1.0};
    f.theta.basis = {3, 1};
    return f;
}

}  // namespace

TEST_CASE("scenario validation") {
    SimulationScenario s;
    CHECK_NOTHROW(s.validate());
    s.n = 29;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = {};
    s.rho = 1.0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = {};
    s.alpha = 1.5;
    CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("generated curves follow the stated design") {
    const SimulationScenario s = small_scenario();
    const auto d = gen_dataset(s, 0);
    REQUIRE(d.curves.size() == 65);
    REQUIRE(d.X.rows() == 65);
    REQUIRE(d.X.cols() == 3);
    CHECK(d.curves.grid().size() == 100);
    for (Eigen::Index i = 0; i < 65; ++i) {
        for (double v : {d.truth.a(i), d.truth.b(i), d.truth.c(i)}) {
            CHECK(((v >= 5.0 && v <= 10.0) || (v >= 20.0 && v <= 20.5)));
        }
        const double t = d.curves.grid()[37];
        const double want = d.truth.a(i) * std::cos(2 * std::numbers::pi * t) +
                            d.truth.b(i) * std::sin(4 * std::numbers::pi * t) + 2 * d.truth.c(i) * (t - 0.25) * (t - 0.5);
        CHECK(d.curves.values()(i, 37) == doctest::Approx(want).epsilon(1e-14));
        const double u = project(*d.truth.theta, d.curves.curve(static_cast<std::size_t>(i)));
        CHECK(d.truth.index(i) == u);
        const double reg = d.X.row(i).dot(d.truth.beta) + u * u * u;
        CHECK(d.truth.regression(i) == doctest::Approx(reg).epsilon(1e-14));
        CHECK(d.y(i) == d.truth.regression(i) + d.truth.noise(i));
    }
    CHECK(d.truth.noise_variance == doctest::Approx(0.025 * d.truth.regression_variance));
}

TEST_CASE("mixing weight alpha blends the two functional effects") {
    SimulationScenario s = small_scenario();
    s.alpha = 0.8;
    const auto d = gen_dataset(s, 1);
    for (Eigen::Index i = 0; i < 5; ++i) {
        const double u = d.truth.index(i);
        const double reg = d.X.row(i).dot(d.truth.beta) + 0.8 * u * u * u + 0.2 * 2.0 * std::sqrt(d.truth.c(i));
        CHECK(d.truth.regression(i) == doctest::Approx(reg).epsilon(1e-14));
    }
}

TEST_CASE("generation is reproducible per replicate") {
    const SimulationScenario s = small_scenario();
    const auto a = gen_dataset(s, 2), b = gen_dataset(s, 2), c = gen_dataset(s, 3);
    CHECK(a.y == b.y);
    CHECK(a.X == b.X);
    CHECK(a.y != c.y);
}

TEST_CASE("noise and covariate moments") {
    SimulationScenario s;
    s.n = 200;
    s.rho = 0.5;
    double ratio = 0.0, c01 = 0.0, c02 = 0.0;
    const int reps = 20;
    for (int r = 0; r < reps; ++r) {
        const auto d = gen_dataset(s, static_cast<std::size_t>(r));
        const double m = d.truth.noise.mean();
        const double v = (d.truth.noise.array() - m).square().sum() / static_cast<double>(d.truth.noise.size() - 1);
        ratio += v / (0.025 * d.truth.regression_variance) / reps;
        const double n = static_cast<double>(d.X.rows());
        c01 += d.X.col(0).dot(d.X.col(1)) / n / reps;
        c02 += d.X.col(0).dot(d.X.col(2)) / n / reps;
    }
    CHECK(ratio == doctest::Approx(1.0).epsilon(0.2));
    CHECK(c01 == doctest::Approx(0.5).epsilon(0.15));
    CHECK(c02 == doctest::Approx(0.25).epsilon(0.3));
}

TEST_CASE("true direction") {
    auto grid = std::make_shared<const Grid>(Grid::equispaced(0.0, 1.0, 100));
    const Direction th = true_direction(std::make_shared<const BSplineBasis>(build_basis(*grid, 3, 3)), grid);
    // scipy BSpline + numpy.trapezoid on the same 100-point grid: 1.202406999602355.
    CHECK(th.coeffs()[0] == doctest::Approx(1.202406999602355).epsilon(1e-10));
    CHECK_THROWS_AS(true_direction(std::make_shared<const BSplineBasis>(build_basis(*grid, 3, 4)), grid), ConfigError);
}

TEST_CASE("metrics") {
    const std::vector<double> p{1.0, 2.0, 3.0}, a{1.0, 1.0, 5.0};
    CHECK(msep(p, a) == doctest::Approx(5.0 / 3.0));
    CHECK_THROWS_AS(msep(p, std::vector<double>{1.0}), DimensionError);

    const auto d = gen_dataset(small_scenario(), 0);
    ModelFit fit;
    fit.beta = d.truth.beta;
    fit.theta = *d.truth.theta;
    const auto e = param_errors(fit, d.truth);
    CHECK(e.beta_err == 0.0);
    CHECK(e.theta_err == 0.0);
    fit.beta(0) += 0.1;
    CHECK(param_errors(fit, d.truth).beta_err == doctest::Approx(0.01));
    fit.theta.reset();
    CHECK_THROWS_AS(param_errors(fit, d.truth), ConfigError);
}

TEST_CASE("scenario runs are deterministic and independent of threads") {
    const SimulationScenario s = small_scenario();
    const auto configs = scenario_fit_configs(s, quick_fit());
    REQUIRE(configs.size() == 2);
    const auto one = run_scenario(s, configs, 1);
    const auto many = run_scenario(s, configs, 3);
    std::ostringstream a, b, sa, sb;
    write_replicates_csv(a, one);
    write_replicates_csv(b, many);
    write_summary_csv(sa, one);
    write_summary_csv(sb, many);
    CHECK(a.str() == b.str());
    CHECK(sa.str() == sb.str());
    CHECK(one.records.size() == 6);
    REQUIRE(one.summary.size() == 2);
    CHECK(one.summary[0].estimator == Estimator::knn);
    CHECK(one.summary[0].replicates == 3);
    CHECK(sa.str().rfind("n,rho,alpha,noise_ratio,estimator,replicates,failed,msep,beta_err,theta_err\n", 0) == 0);
    for (const auto& r : one.records) CHECK(r.ok);
}

TEST_CASE("replicate failures are recorded, not thrown") {
    const SimulationScenario s = small_scenario();
    FitConfig bad = quick_fit();
    bad.k_grid = {1000};
    const auto configs = scenario_fit_configs(s, bad);
    const auto r = run_scenario(s, std::span<const FitConfig>(configs.data(), 1), 2);
    for (const auto& rec : r.records) {
        CHECK_FALSE(rec.ok);
        CHECK_FALSE(rec.error.empty());
    }
    CHECK(std::isnan(r.summary[0].msep));
    std::ostringstream out;
    write_replicates_csv(out, r);
    CHECK(out.str().find("error: ") != std::string::npos);
}

TEST_CASE("scenario file parsing") {
    std::istringstream in(
        "# corner case\n"
        "n = 50\n"
        "rho: 0.5   # correlated\n"
        "alpha = 0.9\n"
        "replicates = 7\n"
        "seed = 3\n"
        "k_grid = 3, 5, 8\n"
        "kernel = triangular\n"
        "theta_knots = 2\n");
    const ScenarioFile f = parse_scenario(in);
    CHECK(f.scenario.n == 50);
    CHECK(f.scenario.rho == 0.5);
    CHECK(f.scenario.alpha == 0.9);
    CHECK(f.scenario.replicates == 7);
    CHECK(f.scenario.seed == 3);
    CHECK(f.fit.k_grid == std::vector<int>{3, 5, 8});
    CHECK(f.fit.kernel.family == KernelFamily::triangular);
    CHECK(f.fit.theta.basis.interior_knots == 2);

    std::istringstream unknown("n = 50\ncolour = red\n");
    CHECK_THROWS_WITH_AS(parse_scenario(unknown), doctest::Contains("unknown key 'colour'"), ConfigError);
    std::istringstream junk("rho = lots\n");
    CHECK_THROWS_AS(parse_scenario(junk), ConfigError);
    std::istringstream tiny("n = 10\n");
    CHECK_THROWS_AS(parse_scenario(tiny), ConfigError);
    CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.cfg"), ConfigError);
}
