#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>

#include "sfpl/dataio.hpp"
#include "sfpl/error.hpp"
#include "sfpl/fit.hpp"
#include "support.hpp"

using namespace sfpl;
namespace fs = std::filesystem;

namespace {

const std::string kTecator = std::string(SFPL_DATA_DIR) + "/tecator.csv";

const char* kToy =
    "id,x1,1.5,0.5,1.0,y\n"
    "1,0.25,3,1,2,10.5\n"
    "2,-1e-3,6,4,5,11\n"
    "3,7,9,7,8,-2.25\n";

TabularFunctionalDataset toy(DatasetSchema schema = {"y", std::vector<std::string>{"x1"}, false}) {
    std::istringstream in(kToy);
    return parse_dataset(in, schema, "toy.csv");
}

TabularFunctionalDataset synthetic(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto curves = test::random_curves(rng, n, 30);
    Matrix X = test::random_matrix(rng, n, 2);
    Vector y(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = curves.curve(i);
        y(static_cast<Eigen::Index>(i)) = X(static_cast<Eigen::Index>(i), 0) - 2 * X(static_cast<Eigen::Index>(i), 1) + c[5] * c[20];
    }
    std::vector<std::string> names;
    for (std::size_t g = 0; g < 30; ++g) names.push_back(std::to_string(g));
    return {std::move(X), std::move(curves), std::move(y), {"u", "v"}, "y", names};
}

fs::path temp_dir() {
    auto p = fs::temp_directory_path() / ("sfpl_dataio_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("toy dataset parses with sorted curve columns") {
    const auto d = toy();
    CHECK(d.size() == 3);
    CHECK(d.scalar_names == std::vector<std::string>{"x1"});
    CHECK(d.curve_columns == std::vector<std::string>{"0.5", "1.0", "1.5"});
    CHECK(d.curves.grid()[0] == 0.5);
    CHECK(d.curves.values()(1, 0) == 4.0);
    CHECK(d.curves.values()(1, 2) == 6.0);
    CHECK(d.X(1, 0) == -1e-3);
    CHECK(d.y(2) == -2.25);

    const auto all = toy({"y", std::nullopt, false});
    CHECK(all.scalar_names == std::vector<std::string>{"id", "x1"});
}

TEST_CASE("toy dataset round-trips exactly") {
    const auto d = toy();
    std::ostringstream out;
    write_dataset(out, d);
    std::istringstream in(out.str());
    const auto back = parse_dataset(in, {"y", std::vector<std::string>{"x1"}, false});
    CHECK(back.X == d.X);
    CHECK(back.y == d.y);
    CHECK(back.curves.values() == d.curves.values());
    CHECK(back.curves.grid() == d.curves.grid());
}

TEST_CASE("load errors name the offending cell") {
    const auto parse = [](const std::string& text, DatasetSchema schema = {"y", std::nullopt, false}) {
        std::istringstream in(text);
        return parse_dataset(in, schema, "bad.csv");
    };
    CHECK_THROWS_WITH_AS(parse("x,1,2,y\n1,2,,4\n"), doctest::Contains("row 1 (line 2), column '2': missing value"),
                         LoadError);
    CHECK_THROWS_WITH_AS(parse("x,1,2,y\n1,2,3,4\n1,2,abc,4\n"), doctest::Contains("row 2 (line 3), column '2'"),
                         LoadError);
    CHECK_THROWS_WITH_AS(parse("x,1,1.0,y\n1,2,3,4\n"), doctest::Contains("share the abscissa"), LoadError);
    CHECK_THROWS_WITH_AS(parse("x,1,2,z\n1,2,3,4\n"), doctest::Contains("response column 'y'"), LoadError);
    CHECK_THROWS_WITH_AS(parse("x,1,2,y\n1,2,3\n"), doctest::Contains("has 3 fields"), LoadError);
    CHECK_THROWS_AS(parse("x,1,2,y\n1,2,NA,4\n"), LoadError);
    CHECK_THROWS_AS(parse(""), LoadError);
    CHECK_THROWS_AS(parse("x,1,2,y\n"), LoadError);
    CHECK_THROWS_AS(parse("x,1,2,y\n1,2,3,4\n", {"y", std::vector<std::string>{"w"}, false}), LoadError);
    CHECK_THROWS_AS(load_dataset("/nonexistent.csv", {"y", std::nullopt, false}), LoadError);

    const auto noy = parse("x,1,2\n1,2,3\n", {"y", std::nullopt, true});
    CHECK_FALSE(noy.has_response());
    CHECK_THROWS_AS((void)noy.training(), ConfigError);
}

TEST_CASE("Tecator file layout") {
    if (!fs::exists(kTecator)) {
        MESSAGE("Tecator data not present; skipping");
        return;
    }
    const auto d = load_dataset(kTecator, {"fat", std::vector<std::string>{"protein", "moisture"}, false});
    CHECK(d.size() == 215);
    CHECK(d.X.cols() == 2);
    CHECK(d.curves.grid().size() == 100);
    CHECK(d.curves.grid().lo() == 850.0);
    CHECK(d.curves.grid().hi() == 1050.0);
    CHECK(d.y(0) == 22.5);

    const auto [train, test] = split(d, SplitSpec::head_tail(160));
    CHECK(train.size() == 160);
    CHECK(test.size() == 55);
    CHECK(train.y(0) == d.y(0));
    CHECK(test.y(0) == d.y(160));
    CHECK(test.curves.values().row(54) == d.curves.values().row(214));
}

TEST_CASE("splits") {
    const auto [tr, te] = split_indices(10, SplitSpec::head_tail(9));
    CHECK(te == std::vector<std::size_t>{9});
    CHECK_THROWS_AS(split_indices(10, SplitSpec::head_tail(0)), ConfigError);
    CHECK_THROWS_AS(split_indices(10, SplitSpec::head_tail(10)), ConfigError);

    const auto a = split_indices(50, SplitSpec::seeded_shuffle(30, 4));
    const auto b = split_indices(50, SplitSpec::seeded_shuffle(30, 4));
    CHECK(a == b);
    std::vector<std::size_t> all = a.first;
    all.insert(all.end(), a.second.begin(), a.second.end());
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < 50; ++i) CHECK(all[i] == i);

    CHECK(SplitSpec::parse("head:160").n_train == 160);
    const auto s = SplitSpec::parse("shuffle:100:7");
    CHECK(s.mode == SplitSpec::Mode::seeded_shuffle);
    CHECK(s.seed == 7);
    CHECK(s.describe() == "shuffle:100:7");
    CHECK_THROWS_AS(SplitSpec::parse("tail:3"), ConfigError);
    CHECK_THROWS_AS(SplitSpec::parse("head:x"), ConfigError);
}

TEST_CASE("split conserves rows") {
    const auto d = synthetic(40, 2);
    const auto [tr, te] = split(d, SplitSpec::seeded_shuffle(25, 9));
    CHECK(tr.size() + te.size() == 40);
    std::vector<double> ys(tr.y.data(), tr.y.data() + tr.y.size());
    ys.insert(ys.end(), te.y.data(), te.y.data() + te.y.size());
    std::vector<double> orig(d.y.data(), d.y.data() + d.y.size());
    std::sort(ys.begin(), ys.end());
    std::sort(orig.begin(), orig.end());
    CHECK(ys == orig);
}

TEST_CASE("fit files round-trip and predict identically") {
    const auto d = synthetic(70, 3);
    const auto [train, test] = split(d, SplitSpec::head_tail(60));
    FitConfig cfg;
    cfg.k_grid = {5, 9};
    cfg.folds = 5;
    cfg.deriv_order = 1;
    cfg.deriv_basis = {4, 6};
    cfg.theta.basis = {3, 1};

    for (ModelKind kind : {ModelKind::sfplsim, ModelKind::sfplm, ModelKind::fsim, ModelKind::lm}) {
        for (Estimator est : {Estimator::knn, Estimator::kernel}) {
            cfg.estimator = est;
            TrainingData data = train.training();
            if (!uses_scalars(kind)) data.X = Matrix(data.X.rows(), 0);
            ModelFit fit = fit_model(kind, data, cfg);
            if (kind == ModelKind::fsim) fit = boost_residuals(fit, data, cfg);
            fit.covariate_names = uses_scalars(kind) ? train.scalar_names : std::vector<std::string>{};
            fit.response_name = "y";

            std::stringstream buf;
            store_fit(fit, buf);
            const ModelFit back = load_fit(buf);
            CAPTURE(to_string(kind));
            CAPTURE(to_string(est));
            CHECK(back.kind == fit.kind);
            CHECK(back.estimator == fit.estimator);
            CHECK(back.beta == fit.beta);
            CHECK(back.intercept == fit.intercept);
            CHECK(back.k == fit.k);
            CHECK(back.h == fit.h);
            CHECK(back.h_level == fit.h_level);
            CHECK(back.theta_index == fit.theta_index);
            CHECK(back.theta.has_value() == fit.theta.has_value());
            if (fit.theta) CHECK(std::ranges::equal(back.theta->values(), fit.theta->values()));
            CHECK(back.pseudo_responses == fit.pseudo_responses);
            CHECK(back.projections == fit.projections);
            CHECK(back.trace.size() == fit.trace.size());
            CHECK(back.selected == fit.selected);
            CHECK(back.cv_score == fit.cv_score);
            CHECK(back.checksum == fit.checksum);
            CHECK(back.covariate_names == fit.covariate_names);
            CHECK(back.metric_description() == fit.metric_description());
            CHECK(static_cast<bool>(back.boost) == static_cast<bool>(fit.boost));

            const Matrix Xt = uses_scalars(kind) ? test.X : Matrix(test.X.rows(), 0);
            const auto p1 = predict_all(fit, Xt, test.curves);
            const auto p2 = predict_all(back, Xt, test.curves);
            REQUIRE(p1.size() == 10);
            for (std::size_t i = 0; i < p1.size(); ++i) CHECK(std::abs(p1[i].value - p2[i].value) <= 1e-12);
        }
    }
}

TEST_CASE("fit file errors") {
    const auto d = synthetic(40, 4);
    FitConfig cfg;
    cfg.k_grid = {5};
    cfg.folds = 4;
    cfg.theta.basis = {3, 0};
    const ModelFit fit = fit_model(ModelKind::sfplsim, d.training(), cfg);
    std::stringstream buf;
    store_fit(fit, buf);
    const std::string text = buf.str();

    std::istringstream truncated(text.substr(0, text.size() / 2));
    CHECK_THROWS_AS(load_fit(truncated), LoadError);

    std::string versioned = text;
    versioned.replace(versioned.find("\"schema_version\": 1"), 19, "\"schema_version\": 99");
    std::istringstream v(versioned);
    CHECK_THROWS_WITH_AS(load_fit(v), doctest::Contains("schema version 99"), SchemaError);

    std::string tampered = text;
    const auto pos = tampered.find("\"y\": [") + 8;
    tampered[pos] = tampered[pos] == '1' ? '2' : '1';
    std::istringstream t(tampered);
    CHECK_THROWS_AS(load_fit(t), LoadError);

    std::istringstream other("{\"hello\": 1}");
    CHECK_THROWS_AS(load_fit(other), LoadError);
}

TEST_CASE("atomic file writes") {
    const auto dir = temp_dir();
    const auto path = (dir / "out.json").string();
    write_file_atomic(path, "first");
    write_file_atomic(path, "second");
    std::ifstream in(path);
    std::string content;
    std::getline(in, content);
    CHECK(content == "second");
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
    CHECK(files == 1);
    CHECK_THROWS(write_file_atomic((dir / "missing" / "x.json").string(), "x"));
    fs::remove_all(dir);
}
