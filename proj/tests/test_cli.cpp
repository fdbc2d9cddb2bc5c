#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "sfpl/cli.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kTecator = std::string(SFPL_DATA_DIR) + "/tecator.csv";

struct Run {
    int status;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int status = sfpl::run_cli(args, out, err);
    return {status, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag)
        : path(fs::temp_directory_path() / ("sfpl_cli_" + tag + "_" + std::to_string(::getpid()))) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

fs::path small_scenario(const fs::path& dir) {
    const auto p = dir / "small.cfg";
    std::ofstream(p) << "# reduced grids\n"
                        "n = 40\nreplicates = 3\nseed = 11\n"
                        "k_grid = 5,9,13\nh_levels = 0.1,0.3\n"
                        "theta_order = 3\ntheta_knots = 1\nfolds = 5\n";
    return p;
}

std::size_t count_files(const fs::path& dir) {
    std::size_t n = 0;
    for ([[maybe_unused]] const auto& e : fs::recursive_directory_iterator(dir)) ++n;
    return n;
}

}  // namespace

TEST_CASE("simulate writes replicate and summary tables") {
    TempDir tmp("sim");
    const auto cfg = small_scenario(tmp.path);
    const auto r = run({"simulate", "--scenario", cfg.string(), "--out", (tmp.path / "a").string()});
    REQUIRE_MESSAGE(r.status == 0, r.err);
    const auto summary = slurp(tmp.path / "a" / "summary.csv");
    CHECK(summary.rfind("# generated", 0) == 0);
    CHECK(summary.find(",knn,3,0,") != std::string::npos);
    CHECK(summary.find(",kernel,3,0,") != std::string::npos);
    const auto reps = slurp(tmp.path / "a" / "replicates.csv");
    CHECK(reps.find("n,rho,alpha,noise_ratio,replicate,estimator") != std::string::npos);
}

TEST_CASE("simulate output is deterministic and thread independent") {
    TempDir tmp("det");
    const auto cfg = small_scenario(tmp.path);
    for (const char* threads : {"1", "4"}) {
        const auto r = run({"simulate", "--scenario", cfg.string(), "--no-timestamp", "--threads", threads,
                            "--out", (tmp.path / threads).string()});
        REQUIRE_MESSAGE(r.status == 0, r.err);
    }
    const auto again = run({"simulate", "--scenario", cfg.string(), "--no-timestamp", "--threads", "1",
                            "--out", (tmp.path / "again").string()});
    REQUIRE(again.status == 0);
    for (const char* f : {"summary.csv", "replicates.csv"}) {
        const auto a = slurp(tmp.path / "1" / f);
        CHECK(a.rfind("n,", 0) == 0);
        CHECK(a == slurp(tmp.path / "4" / f));
        CHECK(a == slurp(tmp.path / "again" / f));
    }
}

TEST_CASE("SFPL_OUT_DIR sets the default output location") {
    TempDir tmp("env");
    const auto cfg = small_scenario(tmp.path);
    ::setenv("SFPL_OUT_DIR", (tmp.path / "env_out").c_str(), 1);
    const auto r = run({"simulate", "--scenario", cfg.string(), "--replicates", "1", "--no-timestamp"});
    ::unsetenv("SFPL_OUT_DIR");
    REQUIRE_MESSAGE(r.status == 0, r.err);
    CHECK(fs::exists(tmp.path / "env_out" / "summary.csv"));
}

TEST_CASE("argument errors exit nonzero") {
    CHECK(run({"simulate", "--bogus"}).status != 0);
    CHECK(run({}).status != 0);
    CHECK(run({"fit", "--out", "x.json"}).status != 0);
    CHECK(run({"simulate", "--n", "5", "--out", "/tmp/never"}).status != 0);
    CHECK_FALSE(fs::exists("/tmp/never/summary.csv"));
    const auto bad = run({"simulate", "--rho", "1.5", "--out", "/tmp/never"});
    CHECK(bad.status == 1);
    CHECK(bad.err.find("sfpl: error:") != std::string::npos);
}

TEST_CASE("fit, predict and report on Tecator") {
    if (!fs::exists(kTecator)) {
        MESSAGE("Tecator data not present; skipping");
        return;
    }
    TempDir tmp("fit");
    const auto fit_path = (tmp.path / "runs" / "sfplsim_knn.json").string();
    fs::create_directories(tmp.path / "runs");
    const auto fit = run({"fit", "--data", kTecator, "--model", "sfplsim", "--estimator", "knn",
                          "--scalars", "protein,moisture", "--split", "head:160", "--deriv", "1",
                          "--knots", "1", "--k-grid", "5,10,20", "--out", fit_path, "--no-timestamp"});
    REQUIRE_MESSAGE(fit.status == 0, fit.err);
    CHECK(fs::exists(fit_path));
    const auto fit_summary = slurp(tmp.path / "runs" / "sfplsim_knn_summary.csv");
    CHECK(fit_summary.find("test_msep,") != std::string::npos);

    const auto pred_path = (tmp.path / "pred.csv").string();
    const auto pred = run({"predict", "--fit", fit_path, "--data", kTecator, "--out", pred_path});
    REQUIRE_MESSAGE(pred.status == 0, pred.err);
    CHECK(pred.out.find("MSEP ") != std::string::npos);
    std::ifstream in(pred_path);
    std::size_t lines = 0;
    for (std::string line; std::getline(in, line);)
        if (!line.empty() && line[0] != '#') ++lines;
    CHECK(lines == 216);

    // Drop one scalar column: the stored model expects two.
    const auto reduced = tmp.path / "reduced.csv";
    {
        std::ifstream src(kTecator);
        std::ofstream dst(reduced);
        std::size_t drop = 0;
        bool header = true;
        for (std::string line; std::getline(src, line);) {
            std::vector<std::string> cells;
            std::stringstream ss(line);
            for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
            if (header) {
                drop = static_cast<std::size_t>(std::find(cells.begin(), cells.end(), "moisture") - cells.begin());
                header = false;
            }
            std::string joined;
            for (std::size_t i = 0; i < cells.size(); ++i)
                if (i != drop) joined += (joined.empty() ? "" : ",") + cells[i];
            dst << joined << '\n';
        }
    }
    const auto bad_out = tmp.path / "bad_pred.csv";
    const auto bad = run({"predict", "--fit", fit_path, "--data", reduced.string(), "--out", bad_out.string()});
    CHECK(bad.status != 0);
    CHECK(bad.err.find("model expects 2 scalar covariate column(s)") != std::string::npos);
    CHECK_FALSE(fs::exists(bad_out));
}

TEST_CASE("report aggregates summaries") {
    TempDir tmp("report");
    const auto cfg = small_scenario(tmp.path);
    for (const char* n : {"40", "60"}) {
        const auto r = run({"simulate", "--scenario", cfg.string(), "--n", n, "--replicates", "2",
                            "--out", (tmp.path / "runs" / n).string()});
        REQUIRE_MESSAGE(r.status == 0, r.err);
    }
    const auto r = run({"report", "--in", (tmp.path / "runs").string(), "--out", (tmp.path / "rep").string()});
    REQUIRE_MESSAGE(r.status == 0, r.err);
    const auto md = slurp(tmp.path / "rep" / "report.md");
    CHECK(md.find("msep") != std::string::npos);
    CHECK(md.find("kNN") != std::string::npos);
    CHECK(fs::exists(tmp.path / "rep" / "report.csv"));
    CHECK(run({"report", "--in", (tmp.path / "missing").string()}).status != 0);
}
