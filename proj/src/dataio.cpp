#include "sfpl/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>
#include <unistd.h>

#include "sfpl/error.hpp"

namespace sfpl {

namespace {

using json = nlohmann::json;

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::optional<double> parse_number(std::string_view s) {
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

bool is_missing(const std::string& cell) {
    return cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan" || cell == "null";
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

TabularFunctionalDataset TabularFunctionalDataset::subset(std::span<const std::size_t> rows) const {
    const auto m = static_cast<Eigen::Index>(rows.size());
    Matrix Xs(m, X.cols());
    Vector ys(y.size() > 0 ? m : 0);
    for (Eigen::Index r = 0; r < m; ++r) {
        const auto src = static_cast<Eigen::Index>(rows[static_cast<std::size_t>(r)]);
        if (rows[static_cast<std::size_t>(r)] >= size()) throw DimensionError("row index out of range in subset");
        Xs.row(r) = X.row(src);
        if (y.size() > 0) ys(r) = y(src);
    }
    return {std::move(Xs), curves.subset(rows), std::move(ys), scalar_names, response_name, curve_columns};
}

TrainingData TabularFunctionalDataset::training() const {
    if (!has_response()) throw ConfigError("dataset has no response column '" + response_name + "'");
    return TrainingData{X, curves, y};
}

TabularFunctionalDataset parse_dataset(std::istream& in, const DatasetSchema& schema, std::string_view source) {
    const std::string src(source);
    std::string line;
    if (!std::getline(in, line)) throw LoadError(src + ": empty file, expected a header row");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    std::vector<std::string> header = split_csv_line(line);
    for (auto& h : header) h = trim(h);

    std::map<std::string, std::size_t> by_name;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c].empty()) throw LoadError(src + ": column " + std::to_string(c + 1) + " has an empty header");
        if (!by_name.emplace(header[c], c).second) throw LoadError(src + ": duplicate column '" + header[c] + "'");
    }

    std::vector<std::pair<double, std::size_t>> curve_cols;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (auto v = parse_number(header[c])) curve_cols.emplace_back(*v, c);
    }
    if (curve_cols.size() < 2) throw LoadError(src + ": need at least 2 curve columns with numeric headers");
    std::stable_sort(curve_cols.begin(), curve_cols.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t g = 1; g < curve_cols.size(); ++g) {
        if (curve_cols[g].first == curve_cols[g - 1].first) {
            throw LoadError(src + ": curve columns '" + header[curve_cols[g - 1].second] + "' and '" +
                            header[curve_cols[g].second] + "' share the abscissa " +
                            format_double(curve_cols[g].first));
        }
    }

    std::optional<std::size_t> response_col;
    if (auto it = by_name.find(schema.response); it != by_name.end()) {
        response_col = it->second;
    } else if (!schema.response_optional) {
        throw LoadError(src + ": response column '" + schema.response + "' not found");
    }

    std::vector<std::size_t> scalar_cols;
    std::vector<std::string> scalar_names;
    if (schema.scalars) {
        for (const auto& name : *schema.scalars) {
            auto it = by_name.find(name);
            if (it == by_name.end()) throw LoadError(src + ": scalar column '" + name + "' not found");
            scalar_cols.push_back(it->second);
            scalar_names.push_back(name);
        }
    } else {
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (parse_number(header[c]) || header[c] == schema.response) continue;
            scalar_cols.push_back(c);
            scalar_names.push_back(header[c]);
        }
    }

    std::vector<std::vector<double>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto cells = split_csv_line(line);
        const std::size_t row = rows.size() + 1;
        if (cells.size() != header.size()) {
            throw LoadError(src + ": row " + std::to_string(row) + " (line " + std::to_string(lineno) + ") has " +
                            std::to_string(cells.size()) + " fields, header has " + std::to_string(header.size()));
        }
        std::vector<double> values(header.size(), 0.0);
        const auto read = [&](std::size_t c) {
            const std::string cell = trim(cells[c]);
            const std::string where = src + ": row " + std::to_string(row) + " (line " + std::to_string(lineno) +
                                      "), column '" + header[c] + "'";
            if (is_missing(cell)) throw LoadError(where + ": missing value");
            auto v = parse_number(cell);
            if (!v) throw LoadError(where + ": '" + cell + "' is not a finite number");
            values[c] = *v;
        };
        for (const auto& [t, c] : curve_cols) read(c);
        for (std::size_t c : scalar_cols) read(c);
        if (response_col) read(*response_col);
        rows.push_back(std::move(values));
    }
    if (rows.empty()) throw LoadError(src + ": no data rows");

    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto G = static_cast<Eigen::Index>(curve_cols.size());
    Matrix X(n, static_cast<Eigen::Index>(scalar_cols.size()));
    RowMatrix curves(n, G);
    Vector y(response_col ? n : 0);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& r = rows[static_cast<std::size_t>(i)];
        for (Eigen::Index g = 0; g < G; ++g) curves(i, g) = r[curve_cols[static_cast<std::size_t>(g)].second];
        for (std::size_t j = 0; j < scalar_cols.size(); ++j) X(i, static_cast<Eigen::Index>(j)) = r[scalar_cols[j]];
        if (response_col) y(i) = r[*response_col];
    }
    std::vector<double> points;
    std::vector<std::string> names;
    for (const auto& [t, c] : curve_cols) {
        points.push_back(t);
        names.push_back(header[c]);
    }
    return TabularFunctionalDataset{std::move(X), FunctionalSample(Grid(std::move(points)), std::move(curves)),
                                    std::move(y), std::move(scalar_names), schema.response, std::move(names)};
}

TabularFunctionalDataset load_dataset(const std::string& path, const DatasetSchema& schema) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open data file '" + path + "'");
    return parse_dataset(in, schema, path);
}

void write_dataset(std::ostream& out, const TabularFunctionalDataset& data) {
    std::vector<std::string> cols = data.scalar_names;
    if (data.has_response() && data.size() > 0) cols.push_back(data.response_name);
    for (const auto& c : data.curve_columns) cols.push_back(c);
    for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
    out << '\n';
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        bool first = true;
        const auto put = [&](double v) {
            out << (first ? "" : ",") << format_double(v);
            first = false;
        };
        for (Eigen::Index j = 0; j < data.X.cols(); ++j) put(data.X(r, j));
        if (data.y.size() > 0) put(data.y(r));
        for (double v : data.curves.curve(i)) put(v);
        out << '\n';
    }
}

SplitSpec SplitSpec::parse(std::string_view text) {
    std::vector<std::string> parts;
    std::stringstream ss{std::string(text)};
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    const auto count = [&](const std::string& s) {
        std::size_t v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
            throw ConfigError("split '" + std::string(text) + "': '" + s + "' is not a non-negative integer");
        }
        return v;
    };
    if (parts.size() == 2 && parts[0] == "head") return head_tail(count(parts[1]));
    if (parts.size() == 3 && parts[0] == "shuffle") return seeded_shuffle(count(parts[1]), count(parts[2]));
    throw ConfigError("split '" + std::string(text) + "': expected head:N or shuffle:N:SEED");
}

std::string SplitSpec::describe() const {
    if (mode == Mode::head_tail) return "head:" + std::to_string(n_train);
    return "shuffle:" + std::to_string(n_train) + ":" + std::to_string(seed);
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t n, const SplitSpec& spec) {
    if (spec.n_train == 0 || spec.n_train >= n) {
        throw ConfigError("split needs 0 < n_train < n, got n_train = " + std::to_string(spec.n_train) +
                          " with n = " + std::to_string(n));
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (spec.mode == SplitSpec::Mode::seeded_shuffle) {
        std::mt19937_64 rng(spec.seed);
        for (std::size_t i = n - 1; i > 0; --i) {
            std::uniform_int_distribution<std::size_t> pick(0, i);
            std::swap(order[i], order[pick(rng)]);
        }
    }
    std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(spec.n_train));
    std::vector<std::size_t> test(order.begin() + static_cast<std::ptrdiff_t>(spec.n_train), order.end());
    return {std::move(train), std::move(test)};
}

std::pair<TabularFunctionalDataset, TabularFunctionalDataset> split(const TabularFunctionalDataset& data,
                                                                   const SplitSpec& spec) {
    const auto [train, test] = split_indices(data.size(), spec);
    return {data.subset(train), data.subset(test)};
}

void write_file_atomic(const std::string& path, std::string_view content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw LoadError("cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            out.close();
            std::error_code ec;
            fs::remove(tmp, ec);
            throw LoadError("write to '" + tmp.string() + "' failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        std::error_code ignored;
        fs::remove(tmp, ignored);
        throw LoadError("cannot move output into place at '" + path + "': " + ec.message());
    }
}

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_from(const json& j) {
    if (j.is_null()) return std::numeric_limits<double>::infinity();
    return j.get<double>();
}

json vector_json(const Vector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Vector vector_from(const json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::string hex(std::uint64_t v) {
    std::ostringstream s;
    s << std::hex << std::setw(16) << std::setfill('0') << v;
    return s.str();
}

std::uint64_t unhex(const std::string& s) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 16);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw LoadError("malformed checksum '" + s + "'");
    return v;
}

json basis_json(const BasisSpec& b) { return {{"order", b.order}, {"interior_knots", b.interior_knots}}; }
BasisSpec basis_from(const json& j) { return {j.at("order").get<int>(), j.at("interior_knots").get<int>()}; }

json fit_json(const ModelFit& fit) {
    if (!fit.training || !fit.transform) throw ConfigError("cannot store an incomplete fit");
    const TrainingData& t = *fit.training;
    json j;
    j["kind"] = std::string(to_string(fit.kind));
    j["estimator"] = std::string(to_string(fit.estimator));
    j["kernel"] = std::string(to_string(fit.kernel.family));
    j["metric"] = fit.metric_description();
    j["beta"] = vector_json(fit.beta);
    j["intercept"] = fit.intercept;
    if (fit.theta) {
        j["theta"] = {{"coeffs", std::vector<double>(fit.theta->coeffs().begin(), fit.theta->coeffs().end())},
                      {"basis", basis_json(fit.theta->basis().spec())},
                      {"index", fit.theta_index}};
    } else {
        j["theta"] = nullptr;
    }
    j["k"] = fit.k;
    j["h"] = fit.h;
    j["h_level"] = fit.h_level;
    j["transform"] = {{"derivative", fit.transform->derivative()},
                      {"basis", fit.transform->basis() ? basis_json(*fit.transform->basis()) : json(nullptr)}};

    json training;
    training["grid"] = std::vector<double>(t.curves.grid().points().begin(), t.curves.grid().points().end());
    json X = json::array();
    for (Eigen::Index i = 0; i < t.X.rows(); ++i) X.push_back(vector_json(t.X.row(i).transpose()));
    training["p"] = t.X.cols();
    training["X"] = std::move(X);
    json curves = json::array();
    for (std::size_t i = 0; i < t.curves.size(); ++i) {
        const auto c = t.curves.curve(i);
        curves.push_back(std::vector<double>(c.begin(), c.end()));
    }
    training["curves"] = std::move(curves);
    training["y"] = vector_json(t.y);
    training["payload_checksum"] = hex(training_checksum(t.X, t.curves, t.y));
    j["training"] = std::move(training);

    j["pseudo_responses"] = vector_json(fit.pseudo_responses);
    j["projections"] = fit.projections;
    json trace = json::array();
    for (const auto& c : fit.trace) {
        trace.push_back({{"parameter", c.parameter},
                         {"bandwidth", c.bandwidth},
                         {"theta_index", c.theta_index},
                         {"profile_score", number(c.profile_score)},
                         {"cv_score", number(c.cv_score)},
                         {"cv_fallbacks", c.cv_fallbacks},
                         {"beta", c.beta}});
    }
    j["trace"] = std::move(trace);
    j["selected"] = fit.selected;
    j["cv_score"] = number(fit.cv_score);
    j["checksum"] = hex(fit.checksum);
    j["covariate_names"] = fit.covariate_names;
    j["response_name"] = fit.response_name;
    j["boost"] = fit.boost ? fit_json(*fit.boost) : json(nullptr);
    return j;
}

ModelFit fit_from(const json& j) {
    ModelFit fit;
    fit.kind = parse_model_kind(j.at("kind").get<std::string>());
    fit.estimator = parse_estimator(j.at("estimator").get<std::string>());
    fit.kernel.family = parse_kernel_family(j.at("kernel").get<std::string>());
    fit.beta = vector_from(j.at("beta"));
    fit.intercept = j.at("intercept").get<double>();
    fit.k = j.at("k").get<int>();
    fit.h = j.at("h").get<double>();
    fit.h_level = j.at("h_level").get<double>();

    const json& tj = j.at("training");
    auto grid = std::make_shared<const Grid>(tj.at("grid").get<std::vector<double>>());
    const auto rows = tj.at("curves").get<std::vector<std::vector<double>>>();
    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto G = static_cast<Eigen::Index>(grid->size());
    RowMatrix curves(n, G);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& r = rows[static_cast<std::size_t>(i)];
        if (static_cast<Eigen::Index>(r.size()) != G) {
            throw LoadError("training curve " + std::to_string(i + 1) + " has " + std::to_string(r.size()) +
                            " values, grid has " + std::to_string(G));
        }
        for (Eigen::Index g = 0; g < G; ++g) curves(i, g) = r[static_cast<std::size_t>(g)];
    }
    const auto p = tj.at("p").get<Eigen::Index>();
    const auto xrows = tj.at("X").get<std::vector<std::vector<double>>>();
    if (static_cast<Eigen::Index>(xrows.size()) != n) throw LoadError("training X and curves disagree in length");
    Matrix X(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& r = xrows[static_cast<std::size_t>(i)];
        if (static_cast<Eigen::Index>(r.size()) != p) throw LoadError("training X row has the wrong width");
        for (Eigen::Index c = 0; c < p; ++c) X(i, c) = r[static_cast<std::size_t>(c)];
    }
    auto training = std::make_shared<TrainingData>(
        TrainingData{std::move(X), FunctionalSample(*grid, std::move(curves)), vector_from(tj.at("y"))});
    training->validate();
    if (unhex(tj.at("payload_checksum").get<std::string>()) !=
        training_checksum(training->X, training->curves, training->y)) {
        throw LoadError("training payload checksum mismatch");
    }
    fit.training = std::move(training);

    const json& tr = j.at("transform");
    if (tr.at("basis").is_null()) {
        fit.transform = std::make_shared<const CurveTransform>(CurveTransform::identity(*grid));
    } else {
        fit.transform = std::make_shared<const CurveTransform>(*grid, basis_from(tr.at("basis")),
                                                               tr.at("derivative").get<int>());
    }

    if (!j.at("theta").is_null()) {
        const json& th = j.at("theta");
        const BasisSpec spec = basis_from(th.at("basis"));
        auto basis = std::make_shared<const BSplineBasis>(build_basis(*grid, spec.order, spec.interior_knots));
        fit.theta = Direction::from_normalized(th.at("coeffs").get<std::vector<double>>(), std::move(basis), grid);
        fit.theta_index = th.at("index").get<std::size_t>();
    }
    fit.pseudo_responses = vector_from(j.at("pseudo_responses"));
    fit.projections = j.at("projections").get<std::vector<double>>();
    if (fit.pseudo_responses.size() != n && fit.kind != ModelKind::lm) {
        throw LoadError("pseudo-responses disagree with the training size");
    }
    if (fit.theta && static_cast<Eigen::Index>(fit.projections.size()) != n) {
        throw LoadError("projections disagree with the training size");
    }
    if (fit.beta.size() != fit.training->X.cols()) throw LoadError("coefficients disagree with the covariate count");

    for (const auto& c : j.at("trace")) {
        CandidateTrace t;
        t.parameter = c.at("parameter").get<double>();
        t.bandwidth = c.at("bandwidth").get<double>();
        t.theta_index = c.at("theta_index").get<std::size_t>();
        t.profile_score = number_from(c.at("profile_score"));
        t.cv_score = number_from(c.at("cv_score"));
        t.cv_fallbacks = c.at("cv_fallbacks").get<std::size_t>();
        t.beta = c.at("beta").get<std::vector<double>>();
        fit.trace.push_back(std::move(t));
    }
    fit.selected = j.at("selected").get<std::size_t>();
    fit.cv_score = number_from(j.at("cv_score"));
    fit.checksum = unhex(j.at("checksum").get<std::string>());
    fit.covariate_names = j.at("covariate_names").get<std::vector<std::string>>();
    fit.response_name = j.at("response_name").get<std::string>();
    if (!j.at("boost").is_null()) fit.boost = std::make_shared<const ModelFit>(fit_from(j.at("boost")));
    return fit;
}

}  // namespace

void store_fit(const ModelFit& fit, std::ostream& out) {
    json j;
    j["format"] = "sfpl-fit";
    j["schema_version"] = kFitSchemaVersion;
    j["fit"] = fit_json(fit);
    out << j.dump(1) << '\n';
}

void store_fit(const ModelFit& fit, const std::string& path) {
    std::ostringstream s;
    store_fit(fit, s);
    write_file_atomic(path, s.str());
}

ModelFit load_fit(std::istream& in) {
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw LoadError(std::string("fit file is not valid JSON: ") + e.what());
    }
    try {
        if (!j.is_object() || j.value("format", "") != "sfpl-fit") throw LoadError("not an sfpl fit file");
        const int version = j.at("schema_version").get<int>();
        if (version != kFitSchemaVersion) {
            throw SchemaError("fit file schema version " + std::to_string(version) + ", this build reads version " +
                              std::to_string(kFitSchemaVersion));
        }
        return fit_from(j.at("fit"));
    } catch (const json::exception& e) {
        throw LoadError(std::string("malformed fit file: ") + e.what());
    }
}

ModelFit load_fit(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open fit file '" + path + "'");
    return load_fit(in);
}

}  // namespace sfpl
