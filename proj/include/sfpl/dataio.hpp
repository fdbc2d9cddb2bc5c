#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sfpl/grid.hpp"
#include "sfpl/linalg.hpp"
#include "sfpl/model.hpp"

namespace sfpl {

/// Columns whose header parses as a number are curve channels (abscissa = header
/// value). The response and the scalar covariates are named here; with no
/// scalar list every remaining column is a scalar covariate.
struct DatasetSchema {
    std::string response;
    std::optional<std::vector<std::string>> scalars;
    /// Accept files without the response column (prediction inputs).
    bool response_optional = false;
};

struct TabularFunctionalDataset {
    Matrix X;
    FunctionalSample curves;
    /// Empty when the response column was absent.
    Vector y;
    std::vector<std::string> scalar_names;
    std::string response_name;
    /// Curve column headers in grid order.
    std::vector<std::string> curve_columns;

    [[nodiscard]] std::size_t size() const noexcept { return curves.size(); }
    [[nodiscard]] bool has_response() const noexcept { return y.size() > 0 || size() == 0; }
    [[nodiscard]] TabularFunctionalDataset subset(std::span<const std::size_t> rows) const;
    /// Throws ConfigError when the response is missing.
    [[nodiscard]] TrainingData training() const;
};

TabularFunctionalDataset parse_dataset(std::istream& in, const DatasetSchema& schema,
                                       std::string_view source = "<input>");
TabularFunctionalDataset load_dataset(const std::string& path, const DatasetSchema& schema);

/// Writes the dataset back in the loader's format (scalars, response, curves).
void write_dataset(std::ostream& out, const TabularFunctionalDataset& data);

struct SplitSpec {
    enum class Mode { head_tail, seeded_shuffle };
    Mode mode = Mode::head_tail;
    std::size_t n_train = 0;
    std::uint64_t seed = 0;

    static SplitSpec head_tail(std::size_t n_train) { return {Mode::head_tail, n_train, 0}; }
    static SplitSpec seeded_shuffle(std::size_t n_train, std::uint64_t seed) {
        return {Mode::seeded_shuffle, n_train, seed};
    }
    /// "head:N" or "shuffle:N:SEED".
    static SplitSpec parse(std::string_view text);
    [[nodiscard]] std::string describe() const;
};

/// Training rows then test rows; disjoint and covering. Throws ConfigError unless 0 < n_train < n.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t n, const SplitSpec& spec);
std::pair<TabularFunctionalDataset, TabularFunctionalDataset> split(const TabularFunctionalDataset& data,
                                                                   const SplitSpec& spec);

inline constexpr int kFitSchemaVersion = 1;

void store_fit(const ModelFit& fit, std::ostream& out);
/// Atomic: written to a temporary file next to `path`, then renamed.
void store_fit(const ModelFit& fit, const std::string& path);
/// Throws SchemaError on version mismatch, LoadError on malformed content.
ModelFit load_fit(std::istream& in);
ModelFit load_fit(const std::string& path);

/// Writes `content` to `path` through a temporary file and rename.
void write_file_atomic(const std::string& path, std::string_view content);

}  // namespace sfpl
