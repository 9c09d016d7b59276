#pragma once

// CSV dialect: comma separated, UTF-8, mandatory header, RFC 4180 quoting,
// `.` decimal separator, empty cell or `NA` for missing values.

#include "classmap/core.hpp"
#include "classmap/farness.hpp"
#include "classmap/table.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace classmap {

Table parse_csv(std::string_view text);
std::string to_csv(const Table& table);

std::string read_file(const std::filesystem::path& path);
Table read_csv(const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

inline constexpr std::string_view kLabelColumn = "label";
inline constexpr std::string_view kIdColumn = "id";

/// Case ids from the id column when present, else 1-based row numbers.
std::vector<std::string> case_ids(const Table& table, std::string_view id_column = kIdColumn);

/// Label names from `label_column`; nullopt when the column is absent.
std::optional<std::vector<std::string>> label_names(const Table& table, std::string_view label_column = kLabelColumn);

struct PosteriorInput {
    std::vector<std::string> ids;
    PosteriorMatrix posteriors;
    LabelVector labels;
};

/// Every column other than id and label is a class probability column, in
/// header order. The label column is required.
PosteriorInput load_posteriors(const Table& table, std::string_view label_column = kLabelColumn,
                               std::string_view id_column = kIdColumn);

struct EmbeddingInput {
    std::vector<std::string> ids;
    Eigen::MatrixXd values;
    std::optional<std::vector<std::string>> labels;
};

/// Every column other than id and label is a numeric embedding coordinate.
EmbeddingInput load_embeddings(const Table& table, std::string_view label_column = kLabelColumn,
                               std::string_view id_column = kIdColumn);

Table scores_table(const std::vector<std::string>& ids, const ClassCatalog& catalog, const LabelVector& labels,
                   const CaseScores& scores);

/// id, given, distance_<class>..., farness_<class>..., outlier. `given` is
/// left empty when labels are unknown.
Table farness_table(const std::vector<std::string>& ids, const ClassCatalog& catalog,
                    const std::optional<std::vector<std::string>>& given, const FarnessResult& result);

struct FarnessInput {
    std::vector<std::string> ids;
    Eigen::MatrixXd farness;
};

/// Reads the farness_<class> columns written by farness_table.
FarnessInput load_farness(const Table& table, const ClassCatalog& catalog);

} // namespace classmap
