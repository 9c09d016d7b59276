#pragma once

// Weighted Gower (daisy) dissimilarity for mixed-type rows with missing values.
//
//   d(i, j) = sum_k w_k delta_k d_k / sum_k w_k delta_k
//
// delta_k is 0 when either value is missing or, for asymmetric binary
// columns, when both values are "absent". Numeric contributions are scaled
// by the training range and clipped to [0, 1]; ordinal levels become integer
// ranks scaled by (levels - 1).

#include "classmap/table.hpp"

#include <Eigen/Core>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace classmap {

enum class ColumnKind { numeric, nominal, ordinal, asymmetric_binary };

std::string to_string(ColumnKind kind);
ColumnKind parse_column_kind(std::string_view text);

struct ColumnSpec {
    std::string name;
    ColumnKind kind = ColumnKind::numeric;
    /// Ordered levels. Required for ordinal columns; optional for nominal
    /// columns (inferred from training data when absent); for asymmetric
    /// binary columns, an optional {absent, present} pair.
    std::vector<std::string> levels;
    double weight = 1.0;
};

class FeatureSchema {
public:
    FeatureSchema() = default;
    explicit FeatureSchema(std::vector<ColumnSpec> columns);

    const std::vector<ColumnSpec>& columns() const { return columns_; }
    std::size_t size() const { return columns_.size(); }

private:
    std::vector<ColumnSpec> columns_;
};

/// Pair of rows without a single comparable column.
using UndefinedPair = std::pair<Eigen::Index, Eigen::Index>;

/// A schema bound to the scaling constants of one training table: numeric
/// ranges and resolved nominal levels. Encodes tables to numeric codes (NaN
/// for missing) and evaluates the Gower sum on encoded rows.
class GowerMetric {
public:
    GowerMetric() = default;
    GowerMetric(FeatureSchema schema, std::vector<double> ranges);

    /// Freezes ranges and nominal levels from `training`.
    static GowerMetric fit(const FeatureSchema& schema, const Table& training);

    /// One row per table row, one column per schema column. Nominal values
    /// not seen in training get negative codes, so they never match a
    /// training value.
    Eigen::MatrixXd encode(const Table& table) const;

    /// Gower dissimilarity of two encoded rows, or nullopt when no column is comparable.
    std::optional<double> operator()(const Eigen::Ref<const Eigen::RowVectorXd>& a,
                                     const Eigen::Ref<const Eigen::RowVectorXd>& b) const;

    const FeatureSchema& schema() const { return schema_; }
    const std::vector<double>& ranges() const { return ranges_; }

private:
    FeatureSchema schema_;
    std::vector<double> ranges_;
};

std::optional<double> pair_dissimilarity(const Eigen::Ref<const Eigen::RowVectorXd>& a,
                                         const Eigen::Ref<const Eigen::RowVectorXd>& b, const GowerMetric& metric);

/// Symmetric n x n matrix over encoded rows. Throws ValidationError listing
/// every undefined pair.
Eigen::MatrixXd dissimilarity_matrix(const Eigen::MatrixXd& codes, const GowerMetric& metric);

struct GowerFit {
    GowerMetric metric;
    Eigen::MatrixXd codes;
    Eigen::MatrixXd dissimilarities;
};

/// Fits the metric on `table`, encodes it and fills the full matrix.
GowerFit dissimilarity_matrix(const Table& table, const FeatureSchema& schema);

/// m x n matrix of new rows against training rows; row i depends only on
/// new row i and the training codes.
Eigen::MatrixXd cross_dissimilarities(const Eigen::MatrixXd& new_codes, const Eigen::MatrixXd& train_codes,
                                      const GowerMetric& metric);

} // namespace classmap
