#include "classmap/dissimilarity.hpp"

#include "classmap/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_set>

namespace classmap {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::string lowercase(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::optional<double> level_code(const std::vector<std::string>& levels, std::string_view value) {
    for (std::size_t l = 0; l < levels.size(); ++l)
        if (levels[l] == value)
            return static_cast<double>(l);
    return std::nullopt;
}

double binary_code(const ColumnSpec& col, std::string_view value, std::size_t row) {
    if (col.levels.size() == 2) {
        if (value == col.levels[0])
            return 0.0;
        if (value == col.levels[1])
            return 1.0;
    } else {
        const std::string v = lowercase(value);
        if (v == "1" || v == "true" || v == "yes")
            return 1.0;
        if (v == "0" || v == "false" || v == "no")
            return 0.0;
    }
    throw ValidationError("row " + std::to_string(row + 1) + ", column '" + col.name + "': '" + std::string(value) +
                          "' is not a binary value");
}

std::string describe_pairs(const std::vector<UndefinedPair>& pairs) {
    std::string out;
    const std::size_t shown = std::min<std::size_t>(pairs.size(), 20);
    for (std::size_t p = 0; p < shown; ++p) {
        if (p)
            out += ", ";
        out += "(" + std::to_string(pairs[p].first + 1) + ", " + std::to_string(pairs[p].second + 1) + ")";
    }
    if (pairs.size() > shown)
        out += ", ... (" + std::to_string(pairs.size()) + " in total)";
    return out;
}

} // namespace

std::string to_string(ColumnKind kind) {
    switch (kind) {
    case ColumnKind::numeric:
        return "numeric";
    case ColumnKind::nominal:
        return "nominal";
    case ColumnKind::ordinal:
        return "ordinal";
    case ColumnKind::asymmetric_binary:
        return "asymmetric_binary";
    }
    return "numeric";
}

ColumnKind parse_column_kind(std::string_view text) {
    const std::string t = lowercase(text);
    if (t == "numeric")
        return ColumnKind::numeric;
    if (t == "nominal")
        return ColumnKind::nominal;
    if (t == "ordinal")
        return ColumnKind::ordinal;
    if (t == "asymmetric_binary" || t == "asymmetric-binary" || t == "asymm")
        return ColumnKind::asymmetric_binary;
    throw ValidationError("unknown column kind '" + std::string(text) + "'");
}

FeatureSchema::FeatureSchema(std::vector<ColumnSpec> columns) : columns_(std::move(columns)) {
    if (columns_.empty())
        throw ValidationError("feature schema has no columns");
    bool any_positive = false;
    std::unordered_set<std::string> names;
    for (const auto& col : columns_) {
        if (!names.insert(col.name).second)
            throw ValidationError("schema column '" + col.name + "' is declared twice");
        if (!std::isfinite(col.weight) || col.weight < 0.0)
            throw ValidationError("schema column '" + col.name + "' has a negative or non-finite weight");
        any_positive = any_positive || col.weight > 0.0;
        if (col.kind == ColumnKind::ordinal && col.levels.empty())
            throw ValidationError("ordinal column '" + col.name + "' must declare its ordered levels");
        if (col.kind == ColumnKind::asymmetric_binary && !col.levels.empty() && col.levels.size() != 2)
            throw ValidationError("asymmetric binary column '" + col.name + "' must declare exactly two levels");
        std::unordered_set<std::string> levels(col.levels.begin(), col.levels.end());
        if (levels.size() != col.levels.size())
            throw ValidationError("column '" + col.name + "' declares a level twice");
    }
    if (!any_positive)
        throw ValidationError("feature schema needs at least one column with positive weight");
}

GowerMetric::GowerMetric(FeatureSchema schema, std::vector<double> ranges)
    : schema_(std::move(schema)), ranges_(std::move(ranges)) {
    if (ranges_.size() != schema_.size())
        throw ValidationError("metric needs one range per schema column");
}

GowerMetric GowerMetric::fit(const FeatureSchema& schema, const Table& training) {
    std::vector<ColumnSpec> columns = schema.columns();
    std::vector<double> ranges(columns.size(), 0.0);
    for (std::size_t k = 0; k < columns.size(); ++k) {
        auto& col = columns[k];
        const auto j = training.column_index(col.name);
        if (!j)
            throw ValidationError("feature table lacks schema column '" + col.name + "'");
        if (col.kind == ColumnKind::nominal && col.levels.empty()) {
            std::unordered_set<std::string> seen;
            for (const auto& row : training.rows)
                if (!is_missing(row[*j]) && seen.insert(row[*j]).second)
                    col.levels.push_back(row[*j]);
        }
        if (col.kind == ColumnKind::ordinal)
            ranges[k] = static_cast<double>(col.levels.size()) - 1.0;
        if (col.kind == ColumnKind::numeric) {
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            for (std::size_t r = 0; r < training.rows.size(); ++r) {
                const auto& cell = training.rows[r][*j];
                if (is_missing(cell))
                    continue;
                const auto v = parse_double(cell);
                if (!v)
                    throw ValidationError("row " + std::to_string(r + 1) + ", column '" + col.name + "': '" + cell +
                                          "' is not numeric");
                lo = std::min(lo, *v);
                hi = std::max(hi, *v);
            }
            ranges[k] = hi > lo ? hi - lo : 0.0;
        }
    }
    return GowerMetric(FeatureSchema(std::move(columns)), std::move(ranges));
}

Eigen::MatrixXd GowerMetric::encode(const Table& table) const {
    const auto& columns = schema_.columns();
    const auto n = static_cast<Eigen::Index>(table.rows.size());
    const auto p = static_cast<Eigen::Index>(columns.size());
    Eigen::MatrixXd codes(n, p);
    for (std::size_t k = 0; k < columns.size(); ++k) {
        const auto& col = columns[k];
        const auto j = table.column_index(col.name);
        if (!j)
            throw ValidationError("feature table lacks schema column '" + col.name + "'");
        std::map<std::string, double> unseen;
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            const auto& row = table.rows[r];
            if (row.size() != table.header.size())
                throw ValidationError("row " + std::to_string(r + 1) + " has " + std::to_string(row.size()) +
                                      " cells, header has " + std::to_string(table.header.size()));
            const std::string& cell = row[*j];
            double& out = codes(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k));
            if (is_missing(cell)) {
                out = kMissing;
                continue;
            }
            switch (col.kind) {
            case ColumnKind::numeric: {
                const auto v = parse_double(cell);
                if (!v)
                    throw ValidationError("row " + std::to_string(r + 1) + ", column '" + col.name + "': '" + cell +
                                          "' is not numeric");
                out = *v;
                break;
            }
            case ColumnKind::ordinal: {
                const auto v = level_code(col.levels, cell);
                if (!v)
                    throw ValidationError("row " + std::to_string(r + 1) + ", column '" + col.name + "': '" + cell +
                                          "' is not a declared level");
                out = *v;
                break;
            }
            case ColumnKind::nominal: {
                if (const auto v = level_code(col.levels, cell)) {
                    out = *v;
                } else {
                    auto [it, inserted] = unseen.try_emplace(cell, -1.0 - static_cast<double>(unseen.size()));
                    out = it->second;
                }
                break;
            }
            case ColumnKind::asymmetric_binary:
                out = binary_code(col, cell, r);
                break;
            }
        }
    }
    return codes;
}

std::optional<double> GowerMetric::operator()(const Eigen::Ref<const Eigen::RowVectorXd>& a,
                                              const Eigen::Ref<const Eigen::RowVectorXd>& b) const {
    const auto& columns = schema_.columns();
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < columns.size(); ++k) {
        const auto& col = columns[k];
        const double x = a(static_cast<Eigen::Index>(k));
        const double y = b(static_cast<Eigen::Index>(k));
        if (std::isnan(x) || std::isnan(y))
            continue;
        double d = 0.0;
        switch (col.kind) {
        case ColumnKind::numeric:
        case ColumnKind::ordinal:
            d = ranges_[k] > 0.0 ? std::min(1.0, std::abs(x - y) / ranges_[k]) : 0.0;
            break;
        case ColumnKind::nominal:
            d = x != y ? 1.0 : 0.0;
            break;
        case ColumnKind::asymmetric_binary:
            if (x == 0.0 && y == 0.0)
                continue;
            d = x != y ? 1.0 : 0.0;
            break;
        }
        num += col.weight * d;
        den += col.weight;
    }
    if (den <= 0.0)
        return std::nullopt;
    return num / den;
}

std::optional<double> pair_dissimilarity(const Eigen::Ref<const Eigen::RowVectorXd>& a,
                                         const Eigen::Ref<const Eigen::RowVectorXd>& b, const GowerMetric& metric) {
    return metric(a, b);
}

Eigen::MatrixXd dissimilarity_matrix(const Eigen::MatrixXd& codes, const GowerMetric& metric) {
    const Eigen::Index n = codes.rows();
    if (n < 2)
        throw ValidationError("a dissimilarity matrix needs at least two cases");
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    std::vector<UndefinedPair> undefined;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const auto v = metric(codes.row(i), codes.row(j));
            if (!v) {
                undefined.emplace_back(i, j);
                continue;
            }
            d(i, j) = *v;
            d(j, i) = *v;
        }
    }
    if (!undefined.empty())
        throw ValidationError("no comparable columns for case pairs " + describe_pairs(undefined));
    return d;
}

GowerFit dissimilarity_matrix(const Table& table, const FeatureSchema& schema) {
    GowerFit fit{GowerMetric::fit(schema, table), {}, {}};
    fit.codes = fit.metric.encode(table);
    fit.dissimilarities = dissimilarity_matrix(fit.codes, fit.metric);
    return fit;
}

Eigen::MatrixXd cross_dissimilarities(const Eigen::MatrixXd& new_codes, const Eigen::MatrixXd& train_codes,
                                      const GowerMetric& metric) {
    if (new_codes.cols() != train_codes.cols() || static_cast<std::size_t>(new_codes.cols()) != metric.schema().size())
        throw ValidationError("new and training data are encoded with different schemas");
    Eigen::MatrixXd d(new_codes.rows(), train_codes.rows());
    std::vector<UndefinedPair> undefined;
    for (Eigen::Index i = 0; i < new_codes.rows(); ++i) {
        for (Eigen::Index h = 0; h < train_codes.rows(); ++h) {
            const auto v = metric(new_codes.row(i), train_codes.row(h));
            if (!v) {
                undefined.emplace_back(i, h);
                d(i, h) = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            d(i, h) = *v;
        }
    }
    if (!undefined.empty())
        throw ValidationError("no comparable columns for (new, training) pairs " + describe_pairs(undefined));
    return d;
}

} // namespace classmap
