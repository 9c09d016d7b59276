#include "classmap/io.hpp"

#include "classmap/error.hpp"
#include "classmap/format.hpp"

#include <fstream>
#include <sstream>

namespace classmap {

namespace {

std::string row_context(std::size_t row) { return "row " + std::to_string(row + 1); }

double require_number(const std::string& cell, std::size_t row, const std::string& column) {
    const auto v = parse_double(cell);
    if (!v)
        throw ValidationError(row_context(row) + ", column '" + column + "': '" + cell + "' is not a number");
    return *v;
}

bool needs_quotes(std::string_view cell) {
    return cell.find_first_of(",\"\r\n") != std::string_view::npos;
}

} // namespace

Table parse_csv(std::string_view text) {
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF")
        text.remove_prefix(3);

    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string cell;
    bool in_quotes = false;
    bool cell_started = false;
    std::size_t line = 1;
    auto end_record = [&] {
        record.push_back(std::move(cell));
        cell.clear();
        const bool blank = record.size() == 1 && record.front().empty() && !cell_started;
        if (!blank)
            records.push_back(std::move(record));
        record.clear();
        cell_started = false;
    };

    for (std::size_t k = 0; k < text.size(); ++k) {
        const char c = text[k];
        if (in_quotes) {
            if (c == '"') {
                if (k + 1 < text.size() && text[k + 1] == '"') {
                    cell += '"';
                    ++k;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n')
                    ++line;
                cell += c;
            }
            continue;
        }
        switch (c) {
        case '"':
            if (!cell.empty())
                throw ValidationError("line " + std::to_string(line) + ": stray quote inside an unquoted cell");
            in_quotes = true;
            cell_started = true;
            break;
        case ',':
            record.push_back(std::move(cell));
            cell.clear();
            cell_started = true;
            break;
        case '\r':
            break;
        case '\n':
            end_record();
            ++line;
            break;
        default:
            cell += c;
            cell_started = true;
        }
    }
    if (in_quotes)
        throw ValidationError("unterminated quoted cell at end of input");
    if (cell_started || !cell.empty() || !record.empty())
        end_record();

    if (records.empty())
        throw ValidationError("CSV input is empty (a header row is required)");
    Table table;
    table.header = std::move(records.front());
    for (std::size_t j = 0; j < table.header.size(); ++j) {
        if (table.header[j].empty())
            throw ValidationError("header column " + std::to_string(j + 1) + " has no name");
        for (std::size_t k = 0; k < j; ++k)
            if (table.header[k] == table.header[j])
                throw ValidationError("header column '" + table.header[j] + "' appears twice");
    }
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != table.header.size())
            throw ValidationError(row_context(r - 1) + " has " + std::to_string(records[r].size()) +
                                  " cells, header has " + std::to_string(table.header.size()));
        table.rows.push_back(std::move(records[r]));
    }
    return table;
}

std::string to_csv(const Table& table) {
    std::string out;
    auto emit = [&](const std::vector<std::string>& cells) {
        for (std::size_t j = 0; j < cells.size(); ++j) {
            if (j)
                out += ',';
            if (needs_quotes(cells[j])) {
                out += '"';
                for (char c : cells[j]) {
                    if (c == '"')
                        out += '"';
                    out += c;
                }
                out += '"';
            } else {
                out += cells[j];
            }
        }
        out += '\n';
    };
    emit(table.header);
    for (const auto& row : table.rows)
        emit(row);
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Table read_csv(const std::filesystem::path& path) {
    try {
        return parse_csv(read_file(path));
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw ValidationError("cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out)
            throw ValidationError("failed writing '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw ValidationError("cannot move output into place at '" + path.string() + "'");
    }
}

std::vector<std::string> case_ids(const Table& table, std::string_view id_column) {
    std::vector<std::string> ids;
    const auto j = table.column_index(id_column);
    for (std::size_t r = 0; r < table.rows.size(); ++r)
        ids.push_back(j ? table.rows[r][*j] : std::to_string(r + 1));
    return ids;
}

std::optional<std::vector<std::string>> label_names(const Table& table, std::string_view label_column) {
    const auto j = table.column_index(label_column);
    if (!j)
        return std::nullopt;
    std::vector<std::string> labels;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        if (is_missing(table.rows[r][*j]))
            throw ValidationError(row_context(r) + ": label is missing");
        labels.push_back(table.rows[r][*j]);
    }
    return labels;
}

PosteriorInput load_posteriors(const Table& table, std::string_view label_column, std::string_view id_column) {
    if (table.rows.empty())
        throw ValidationError("posterior table has no rows");
    const auto label_col = table.column_index(label_column);
    if (!label_col)
        throw ValidationError("posterior table lacks the '" + std::string(label_column) + "' column");
    const auto id_col = table.column_index(id_column);

    std::vector<std::size_t> class_cols;
    std::vector<std::string> names;
    for (std::size_t j = 0; j < table.header.size(); ++j) {
        if (j == *label_col || (id_col && j == *id_col))
            continue;
        class_cols.push_back(j);
        names.push_back(table.header[j]);
    }
    ClassCatalog catalog(std::move(names));

    Eigen::MatrixXd values(static_cast<Eigen::Index>(table.rows.size()), catalog.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r)
        for (std::size_t g = 0; g < class_cols.size(); ++g)
            values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(g)) =
                require_number(table.rows[r][class_cols[g]], r, table.header[class_cols[g]]);

    auto labels = label_names(table, label_column);
    PosteriorMatrix posteriors(std::move(values), catalog);
    return {case_ids(table, id_column), std::move(posteriors), LabelVector::from_names(*labels, catalog)};
}

EmbeddingInput load_embeddings(const Table& table, std::string_view label_column, std::string_view id_column) {
    if (table.rows.empty())
        throw ValidationError("embedding table has no rows");
    const auto label_col = table.column_index(label_column);
    const auto id_col = table.column_index(id_column);
    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < table.header.size(); ++j)
        if (!(label_col && j == *label_col) && !(id_col && j == *id_col))
            cols.push_back(j);
    if (cols.empty())
        throw ValidationError("embedding table has no coordinate columns");
    EmbeddingInput out{case_ids(table, id_column), Eigen::MatrixXd(static_cast<Eigen::Index>(table.rows.size()),
                                                                   static_cast<Eigen::Index>(cols.size())),
                       label_names(table, label_column)};
    for (std::size_t r = 0; r < table.rows.size(); ++r)
        for (std::size_t c = 0; c < cols.size(); ++c)
            out.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                require_number(table.rows[r][cols[c]], r, table.header[cols[c]]);
    return out;
}

Table scores_table(const std::vector<std::string>& ids, const ClassCatalog& catalog, const LabelVector& labels,
                   const CaseScores& scores) {
    Table out{{"id", "given", "predicted", "alt_class", "PAC", "s"}, {}};
    for (Eigen::Index i = 0; i < labels.size(); ++i)
        out.rows.push_back({ids[static_cast<std::size_t>(i)], catalog.name(labels[i]),
                            catalog.name(scores.predicted(i)), catalog.name(scores.alt_class(i)),
                            format_roundtrip(scores.pac(i)), format_roundtrip(scores.s(i))});
    return out;
}

Table farness_table(const std::vector<std::string>& ids, const ClassCatalog& catalog,
                    const std::optional<std::vector<std::string>>& given, const FarnessResult& result) {
    Table out{{"id", "given"}, {}};
    for (const auto& name : catalog.names())
        out.header.push_back("distance_" + name);
    for (const auto& name : catalog.names())
        out.header.push_back("farness_" + name);
    out.header.push_back("outlier");
    for (Eigen::Index i = 0; i < result.farness.rows(); ++i) {
        const auto r = static_cast<std::size_t>(i);
        std::vector<std::string> row{ids[r], given ? (*given)[r] : std::string()};
        for (Eigen::Index g = 0; g < result.distance.cols(); ++g)
            row.push_back(format_roundtrip(result.distance(i, g)));
        for (Eigen::Index g = 0; g < result.farness.cols(); ++g)
            row.push_back(format_roundtrip(result.farness(i, g)));
        row.emplace_back(result.outlier(i) ? "TRUE" : "FALSE");
        out.rows.push_back(std::move(row));
    }
    return out;
}

FarnessInput load_farness(const Table& table, const ClassCatalog& catalog) {
    FarnessInput out{case_ids(table), Eigen::MatrixXd(static_cast<Eigen::Index>(table.rows.size()), catalog.size())};
    for (Eigen::Index g = 0; g < catalog.size(); ++g) {
        const std::string column = "farness_" + catalog.name(g);
        const auto j = table.column_index(column);
        if (!j)
            throw ValidationError("farness table lacks column '" + column + "'");
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            const double v = require_number(table.rows[r][*j], r, column);
            if (v < 0.0 || v > 1.0)
                throw ValidationError(row_context(r) + ", column '" + column + "': farness outside [0, 1]");
            out.farness(static_cast<Eigen::Index>(r), g) = v;
        }
    }
    return out;
}

} // namespace classmap
