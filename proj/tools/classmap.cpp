// classmap: command-line front end.
//
//   classmap scores      --posteriors post.csv --out-dir out
//   classmap fit-farness --variant mahalanobis --embeddings emb.csv --out-dir out
//   classmap fit-farness --variant knn --features x.csv --schema schema.json --out-dir out
//   classmap score-new   --model out/farness_model.json --embeddings new.csv --out-dir out
//   classmap plot silhouette|qresid|classmap --posteriors post.csv ...
//
// Exit codes: 0 success, 2 input/validation error, 3 numeric degeneracy.

#include "classmap/core.hpp"
#include "classmap/diagnostics.hpp"
#include "classmap/error.hpp"
#include "classmap/farness.hpp"
#include "classmap/io.hpp"
#include "classmap/render.hpp"
#include "classmap/serialize.hpp"

#include <CLI11.hpp>

#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using namespace classmap;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitValidation = 2;
constexpr int kExitDegenerate = 3;

// Reads --config files written as JSON: top-level keys are option names,
// nested objects are subcommand sections.
class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}\n"; }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        Json doc;
        try {
            doc = Json::parse(input);
        } catch (const nlohmann::json::exception& e) {
            throw CLI::ConversionError("config is not valid JSON: " + std::string(e.what()));
        }
        std::vector<CLI::ConfigItem> items;
        collect(doc, {}, items);
        return items;
    }

private:
    static std::string scalar(const Json& v) {
        if (v.is_string())
            return v.get<std::string>();
        if (v.is_boolean())
            return v.get<bool>() ? "true" : "false";
        return v.dump();
    }

    static void collect(const Json& node, std::vector<std::string> parents, std::vector<CLI::ConfigItem>& out) {
        for (const auto& [key, value] : node.items()) {
            if (value.is_object()) {
                auto nested = parents;
                nested.push_back(key);
                collect(value, nested, out);
                continue;
            }
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = key;
            if (value.is_array())
                for (const auto& v : value)
                    item.inputs.push_back(scalar(v));
            else
                item.inputs.push_back(scalar(value));
            out.push_back(std::move(item));
        }
    }
};

bool use_color() {
    return std::getenv("CLASSMAP_NO_COLOR") == nullptr && ::isatty(::fileno(stderr)) != 0;
}

void report(std::string_view kind, std::string_view message) {
    if (use_color())
        std::cerr << "\033[31m" << kind << ":\033[0m " << message << '\n';
    else
        std::cerr << kind << ": " << message << '\n';
}

struct Options {
    std::string out_dir = ".";
    std::string label_column{kLabelColumn};
    std::string id_column{kIdColumn};

    std::string posteriors;
    std::string embeddings;
    std::string features;
    std::string schema;
    std::string model;
    std::string variant = "mahalanobis";
    std::vector<std::string> classes;
    Eigen::Index k = kDefaultNeighbors;
    bool exclude_self = false;
    double cutoff = kDefaultCutoff;

    std::string kind;
    std::string farness;
    std::string class_name;
    std::string feature_file;
    std::string feature;
    std::vector<std::string> levels;
    std::string mode = "mean";
    Eigen::Index bins = kDefaultBins;
    bool loess = false;
    double span = 0.75;
    int degree = 2;
    std::string title;
    double width = 720.0;
    double height = 480.0;
};

fs::path output_path(const Options& opt, const std::string& name) {
    fs::create_directories(opt.out_dir);
    return fs::path(opt.out_dir) / name;
}

void write_output(const Options& opt, const std::string& name, std::string_view content) {
    const fs::path path = output_path(opt, name);
    write_file_atomic(path, content);
    std::cout << "wrote " << path.string() << '\n';
}

ClassCatalog catalog_for_fit(const Options& opt, const std::vector<std::string>& labels) {
    if (!opt.classes.empty())
        return ClassCatalog(opt.classes);
    if (!opt.posteriors.empty())
        return load_posteriors(read_csv(opt.posteriors), opt.label_column, opt.id_column).posteriors.catalog();
    std::vector<std::string> names;
    for (const auto& l : labels)
        if (std::find(names.begin(), names.end(), l) == names.end())
            names.push_back(l);
    return ClassCatalog(std::move(names));
}

int run_scores(const Options& opt) {
    const PosteriorInput in = load_posteriors(read_csv(opt.posteriors), opt.label_column, opt.id_column);
    const CaseScores scores = score_cases(in.posteriors, in.labels);
    write_output(opt, "scores.csv", to_csv(scores_table(in.ids, in.posteriors.catalog(), in.labels, scores)));
    const auto summary = silhouette_summary(scores.s, in.labels, in.posteriors.catalog());
    std::cout << in.posteriors.rows() << " cases, overall average silhouette width "
              << format_silhouette_mean(summary.overall) << '\n';
    return kExitOk;
}

int run_fit_farness(const Options& opt) {
    const FarnessVariant variant = parse_farness_variant(opt.variant);
    std::vector<std::string> ids;
    std::optional<std::vector<std::string>> given;
    std::optional<FittedFarness> fitted;
    if (variant == FarnessVariant::mahalanobis) {
        if (opt.embeddings.empty())
            throw ValidationError("--variant mahalanobis needs --embeddings");
        EmbeddingInput in = load_embeddings(read_csv(opt.embeddings), opt.label_column, opt.id_column);
        if (!in.labels)
            throw ValidationError("embedding table lacks the '" + opt.label_column + "' column");
        const ClassCatalog catalog = catalog_for_fit(opt, *in.labels);
        const LabelVector labels = LabelVector::from_names(*in.labels, catalog);
        fitted = fit_mahalanobis_farness(in.values, labels, catalog, opt.cutoff);
        ids = std::move(in.ids);
        given = std::move(in.labels);
    } else {
        if (opt.features.empty() || opt.schema.empty())
            throw ValidationError("--variant knn needs --features and --schema");
        const Table table = read_csv(opt.features);
        auto names = label_names(table, opt.label_column);
        if (!names)
            throw ValidationError("feature table lacks the '" + opt.label_column + "' column");
        const ClassCatalog catalog = catalog_for_fit(opt, *names);
        const LabelVector labels = LabelVector::from_names(*names, catalog);
        fitted = fit_knn_farness(table, labels, read_schema(opt.schema), catalog, KnnOptions{opt.k, opt.exclude_self},
                                 opt.cutoff);
        ids = case_ids(table, opt.id_column);
        given = std::move(names);
    }
    write_output(opt, "farness_model.json", dump(to_json(fitted->model)));
    write_output(opt, "farness.csv", to_csv(farness_table(ids, fitted->model.catalog, given, fitted->training)));
    std::cout << fitted->training.outlier.count() << " farness outliers at cutoff " << opt.cutoff << '\n';
    return kExitOk;
}

int run_score_new(const Options& opt) {
    const FarnessModel model = read_farness_model(opt.model);
    std::vector<std::string> ids;
    std::optional<std::vector<std::string>> given;
    FarnessResult result;
    if (model.variant == FarnessVariant::mahalanobis) {
        if (opt.embeddings.empty())
            throw ValidationError("this model scores embeddings; pass --embeddings");
        EmbeddingInput in = load_embeddings(read_csv(opt.embeddings), opt.label_column, opt.id_column);
        result = score_new_cases(model, in.values);
        ids = std::move(in.ids);
        given = std::move(in.labels);
    } else {
        if (opt.features.empty())
            throw ValidationError("this model scores feature rows; pass --features");
        const Table table = read_csv(opt.features);
        result = score_new_cases(model, table);
        ids = case_ids(table, opt.id_column);
        given = label_names(table, opt.label_column);
    }
    write_output(opt, "farness_new.csv", to_csv(farness_table(ids, model.catalog, given, result)));
    return kExitOk;
}

RenderConfig render_config(const Options& opt) {
    RenderConfig config;
    config.width = opt.width;
    config.height = opt.height;
    config.title = opt.title;
    return config;
}

int run_plot(const Options& opt) {
    const PosteriorInput in = load_posteriors(read_csv(opt.posteriors), opt.label_column, opt.id_column);
    const ClassCatalog& catalog = in.posteriors.catalog();
    const CaseScores scores = score_cases(in.posteriors, in.labels);
    const RenderConfig config = render_config(opt);

    if (opt.kind == "silhouette") {
        const auto data = build_silhouette(scores, in.labels, catalog);
        write_output(opt, "silhouette.svg", render_silhouette_svg(data, config));
        write_output(opt, "silhouette.json", dump(to_json(data)));
        return kExitOk;
    }

    if (opt.kind == "qresid") {
        if (opt.feature.empty())
            throw ValidationError("qresid needs --feature <column>");
        const Table table = read_csv(opt.feature_file.empty() ? opt.posteriors : opt.feature_file);
        if (static_cast<Eigen::Index>(table.size()) != in.posteriors.rows())
            throw ValidationError("feature file has " + std::to_string(table.size()) + " rows, posteriors have " +
                                  std::to_string(in.posteriors.rows()));
        const auto j = table.column_index(opt.feature);
        if (!j)
            throw ValidationError("feature column '" + opt.feature + "' not found");
        std::vector<std::string> cells;
        bool numeric = opt.levels.empty();
        for (const auto& row : table.rows) {
            cells.push_back(row[*j]);
            numeric = numeric && (is_missing(row[*j]) || parse_double(row[*j]).has_value());
        }
        const TrendMode mode = parse_trend_mode(opt.mode);
        QuasiResidualData data;
        if (numeric) {
            Eigen::VectorXd x(static_cast<Eigen::Index>(cells.size()));
            for (std::size_t i = 0; i < cells.size(); ++i)
                x(static_cast<Eigen::Index>(i)) = is_missing(cells[i]) ? std::nan("") : *parse_double(cells[i]);
            data = build_quasi_residual(scores.pac, x, mode, opt.bins, opt.feature);
        } else {
            std::vector<std::string> levels = opt.levels;
            if (levels.empty()) {
                std::set<std::string> seen;
                for (const auto& c : cells)
                    if (!is_missing(c))
                        seen.insert(c);
                levels.assign(seen.begin(), seen.end());
            }
            data = build_quasi_residual(scores.pac, cells, levels, mode, opt.feature);
        }
        if (opt.loess)
            add_loess(data, LoessOptions{opt.span, opt.degree, 100});
        write_output(opt, "qresid.svg", render_quasi_residual_svg(data, config));
        write_output(opt, "qresid.json", dump(to_json(data)));
        return kExitOk;
    }

    if (opt.kind == "classmap") {
        if (opt.class_name.empty() || opt.farness.empty())
            throw ValidationError("classmap needs --class and --farness");
        const Eigen::Index g = catalog.index_of(opt.class_name);
        const FarnessInput far = load_farness(read_csv(opt.farness), catalog);
        if (far.farness.rows() != in.posteriors.rows())
            throw ValidationError("farness file has " + std::to_string(far.farness.rows()) +
                                  " rows, posteriors have " + std::to_string(in.posteriors.rows()));
        const FlagVector outliers = flag_outliers(far.farness, opt.cutoff);
        const auto data = build_class_map(g, scores, in.labels, catalog, far.farness, outliers, opt.cutoff);
        const std::string stem = "classmap_" + opt.class_name;
        write_output(opt, stem + ".svg", render_class_map_svg(data, config));
        write_output(opt, stem + ".json", dump(to_json(data)));
        return kExitOk;
    }

    throw ValidationError("unknown plot kind '" + opt.kind + "' (expected silhouette, qresid or classmap)");
}

bool config_is_json(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        std::string_view arg = argv[i];
        std::string_view path;
        if (arg == "--config" && i + 1 < argc)
            path = argv[i + 1];
        else if (arg.rfind("--config=", 0) == 0)
            path = arg.substr(9);
        if (!path.empty())
            return fs::path(path).extension() == ".json";
    }
    return false;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Classification diagnostics: PAC, silhouettes, farness and class maps"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "TOML or JSON file with option values");
    if (config_is_json(argc, argv))
        app.config_formatter(std::make_shared<JsonConfig>());

    Options opt;
    app.add_option("--out-dir", opt.out_dir, "Directory for outputs")->capture_default_str();
    app.add_option("--label-column", opt.label_column, "Column holding the given class")->capture_default_str();
    app.add_option("--id-column", opt.id_column, "Column holding case ids")->capture_default_str();

    auto* scores = app.add_subcommand("scores", "PAC and silhouette width per case");
    scores->add_option("--posteriors", opt.posteriors, "CSV with class probability columns and a label column")
        ->required()
        ->check(CLI::ExistingFile);

    auto* fit = app.add_subcommand("fit-farness", "Fit a farness model on training data");
    fit->add_option("--variant", opt.variant, "mahalanobis or knn")
        ->check(CLI::IsMember({"mahalanobis", "knn"}))
        ->capture_default_str();
    fit->add_option("--embeddings", opt.embeddings, "CSV of per-case vectors (mahalanobis)")->check(CLI::ExistingFile);
    fit->add_option("--features", opt.features, "CSV of mixed-type features (knn)")->check(CLI::ExistingFile);
    fit->add_option("--schema", opt.schema, "JSON feature schema (knn)")->check(CLI::ExistingFile);
    fit->add_option("--k", opt.k, "Neighbours for the knn distance")->check(CLI::PositiveNumber)->capture_default_str();
    fit->add_flag("--exclude-self", opt.exclude_self, "Leave a training case out of its own neighbour set");
    fit->add_option("--cutoff", opt.cutoff, "Farness outlier cutoff")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    fit->add_option("--classes", opt.classes, "Class order")->delimiter(',');
    fit->add_option("--posteriors", opt.posteriors, "Take the class order from this posterior CSV")
        ->check(CLI::ExistingFile);

    auto* score_new = app.add_subcommand("score-new", "Score new cases against a fitted farness model");
    score_new->add_option("--model", opt.model, "farness_model.json")->required()->check(CLI::ExistingFile);
    score_new->add_option("--embeddings", opt.embeddings, "CSV of per-case vectors")->check(CLI::ExistingFile);
    score_new->add_option("--features", opt.features, "CSV of mixed-type features")->check(CLI::ExistingFile);

    auto* plot = app.add_subcommand("plot", "Render a display as SVG plus JSON plot data");
    plot->add_option("kind", opt.kind, "silhouette, qresid or classmap")
        ->required()
        ->check(CLI::IsMember({"silhouette", "qresid", "classmap"}));
    plot->add_option("--posteriors", opt.posteriors, "CSV with class probability columns and a label column")
        ->required()
        ->check(CLI::ExistingFile);
    plot->add_option("--farness", opt.farness, "farness CSV (classmap)")->check(CLI::ExistingFile);
    plot->add_option("--class", opt.class_name, "Given class to map (classmap)");
    plot->add_option("--cutoff", opt.cutoff, "Farness outlier cutoff")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    plot->add_option("--feature-file", opt.feature_file, "CSV holding the feature (qresid; default: posteriors)")
        ->check(CLI::ExistingFile);
    plot->add_option("--feature", opt.feature, "Feature column (qresid)");
    plot->add_option("--levels", opt.levels, "Ordered categories for a categorical feature")->delimiter(',');
    plot->add_option("--mode", opt.mode, "mean or quantile trend curves")
        ->check(CLI::IsMember({"mean", "quantile"}))
        ->capture_default_str();
    plot->add_option("--bins", opt.bins, "Equispaced intervals for the trend curves")
        ->check(CLI::Range(Eigen::Index{2}, Eigen::Index{100000}))
        ->capture_default_str();
    plot->add_flag("--loess", opt.loess, "Add a loess curve (qresid)");
    plot->add_option("--span", opt.span, "Loess span")->capture_default_str();
    plot->add_option("--degree", opt.degree, "Loess degree")->capture_default_str();
    plot->add_option("--title", opt.title, "Plot title");
    plot->add_option("--width", opt.width, "SVG width in px")->capture_default_str();
    plot->add_option("--height", opt.height, "SVG height in px")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (scores->parsed())
            return run_scores(opt);
        if (fit->parsed())
            return run_fit_farness(opt);
        if (score_new->parsed())
            return run_score_new(opt);
        if (plot->parsed())
            return run_plot(opt);
    } catch (const DegenerateError& e) {
        report("degenerate data", e.what());
        return kExitDegenerate;
    } catch (const ValidationError& e) {
        report("error", e.what());
        return kExitValidation;
    } catch (const fs::filesystem_error& e) {
        report("error", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        report("internal error", e.what());
        return kExitInternal;
    }
    return kExitInternal;
}
