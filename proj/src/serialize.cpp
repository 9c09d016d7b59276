#include "classmap/serialize.hpp"

#include "classmap/error.hpp"
#include "classmap/io.hpp"

#include <cmath>

namespace classmap {

namespace {

Json vector_json(const Eigen::VectorXd& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out.push_back(v(i));
    return out;
}

Json matrix_json(const Eigen::MatrixXd& m) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (std::isnan(m(i, j)))
                row.push_back(nullptr);
            else
                row.push_back(m(i, j));
        }
        out.push_back(std::move(row));
    }
    return out;
}

Eigen::VectorXd vector_from(const Json& j) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
        v(static_cast<Eigen::Index>(i)) = j.at(i).get<double>();
    return v;
}

Eigen::MatrixXd matrix_from(const Json& j, Eigen::Index cols) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
    for (std::size_t i = 0; i < j.size(); ++i) {
        const Json& row = j.at(i);
        if (static_cast<Eigen::Index>(row.size()) != cols)
            throw ValidationError("matrix row " + std::to_string(i + 1) + " has the wrong length");
        for (std::size_t k = 0; k < row.size(); ++k)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                row.at(k).is_null() ? std::nan("") : row.at(k).get<double>();
    }
    return m;
}

ColumnSpec column_from(const std::string& name, const Json& spec) {
    if (!spec.is_object())
        throw ValidationError("schema entry for '" + name + "' must be an object");
    ColumnSpec col;
    col.name = name;
    col.kind = parse_column_kind(spec.at("kind").get<std::string>());
    if (spec.contains("levels"))
        col.levels = spec.at("levels").get<std::vector<std::string>>();
    col.weight = spec.value("weight", 1.0);
    return col;
}

Json column_json(const ColumnSpec& col) {
    Json out{{"kind", to_string(col.kind)}};
    if (!col.levels.empty())
        out["levels"] = col.levels;
    out["weight"] = col.weight;
    return out;
}

template <typename Fn>
auto wrap_json_errors(const std::string& what, Fn&& fn) {
    try {
        return fn();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(what + ": " + e.what());
    }
}

} // namespace

FeatureSchema schema_from_json(const Json& doc) {
    return wrap_json_errors("invalid schema", [&] {
        if (!doc.is_object())
            throw ValidationError("schema must be a JSON object mapping column names to specs");
        std::vector<ColumnSpec> columns;
        for (const auto& [name, spec] : doc.items())
            columns.push_back(column_from(name, spec));
        return FeatureSchema(std::move(columns));
    });
}

Json to_json(const FeatureSchema& schema) {
    Json out = Json::object();
    for (const auto& col : schema.columns())
        out[col.name] = column_json(col);
    return out;
}

FeatureSchema read_schema(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    return wrap_json_errors(path.string(), [&] { return schema_from_json(Json::parse(text)); });
}

Json to_json(const FarnessModel& model) {
    Json out;
    out["format_version"] = kModelFormatVersion;
    out["variant"] = to_string(model.variant);
    out["classes"] = model.catalog.names();
    out["cutoff"] = model.cutoff;
    const auto& t = model.transform;
    out["transform"] = Json{{"class_median", t.class_median}, {"med", t.med},
                            {"mad", t.mad},                   {"lambda", t.lambda},
                            {"med_transformed", t.med_transformed}, {"mad_transformed", t.mad_transformed}};
    if (model.stats) {
        Json classes = Json::array();
        for (const auto& m : model.stats->all_moments())
            classes.push_back(Json{{"mean", vector_json(m.mean)}, {"covariance", matrix_json(m.covariance)},
                                   {"ridge", m.ridge}});
        out["mahalanobis"] = Json{{"classes", std::move(classes)}};
    }
    if (model.knn) {
        const auto& ref = *model.knn;
        Json labels = Json::array();
        for (Eigen::Index i = 0; i < ref.labels.size(); ++i)
            labels.push_back(ref.labels[i]);
        out["knn"] = Json{{"k", ref.options.k},
                          {"exclude_self", ref.options.exclude_self},
                          {"schema", to_json(ref.metric.schema())},
                          {"ranges", ref.metric.ranges()},
                          {"labels", std::move(labels)},
                          {"codes", matrix_json(ref.codes)}};
    }
    return out;
}

FarnessModel farness_model_from_json(const Json& doc) {
    return wrap_json_errors("invalid farness model", [&] {
        if (!doc.is_object() || !doc.contains("format_version"))
            throw ValidationError("not a farness model: format_version is missing");
        const int version = doc.at("format_version").get<int>();
        if (version != kModelFormatVersion)
            throw ValidationError("unsupported farness model format_version " + std::to_string(version) +
                                  " (this build reads version " + std::to_string(kModelFormatVersion) + ")");
        ClassCatalog catalog(doc.at("classes").get<std::vector<std::string>>());
        FarnessModel model{catalog, parse_farness_variant(doc.at("variant").get<std::string>()), std::nullopt,
                           std::nullopt, {}, doc.at("cutoff").get<double>()};
        if (!(model.cutoff > 0.0 && model.cutoff < 1.0))
            throw ValidationError("model cutoff must lie in (0, 1)");

        const Json& t = doc.at("transform");
        model.transform.class_median = t.at("class_median").get<std::vector<double>>();
        model.transform.med = t.at("med").get<double>();
        model.transform.mad = t.at("mad").get<double>();
        model.transform.lambda = t.at("lambda").get<double>();
        model.transform.med_transformed = t.at("med_transformed").get<double>();
        model.transform.mad_transformed = t.at("mad_transformed").get<double>();
        if (static_cast<Eigen::Index>(model.transform.class_median.size()) != catalog.size())
            throw ValidationError("transform has the wrong number of class medians");
        if (!(model.transform.mad > 0.0) || !(model.transform.mad_transformed > 0.0))
            throw ValidationError("transform scales must be positive");

        if (model.variant == FarnessVariant::mahalanobis) {
            const Json& classes = doc.at("mahalanobis").at("classes");
            if (static_cast<Eigen::Index>(classes.size()) != catalog.size())
                throw ValidationError("model stores moments for the wrong number of classes");
            std::vector<ClassMoments<double>> moments;
            for (const auto& c : classes) {
                ClassMoments<double> m;
                m.mean = vector_from(c.at("mean"));
                m.covariance = matrix_from(c.at("covariance"), m.mean.size());
                if (m.covariance.rows() != m.mean.size())
                    throw ValidationError("covariance shape does not match the mean");
                m.ridge = c.at("ridge").get<double>();
                moments.push_back(std::move(m));
            }
            model.stats.emplace(std::move(moments));
        } else {
            const Json& k = doc.at("knn");
            FeatureSchema schema = schema_from_json(k.at("schema"));
            GowerMetric metric(schema, k.at("ranges").get<std::vector<double>>());
            const auto raw_labels = k.at("labels").get<std::vector<int>>();
            Eigen::VectorXi given(static_cast<Eigen::Index>(raw_labels.size()));
            for (std::size_t i = 0; i < raw_labels.size(); ++i)
                given(static_cast<Eigen::Index>(i)) = raw_labels[i];
            KnnOptions options{k.at("k").get<Eigen::Index>(), k.at("exclude_self").get<bool>()};
            if (options.k < 1)
                throw ValidationError("k must be at least 1");
            Eigen::MatrixXd codes = matrix_from(k.at("codes"), static_cast<Eigen::Index>(schema.size()));
            if (codes.rows() != given.size())
                throw ValidationError("knn reference has mismatched codes and labels");
            model.knn.emplace(
                KnnReference{std::move(metric), std::move(codes), LabelVector(std::move(given), catalog.size()), options});
        }
        return model;
    });
}

FarnessModel read_farness_model(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    try {
        return farness_model_from_json(Json::parse(text));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path.string() + ": not a valid farness model (" + e.what() + ")");
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

Json to_json(const SilhouettePlotData& data) {
    Json classes = Json::array();
    for (const auto& block : data.classes) {
        Json bars = Json::array();
        for (const auto& bar : block.bars)
            bars.push_back(Json{{"case", bar.case_id}, {"s", bar.s}});
        classes.push_back(Json{{"class", block.name},
                               {"count", block.count},
                               {"mean", block.mean ? Json(*block.mean) : Json(nullptr)},
                               {"bars", std::move(bars)}});
    }
    return Json{{"kind", "silhouette"}, {"total", data.total}, {"overall", data.overall}, {"classes", std::move(classes)}};
}

Json to_json(const QuasiResidualData& data) {
    Json points = Json::array();
    for (const auto& p : data.points)
        points.push_back(Json{{"case", p.case_id}, {"x", p.x}, {"pac", p.pac}});
    Json bins = Json::array();
    for (const auto& b : data.bins)
        bins.push_back(Json{{"lower", b.lower},   {"upper", b.upper}, {"midpoint", b.midpoint},
                            {"count", b.count},   {"mean", b.mean},   {"se", b.se},
                            {"median", b.median}, {"p75", b.p75}});
    Json curves = Json::array();
    for (const auto& c : data.curves)
        curves.push_back(Json{{"name", c.name}, {"x", c.x}, {"y", c.y}});
    Json out{{"kind", "qresid"},
             {"feature", data.feature_name},
             {"mode", to_string(data.mode)},
             {"intervals", data.bin_count}};
    if (!data.categories.empty())
        out["categories"] = data.categories;
    out["points"] = std::move(points);
    out["bins"] = std::move(bins);
    out["curves"] = std::move(curves);
    if (data.loess)
        out["loess"] = Json{{"x", vector_json(data.loess->x)}, {"y", vector_json(data.loess->y)}};
    return out;
}

Json to_json(const ClassMapData& data) {
    Json points = Json::array();
    for (const auto& p : data.points)
        points.push_back(Json{{"case", p.case_id},
                              {"farness", p.farness},
                              {"x", p.x},
                              {"pac", p.pac},
                              {"predicted", data.class_names[static_cast<std::size_t>(p.predicted)]},
                              {"outlier", p.outlier}});
    return Json{{"kind", "classmap"},     {"class", data.class_name}, {"classes", data.class_names},
                {"cutoff", data.cutoff},  {"cutoff_x", data.cutoff_x}, {"pac_boundary", data.pac_boundary},
                {"x_max", data.x_max},    {"points", std::move(points)}};
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

} // namespace classmap
