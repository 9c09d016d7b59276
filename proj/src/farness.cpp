#include "classmap/farness.hpp"

#include "classmap/robust_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace classmap {

namespace {

constexpr int kLambdaGridHalfWidth = 400; // lambda = k / 100 for k in [-400, 400]
constexpr double kRejectionThreshold = 3.0;

double grid_argmax(const Eigen::VectorXd& x, const FlagVector& keep) {
    double best_lambda = std::numeric_limits<double>::quiet_NaN();
    double best = -std::numeric_limits<double>::infinity();
    for (int k = -kLambdaGridHalfWidth; k <= kLambdaGridHalfWidth; ++k) {
        const double lambda = static_cast<double>(k) / 100.0;
        const double ll = yeo_johnson_loglik(x, lambda, keep);
        if (ll > best) {
            best = ll;
            best_lambda = lambda;
        }
    }
    if (std::isnan(best_lambda))
        throw DegenerateError("Yeo-Johnson likelihood is degenerate: the standardized distances are constant");
    return best_lambda;
}

void check_cutoff(double cutoff) {
    if (!(cutoff > 0.0 && cutoff < 1.0))
        throw ValidationError("farness cutoff must lie in (0, 1)");
}

FarnessResult finish(Eigen::MatrixXd distance, const TransformModel& transform, double cutoff) {
    FarnessResult out;
    out.farness = farness_scores(distance, transform);
    out.outlier = flag_outliers(out.farness, cutoff);
    out.distance = std::move(distance);
    return out;
}

Eigen::VectorXd own_class_column(const Eigen::MatrixXd& distance, const LabelVector& labels) {
    Eigen::VectorXd own(distance.rows());
    for (Eigen::Index i = 0; i < distance.rows(); ++i)
        own(i) = distance(i, labels[i]);
    return own;
}

} // namespace

double yeo_johnson_loglik(const Eigen::VectorXd& x, double lambda, const FlagVector& keep) {
    double count = 0.0;
    double sum = 0.0;
    double jacobian = 0.0;
    Eigen::VectorXd y(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (!keep(i))
            continue;
        y(i) = yeo_johnson(x(i), lambda);
        sum += y(i);
        count += 1.0;
        jacobian += std::copysign(std::log1p(std::abs(x(i))), x(i));
    }
    if (count < 2.0)
        return -std::numeric_limits<double>::infinity();
    const double mean = sum / count;
    double ss = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (keep(i))
            ss += (y(i) - mean) * (y(i) - mean);
    const double var = ss / count;
    if (!(var > 0.0) || !std::isfinite(var))
        return -std::numeric_limits<double>::infinity();
    return -0.5 * count * std::log(var) + (lambda - 1.0) * jacobian;
}

double estimate_yeo_johnson_lambda(const Eigen::VectorXd& x) {
    FlagVector keep = FlagVector::Constant(x.size(), true);
    const double initial = grid_argmax(x, keep);

    const Eigen::VectorXd y = yeo_johnson(x, initial);
    const double mean = y.mean();
    const double sd = std::sqrt((y.array() - mean).square().mean());
    for (Eigen::Index i = 0; i < x.size(); ++i)
        keep(i) = std::abs(y(i) - mean) <= kRejectionThreshold * sd;
    if (keep.count() == x.size() || keep.count() < 3)
        return initial;
    return grid_argmax(x, keep);
}

double knn_distance(std::vector<double> distances_to_class, Eigen::Index k) {
    if (k < 1)
        throw ValidationError("k must be at least 1");
    if (distances_to_class.empty())
        throw ValidationError("cannot compute a neighbor distance to an empty class");
    const auto take = std::min(distances_to_class.size(), static_cast<std::size_t>(k));
    std::partial_sort(distances_to_class.begin(), distances_to_class.begin() + static_cast<std::ptrdiff_t>(take),
                      distances_to_class.end());
    distances_to_class.resize(take);
    return median_of(std::move(distances_to_class));
}

Eigen::MatrixXd knn_distances(const Eigen::MatrixXd& dissimilarities, const LabelVector& reference_labels,
                              Eigen::Index num_classes, Eigen::Index k, bool exclude_diagonal) {
    if (dissimilarities.cols() != reference_labels.size())
        throw ValidationError("dissimilarity matrix has " + std::to_string(dissimilarities.cols()) +
                              " columns for " + std::to_string(reference_labels.size()) + " reference cases");
    std::vector<std::vector<Eigen::Index>> members(static_cast<std::size_t>(num_classes));
    for (Eigen::Index h = 0; h < reference_labels.size(); ++h)
        members[static_cast<std::size_t>(reference_labels[h])].push_back(h);
    for (Eigen::Index g = 0; g < num_classes; ++g)
        if (members[static_cast<std::size_t>(g)].empty())
            throw ValidationError("class " + std::to_string(g) + " has no reference members");

    Eigen::MatrixXd out(dissimilarities.rows(), num_classes);
    std::vector<double> buffer;
    for (Eigen::Index i = 0; i < dissimilarities.rows(); ++i) {
        for (Eigen::Index g = 0; g < num_classes; ++g) {
            buffer.clear();
            for (const Eigen::Index h : members[static_cast<std::size_t>(g)])
                if (!(exclude_diagonal && h == i))
                    buffer.push_back(dissimilarities(i, h));
            out(i, g) = knn_distance(buffer, k);
        }
    }
    return out;
}

double TransformModel::z(double distance, Eigen::Index g) const {
    const double d = distance / class_median[static_cast<std::size_t>(g)];
    const double x = (d - med) / mad;
    return (yeo_johnson(x, lambda) - med_transformed) / mad_transformed;
}

TransformModel fit_transform(const Eigen::VectorXd& own_distances, const LabelVector& labels,
                             const ClassCatalog& catalog) {
    detail::require_same_length(own_distances.size(), labels);
    if (!own_distances.allFinite() || (own_distances.array() < 0.0).any())
        throw ValidationError("distances must be finite and nonnegative");

    TransformModel model;
    const auto G = static_cast<std::size_t>(catalog.size());
    model.class_median.resize(G);
    for (std::size_t g = 0; g < G; ++g) {
        std::vector<double> own;
        for (Eigen::Index i = 0; i < labels.size(); ++i)
            if (static_cast<std::size_t>(labels[i]) == g)
                own.push_back(own_distances(i));
        if (own.empty())
            throw ValidationError("class '" + catalog.name(static_cast<Eigen::Index>(g)) + "' has no training members");
        const double m = median_of(std::move(own));
        if (!(m > 0.0))
            throw DegenerateError("median distance of class '" + catalog.name(static_cast<Eigen::Index>(g)) +
                                  "' to its own members is zero");
        model.class_median[g] = m;
    }

    Eigen::VectorXd d(own_distances.size());
    for (Eigen::Index i = 0; i < d.size(); ++i)
        d(i) = own_distances(i) / model.class_median[static_cast<std::size_t>(labels[i])];

    model.med = median(d);
    model.mad = mad(d, model.med);
    if (!(model.mad > 0.0))
        throw DegenerateError("median absolute deviation of the pooled distances is zero");
    const Eigen::VectorXd x = (d.array() - model.med) / model.mad;

    model.lambda = estimate_yeo_johnson_lambda(x);
    const Eigen::VectorXd y = yeo_johnson(x, model.lambda);
    model.med_transformed = median(y);
    model.mad_transformed = mad(y, model.med_transformed);
    if (!(model.mad_transformed > 0.0))
        throw DegenerateError("median absolute deviation of the transformed distances is zero");
    return model;
}

Eigen::MatrixXd farness_scores(const Eigen::MatrixXd& distances, const TransformModel& model) {
    if (static_cast<std::size_t>(distances.cols()) != model.class_median.size())
        throw ValidationError("distance matrix has " + std::to_string(distances.cols()) + " columns, model has " +
                              std::to_string(model.class_median.size()) + " classes");
    Eigen::MatrixXd out(distances.rows(), distances.cols());
    for (Eigen::Index i = 0; i < distances.rows(); ++i)
        for (Eigen::Index g = 0; g < distances.cols(); ++g)
            out(i, g) = normal_cdf(model.z(distances(i, g), g));
    return out;
}

FlagVector flag_outliers(const Eigen::MatrixXd& farness, double cutoff) {
    check_cutoff(cutoff);
    FlagVector out(farness.rows());
    for (Eigen::Index i = 0; i < farness.rows(); ++i)
        out(i) = (farness.row(i).array() > cutoff).all();
    return out;
}

std::string to_string(FarnessVariant variant) {
    return variant == FarnessVariant::knn ? "knn" : "mahalanobis";
}

FarnessVariant parse_farness_variant(std::string_view text) {
    if (text == "mahalanobis")
        return FarnessVariant::mahalanobis;
    if (text == "knn")
        return FarnessVariant::knn;
    throw ValidationError("unknown farness variant '" + std::string(text) + "' (expected mahalanobis or knn)");
}

FittedFarness fit_mahalanobis_farness(const Eigen::MatrixXd& embeddings, const LabelVector& labels,
                                      const ClassCatalog& catalog, double cutoff, const ClassStatsOptions& options) {
    check_cutoff(cutoff);
    ClassStats stats = fit_class_stats(embeddings, labels, catalog, options);
    Eigen::MatrixXd distance = mahalanobis_distances(embeddings, stats);
    TransformModel transform = fit_transform(own_class_column(distance, labels), labels, catalog);
    FarnessResult training = finish(std::move(distance), transform, cutoff);
    FarnessModel model{catalog, FarnessVariant::mahalanobis, std::move(stats), std::nullopt, std::move(transform), cutoff};
    return {std::move(model), std::move(training)};
}

FittedFarness fit_knn_farness(const Table& features, const LabelVector& labels, const FeatureSchema& schema,
                              const ClassCatalog& catalog, const KnnOptions& options, double cutoff) {
    check_cutoff(cutoff);
    if (options.k < 1)
        throw ValidationError("k must be at least 1");
    detail::require_same_length(static_cast<Eigen::Index>(features.size()), labels);
    GowerFit gower = dissimilarity_matrix(features, schema);
    Eigen::MatrixXd distance =
        knn_distances(gower.dissimilarities, labels, catalog.size(), options.k, options.exclude_self);
    TransformModel transform = fit_transform(own_class_column(distance, labels), labels, catalog);
    FarnessResult training = finish(std::move(distance), transform, cutoff);
    KnnReference reference{std::move(gower.metric), std::move(gower.codes), labels, options};
    FarnessModel model{catalog, FarnessVariant::knn, std::nullopt, std::move(reference), std::move(transform), cutoff};
    return {std::move(model), std::move(training)};
}

FarnessResult score_new_cases(const FarnessModel& model, const Eigen::MatrixXd& embeddings) {
    if (model.variant != FarnessVariant::mahalanobis || !model.stats)
        throw ValidationError("model was fitted with the " + to_string(model.variant) +
                              " variant; embeddings need a mahalanobis model");
    if (embeddings.cols() != model.stats->dimension())
        throw ValidationError("embeddings have " + std::to_string(embeddings.cols()) + " columns, model expects " +
                              std::to_string(model.stats->dimension()));
    return finish(mahalanobis_distances(embeddings, *model.stats), model.transform, model.cutoff);
}

FarnessResult score_new_cases(const FarnessModel& model, const Table& features) {
    if (model.variant != FarnessVariant::knn || !model.knn)
        throw ValidationError("model was fitted with the " + to_string(model.variant) +
                              " variant; feature tables need a knn model");
    const auto& ref = *model.knn;
    const Eigen::MatrixXd codes = ref.metric.encode(features);
    const Eigen::MatrixXd cross = cross_dissimilarities(codes, ref.codes, ref.metric);
    return finish(knn_distances(cross, ref.labels, model.catalog.size(), ref.options.k), model.transform,
                  model.cutoff);
}

} // namespace classmap
