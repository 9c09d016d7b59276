#pragma once

// Distance of a case to a class, and its conversion to farness(i, g), the
// estimated probability that a random member of class g lies at most as far
// from g as case i.
//
// Two distance variants:
//   * mahalanobis: on per-case vectors (e.g. final linear layer outputs),
//     using each class's training mean and covariance;
//   * knn: median of the k smallest Gower dissimilarities to the training
//     members of the class.
//
// Distances to the own class are divided by their per-class median, pooled,
// standardized with Med/Mad, Yeo-Johnson transformed, standardized again and
// mapped through the normal CDF. All constants are frozen at fit time so new
// cases are scored one at a time.

#include "classmap/core.hpp"
#include "classmap/dissimilarity.hpp"
#include "classmap/error.hpp"
#include "classmap/normal.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace classmap {

using FlagVector = Eigen::Array<bool, Eigen::Dynamic, 1>;

inline constexpr double kDefaultCutoff = 0.99;
inline constexpr Eigen::Index kDefaultNeighbors = 5;
/// Covariances with a larger condition number receive a ridge.
inline constexpr double kMaxCondition = 1e12;

// ---------------------------------------------------------------------------
// Yeo-Johnson

template <typename Scalar>
Scalar yeo_johnson(Scalar x, Scalar lambda) {
    using std::log1p;
    using std::pow;
    if (x >= Scalar(0)) {
        if (lambda == Scalar(0))
            return log1p(x);
        return (pow(Scalar(1) + x, lambda) - Scalar(1)) / lambda;
    }
    if (lambda == Scalar(2))
        return -log1p(-x);
    return -(pow(Scalar(1) - x, Scalar(2) - lambda) - Scalar(1)) / (Scalar(2) - lambda);
}

template <typename Derived>
VectorX<typename Derived::Scalar> yeo_johnson(const Eigen::MatrixBase<Derived>& x, typename Derived::Scalar lambda) {
    using Scalar = typename Derived::Scalar;
    return x.derived().unaryExpr([lambda](Scalar v) { return yeo_johnson(v, lambda); }).eval();
}

/// Profile likelihood estimate of the Yeo-Johnson lambda on the grid
/// [-4, 4] with step 0.01, refitted once after discarding points whose
/// standardized transformed value exceeds 3 in absolute value.
double estimate_yeo_johnson_lambda(const Eigen::VectorXd& x);

/// Profile log-likelihood of the Yeo-Johnson normal model at `lambda`,
/// restricted to points with keep(i) set.
double yeo_johnson_loglik(const Eigen::VectorXd& x, double lambda, const FlagVector& keep);

// ---------------------------------------------------------------------------
// Mahalanobis distance to class

template <typename Scalar>
struct ClassMoments {
    VectorX<Scalar> mean;
    MatrixX<Scalar> covariance;
    Scalar ridge{0}; ///< multiple of the identity added before inversion
};

struct ClassStatsOptions {
    bool allow_ridge = true;
};

template <typename Scalar>
class BasicClassStats {
public:
    BasicClassStats() = default;

    explicit BasicClassStats(std::vector<ClassMoments<Scalar>> moments) : moments_(std::move(moments)) {
        factors_.reserve(moments_.size());
        for (const auto& m : moments_) {
            const Eigen::Index d = m.mean.size();
            MatrixX<Scalar> reg = m.covariance + m.ridge * MatrixX<Scalar>::Identity(d, d);
            factors_.emplace_back(reg);
            if (factors_.back().info() != Eigen::Success)
                throw DegenerateError("class covariance is not positive definite");
        }
    }

    Eigen::Index num_classes() const { return static_cast<Eigen::Index>(moments_.size()); }
    Eigen::Index dimension() const { return moments_.empty() ? 0 : moments_.front().mean.size(); }
    const ClassMoments<Scalar>& moments(Eigen::Index g) const { return moments_.at(static_cast<std::size_t>(g)); }
    const std::vector<ClassMoments<Scalar>>& all_moments() const { return moments_; }
    const Eigen::LLT<MatrixX<Scalar>>& factor(Eigen::Index g) const { return factors_.at(static_cast<std::size_t>(g)); }

private:
    std::vector<ClassMoments<Scalar>> moments_;
    std::vector<Eigen::LLT<MatrixX<Scalar>>> factors_;
};

using ClassStats = BasicClassStats<double>;

namespace detail {

template <typename Scalar>
bool well_conditioned(const VectorX<Scalar>& eigenvalues, Scalar ridge) {
    const Scalar lo = eigenvalues.minCoeff() + ridge;
    const Scalar hi = eigenvalues.maxCoeff() + ridge;
    return lo > Scalar(0) && hi / lo <= Scalar(kMaxCondition);
}

} // namespace detail

/// Per-class sample mean and covariance (denominator n_g - 1). A singular or
/// ill-conditioned covariance gets the smallest ridge from {1e-10, 1e-8, ...}
/// that brings its condition number to at most 1e12.
template <typename Derived>
BasicClassStats<typename Derived::Scalar> fit_class_stats(const Eigen::MatrixBase<Derived>& embeddings,
                                                          const LabelVector& labels, const ClassCatalog& catalog,
                                                          const ClassStatsOptions& options = {}) {
    using Scalar = typename Derived::Scalar;
    const auto& v = embeddings.derived();
    detail::require_same_length(v.rows(), labels);
    if (!v.allFinite())
        throw ValidationError("embeddings contain non-finite values");
    const Eigen::Index d = v.cols();
    std::vector<ClassMoments<Scalar>> moments;
    for (Eigen::Index g = 0; g < catalog.size(); ++g) {
        std::vector<Eigen::Index> members;
        for (Eigen::Index i = 0; i < labels.size(); ++i)
            if (labels[i] == g)
                members.push_back(i);
        const auto n_g = static_cast<Eigen::Index>(members.size());
        if (n_g < 2)
            throw ValidationError("class '" + catalog.name(g) + "' has " + std::to_string(n_g) +
                                  " members; its covariance needs at least 2");
        MatrixX<Scalar> x(n_g, d);
        for (Eigen::Index r = 0; r < n_g; ++r)
            x.row(r) = v.row(members[static_cast<std::size_t>(r)]);
        ClassMoments<Scalar> m;
        m.mean = x.colwise().mean().transpose();
        const MatrixX<Scalar> centered = x.rowwise() - m.mean.transpose();
        m.covariance = (centered.transpose() * centered) / Scalar(n_g - 1);

        const Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> eig(m.covariance, Eigen::EigenvaluesOnly);
        const VectorX<Scalar> ev = eig.eigenvalues();
        if (!detail::well_conditioned(ev, Scalar(0))) {
            if (!options.allow_ridge)
                throw DegenerateError("covariance of class '" + catalog.name(g) + "' is singular or ill-conditioned");
            Scalar ridge(1e-10);
            while (!detail::well_conditioned(ev, ridge)) {
                ridge *= Scalar(100);
                if (ridge > Scalar(1e10))
                    throw DegenerateError("no ridge repairs the covariance of class '" + catalog.name(g) + "'");
            }
            m.ridge = ridge;
        }
        moments.push_back(std::move(m));
    }
    return BasicClassStats<Scalar>(std::move(moments));
}

template <typename Derived>
typename Derived::Scalar mahalanobis_distance(const Eigen::MatrixBase<Derived>& v,
                                              const BasicClassStats<typename Derived::Scalar>& stats,
                                              Eigen::Index g) {
    using Scalar = typename Derived::Scalar;
    if (!v.allFinite())
        throw ValidationError("embedding vector contains non-finite values");
    if (v.size() != stats.dimension())
        throw ValidationError("embedding has " + std::to_string(v.size()) + " entries, model expects " +
                              std::to_string(stats.dimension()));
    const auto& mean = stats.moments(g).mean;
    VectorX<Scalar> diff(v.size());
    for (Eigen::Index j = 0; j < v.size(); ++j)
        diff(j) = v.derived().coeff(j) - mean(j);
    const VectorX<Scalar> y = stats.factor(g).matrixL().solve(diff);
    return std::sqrt(y.squaredNorm());
}

/// n x G matrix of Mahalanobis distances of every row to every class.
template <typename Derived>
MatrixX<typename Derived::Scalar> mahalanobis_distances(const Eigen::MatrixBase<Derived>& embeddings,
                                                        const BasicClassStats<typename Derived::Scalar>& stats) {
    const auto& v = embeddings.derived();
    MatrixX<typename Derived::Scalar> out(v.rows(), stats.num_classes());
    for (Eigen::Index i = 0; i < v.rows(); ++i)
        for (Eigen::Index g = 0; g < stats.num_classes(); ++g)
            out(i, g) = mahalanobis_distance(v.row(i), stats, g);
    return out;
}

// ---------------------------------------------------------------------------
// kNN distance to class

/// Median of the k smallest values; all of them when fewer than k.
double knn_distance(std::vector<double> distances_to_class, Eigen::Index k);

struct KnnOptions {
    Eigen::Index k = kDefaultNeighbors;
    /// Leave out d(i, i) = 0 when a training case is scored against its own class.
    bool exclude_self = false;
};

/// D(i, g) for every row of an m x n dissimilarity matrix against n labelled
/// reference cases. With `exclude_diagonal`, entry (i, i) is skipped, which
/// assumes rows and columns index the same training cases.
Eigen::MatrixXd knn_distances(const Eigen::MatrixXd& dissimilarities, const LabelVector& reference_labels,
                              Eigen::Index num_classes, Eigen::Index k, bool exclude_diagonal = false);

// ---------------------------------------------------------------------------
// Distance distribution

struct TransformModel {
    std::vector<double> class_median; ///< m_g: median own-class distance per class
    double med = 0.0;                 ///< of the pooled normalized distances
    double mad = 1.0;
    double lambda = 1.0;
    double med_transformed = 0.0;     ///< of the Yeo-Johnson transformed values
    double mad_transformed = 1.0;

    /// Standard-normal score of a distance D to class g.
    double z(double distance, Eigen::Index g) const;
};

/// Fits the transform from each training case's distance to its own class.
TransformModel fit_transform(const Eigen::VectorXd& own_distances, const LabelVector& labels,
                             const ClassCatalog& catalog);

/// farness(i, g) = Phi(z(D(i, g) / m_g)).
Eigen::MatrixXd farness_scores(const Eigen::MatrixXd& distances, const TransformModel& model);

/// Cases whose farness exceeds `cutoff` for every class.
FlagVector flag_outliers(const Eigen::MatrixXd& farness, double cutoff = kDefaultCutoff);

// ---------------------------------------------------------------------------
// Fitted model and scoring

enum class FarnessVariant { mahalanobis, knn };

std::string to_string(FarnessVariant variant);
FarnessVariant parse_farness_variant(std::string_view text);

struct KnnReference {
    GowerMetric metric;
    Eigen::MatrixXd codes; ///< encoded training rows
    LabelVector labels;
    KnnOptions options;
};

struct FarnessModel {
    ClassCatalog catalog;
    FarnessVariant variant = FarnessVariant::mahalanobis;
    std::optional<ClassStats> stats;
    std::optional<KnnReference> knn;
    TransformModel transform;
    double cutoff = kDefaultCutoff;
};

struct FarnessResult {
    Eigen::MatrixXd distance; ///< D(i, g)
    Eigen::MatrixXd farness;
    FlagVector outlier;
};

struct FittedFarness {
    FarnessModel model;
    FarnessResult training;
};

FittedFarness fit_mahalanobis_farness(const Eigen::MatrixXd& embeddings, const LabelVector& labels,
                                      const ClassCatalog& catalog, double cutoff = kDefaultCutoff,
                                      const ClassStatsOptions& options = {});

FittedFarness fit_knn_farness(const Table& features, const LabelVector& labels, const FeatureSchema& schema,
                              const ClassCatalog& catalog, const KnnOptions& options = {},
                              double cutoff = kDefaultCutoff);

/// Scores embeddings against a Mahalanobis model.
FarnessResult score_new_cases(const FarnessModel& model, const Eigen::MatrixXd& embeddings);
/// Scores feature rows against a kNN model.
FarnessResult score_new_cases(const FarnessModel& model, const Table& features);

} // namespace classmap
