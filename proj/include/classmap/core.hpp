#pragma once

// Posterior-based per-case quality: MAP prediction, best alternative class,
// probability of the alternative class (PAC) and the classification
// silhouette width s(i) = 1 - 2 PAC(i).
//
// Class indices are 0-based throughout. Argmax ties resolve to the lowest
// class index.

#include "classmap/error.hpp"

#include <Eigen/Core>

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace classmap {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Row sums within this distance of 1 are accepted as-is.
inline constexpr double kRowSumTolerance = 1e-9;
/// Row sums within this distance of 1 (but outside kRowSumTolerance) are renormalized.
inline constexpr double kRowSumRenormalize = 1e-6;

class ClassCatalog {
public:
    explicit ClassCatalog(std::vector<std::string> names) : names_(std::move(names)) {
        if (names_.size() < 2)
            throw UnsupportedError("at least two classes are required, got " + std::to_string(names_.size()));
        std::unordered_set<std::string> seen;
        for (const auto& n : names_) {
            if (n.empty())
                throw ValidationError("class names must be non-empty");
            if (!seen.insert(n).second)
                throw ValidationError("duplicate class name '" + n + "'");
        }
    }

    Eigen::Index size() const { return static_cast<Eigen::Index>(names_.size()); }
    const std::string& name(Eigen::Index g) const { return names_.at(static_cast<std::size_t>(g)); }
    const std::vector<std::string>& names() const { return names_; }

    std::optional<Eigen::Index> find(std::string_view name) const {
        for (std::size_t g = 0; g < names_.size(); ++g)
            if (names_[g] == name)
                return static_cast<Eigen::Index>(g);
        return std::nullopt;
    }

    /// Throws ValidationError listing the known classes when `name` is absent.
    Eigen::Index index_of(std::string_view name) const {
        if (auto g = find(name))
            return *g;
        throw ValidationError("unknown class '" + std::string(name) + "'; available classes: " + joined());
    }

    std::string joined(std::string_view sep = ", ") const {
        std::string out;
        for (std::size_t g = 0; g < names_.size(); ++g) {
            if (g)
                out += sep;
            out += names_[g];
        }
        return out;
    }

    friend bool operator==(const ClassCatalog&, const ClassCatalog&) = default;

private:
    std::vector<std::string> names_;
};

/// Given labels g_i as 0-based indices into a catalog of `num_classes` classes.
class LabelVector {
public:
    LabelVector() = default;

    LabelVector(Eigen::VectorXi given, Eigen::Index num_classes) : given_(std::move(given)) {
        for (Eigen::Index i = 0; i < given_.size(); ++i)
            if (given_(i) < 0 || given_(i) >= num_classes)
                throw ValidationError("label of case " + std::to_string(i + 1) + " is outside [0, " +
                                      std::to_string(num_classes) + ")");
    }

    static LabelVector from_names(std::span<const std::string> names, const ClassCatalog& catalog) {
        Eigen::VectorXi given(static_cast<Eigen::Index>(names.size()));
        for (std::size_t i = 0; i < names.size(); ++i) {
            auto g = catalog.find(names[i]);
            if (!g)
                throw ValidationError("case " + std::to_string(i + 1) + ": label '" + names[i] +
                                      "' is not a known class (" + catalog.joined() + ")");
            given(static_cast<Eigen::Index>(i)) = static_cast<int>(*g);
        }
        return LabelVector(std::move(given), catalog.size());
    }

    const Eigen::VectorXi& given() const { return given_; }
    Eigen::Index size() const { return given_.size(); }
    Eigen::Index operator[](Eigen::Index i) const { return given_(i); }

private:
    Eigen::VectorXi given_;
};

/// n x G row-stochastic matrix of posterior probabilities, validated on construction.
template <typename Scalar>
class BasicPosteriorMatrix {
public:
    using Matrix = MatrixX<Scalar>;

    BasicPosteriorMatrix(Matrix values, ClassCatalog catalog)
        : values_(std::move(values)), catalog_(std::move(catalog)) {
        if (values_.cols() != catalog_.size())
            throw ValidationError("posterior matrix has " + std::to_string(values_.cols()) + " columns but " +
                                  std::to_string(catalog_.size()) + " classes");
        for (Eigen::Index i = 0; i < values_.rows(); ++i) {
            for (Eigen::Index g = 0; g < values_.cols(); ++g) {
                const Scalar p = values_(i, g);
                if (!std::isfinite(static_cast<double>(p)) || p < Scalar(0) || p > Scalar(1))
                    throw ValidationError("row " + std::to_string(i + 1) + ": probability for class '" +
                                          catalog_.name(g) + "' is not in [0, 1]");
            }
            const Scalar sum = values_.row(i).sum();
            const double dev = std::abs(static_cast<double>(sum) - 1.0);
            if (dev <= kRowSumTolerance)
                continue;
            if (dev <= kRowSumRenormalize) {
                values_.row(i) /= sum;
                continue;
            }
            throw ValidationError("row " + std::to_string(i + 1) + ": probabilities sum to " +
                                  std::to_string(static_cast<double>(sum)) + ", expected 1");
        }
    }

    const Matrix& values() const { return values_; }
    const ClassCatalog& catalog() const { return catalog_; }
    Eigen::Index rows() const { return values_.rows(); }
    Eigen::Index num_classes() const { return values_.cols(); }

private:
    Matrix values_;
    ClassCatalog catalog_;
};

using PosteriorMatrix = BasicPosteriorMatrix<double>;

template <typename Scalar>
struct AlternativeClass {
    VectorX<Scalar> probability; ///< max over g != g_i of p(i, g)
    Eigen::VectorXi index;       ///< class attaining it
};

template <typename Scalar>
struct BasicCaseScores {
    VectorX<Scalar> pac;
    VectorX<Scalar> s;
    Eigen::VectorXi predicted;
    Eigen::VectorXi alt_class;
};

using CaseScores = BasicCaseScores<double>;

namespace detail {

inline void require_same_length(Eigen::Index n, const LabelVector& labels) {
    if (labels.size() != n)
        throw ValidationError("got " + std::to_string(labels.size()) + " labels for " + std::to_string(n) + " cases");
}

} // namespace detail

/// Maximum a posteriori class per row.
template <typename Scalar>
Eigen::VectorXi predict_map(const BasicPosteriorMatrix<Scalar>& post) {
    const auto& p = post.values();
    Eigen::VectorXi out(p.rows());
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        Eigen::Index best = 0;
        for (Eigen::Index g = 1; g < p.cols(); ++g)
            if (p(i, g) > p(i, best))
                best = g;
        out(i) = static_cast<int>(best);
    }
    return out;
}

template <typename Scalar>
AlternativeClass<Scalar> best_alternative(const BasicPosteriorMatrix<Scalar>& post, const LabelVector& labels) {
    const auto& p = post.values();
    if (p.cols() < 2)
        throw UnsupportedError("the alternative class needs at least two classes");
    detail::require_same_length(p.rows(), labels);
    AlternativeClass<Scalar> out{VectorX<Scalar>(p.rows()), Eigen::VectorXi(p.rows())};
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        const Eigen::Index own = labels[i];
        Eigen::Index best = -1;
        for (Eigen::Index g = 0; g < p.cols(); ++g) {
            if (g == own)
                continue;
            if (best < 0 || p(i, g) > p(i, best))
                best = g;
        }
        out.probability(i) = p(i, best);
        out.index(i) = static_cast<int>(best);
    }
    return out;
}

/// PAC(i) = p~(i) / (p(i, g_i) + p~(i)); 0/0 is defined as 0.5.
template <typename Scalar>
VectorX<Scalar> compute_pac(const BasicPosteriorMatrix<Scalar>& post, const LabelVector& labels) {
    const auto alt = best_alternative(post, labels);
    const auto& p = post.values();
    VectorX<Scalar> pac(p.rows());
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        const Scalar own = p(i, labels[i]);
        const Scalar other = alt.probability(i);
        const Scalar denom = own + other;
        pac(i) = denom > Scalar(0) ? other / denom : Scalar(0.5);
    }
    return pac;
}

template <typename Derived>
VectorX<typename Derived::Scalar> silhouette_values(const Eigen::MatrixBase<Derived>& pac) {
    using Scalar = typename Derived::Scalar;
    for (Eigen::Index i = 0; i < pac.size(); ++i) {
        const Scalar v = pac.derived().coeff(i);
        if (!(v >= Scalar(0) && v <= Scalar(1)))
            throw ValidationError("PAC of case " + std::to_string(i + 1) + " is not in [0, 1]");
    }
    return (Scalar(1) - Scalar(2) * pac.derived().array()).matrix();
}

template <typename Scalar>
BasicCaseScores<Scalar> score_cases(const BasicPosteriorMatrix<Scalar>& post, const LabelVector& labels) {
    auto alt = best_alternative(post, labels);
    BasicCaseScores<Scalar> out;
    out.pac = compute_pac(post, labels);
    out.s = silhouette_values(out.pac);
    out.predicted = predict_map(post);
    out.alt_class = std::move(alt.index);
    return out;
}

struct SilhouetteSummary {
    std::vector<std::optional<double>> class_mean; ///< absent for classes without members
    std::vector<Eigen::Index> class_count;
    double overall = 0.0;
};

template <typename Derived>
SilhouetteSummary silhouette_summary(const Eigen::MatrixBase<Derived>& s, const LabelVector& labels,
                                     const ClassCatalog& catalog) {
    detail::require_same_length(s.size(), labels);
    const auto G = static_cast<std::size_t>(catalog.size());
    std::vector<double> sums(G, 0.0);
    SilhouetteSummary out;
    out.class_count.assign(G, 0);
    double total = 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        const auto g = static_cast<std::size_t>(labels[i]);
        const double v = static_cast<double>(s.derived().coeff(i));
        sums[g] += v;
        ++out.class_count[g];
        total += v;
    }
    out.class_mean.resize(G);
    for (std::size_t g = 0; g < G; ++g)
        if (out.class_count[g] > 0)
            out.class_mean[g] = sums[g] / static_cast<double>(out.class_count[g]);
    out.overall = s.size() > 0 ? total / static_cast<double>(s.size()) : 0.0;
    return out;
}

} // namespace classmap
