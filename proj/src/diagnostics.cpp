#include "classmap/diagnostics.hpp"

#include "classmap/normal.hpp"
#include "classmap/robust_stats.hpp"
#include "classmap/table.hpp"

#include <algorithm>
#include <cmath>

namespace classmap {

namespace {

void check_pac(const Eigen::VectorXd& pac) {
    for (Eigen::Index i = 0; i < pac.size(); ++i)
        if (!(pac(i) >= 0.0 && pac(i) <= 1.0))
            throw ValidationError("PAC of case " + std::to_string(i + 1) + " is not in [0, 1]");
}

TrendBin summarize(double lower, double upper, const std::vector<double>& values) {
    TrendBin bin{lower, upper, 0.5 * (lower + upper), static_cast<Eigen::Index>(values.size()), 0.0, 0.0, 0.0, 0.0};
    double sum = 0.0;
    for (double v : values)
        sum += v;
    const double n = static_cast<double>(values.size());
    bin.mean = sum / n;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values)
            ss += (v - bin.mean) * (v - bin.mean);
        bin.se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    bin.median = quantile_of(values, 0.5);
    bin.p75 = quantile_of(values, 0.75);
    return bin;
}

void add_curves(QuasiResidualData& data) {
    auto curve = [&](std::string name, auto value) {
        TrendCurve c{std::move(name), {}, {}};
        for (const auto& bin : data.bins) {
            c.x.push_back(bin.midpoint);
            c.y.push_back(value(bin));
        }
        data.curves.push_back(std::move(c));
    };
    if (data.mode == TrendMode::mean) {
        curve("mean", [](const TrendBin& b) { return b.mean; });
        curve("mean_minus_se", [](const TrendBin& b) { return b.mean - b.se; });
        curve("mean_plus_se", [](const TrendBin& b) { return b.mean + b.se; });
    } else {
        curve("median", [](const TrendBin& b) { return b.median; });
        curve("p75", [](const TrendBin& b) { return b.p75; });
    }
}

} // namespace

SilhouettePlotData build_silhouette(const CaseScores& scores, const LabelVector& labels, const ClassCatalog& catalog) {
    const SilhouetteSummary summary = silhouette_summary(scores.s, labels, catalog);
    SilhouettePlotData data;
    data.overall = summary.overall;
    data.total = scores.s.size();
    for (Eigen::Index g = 0; g < catalog.size(); ++g) {
        SilhouetteBlock block{g, catalog.name(g), {}, summary.class_mean[static_cast<std::size_t>(g)],
                              summary.class_count[static_cast<std::size_t>(g)]};
        for (Eigen::Index i = 0; i < labels.size(); ++i)
            if (labels[i] == g)
                block.bars.push_back({i, scores.s(i)});
        std::stable_sort(block.bars.begin(), block.bars.end(),
                         [](const SilhouetteBar& a, const SilhouetteBar& b) { return a.s > b.s; });
        data.classes.push_back(std::move(block));
    }
    return data;
}

std::string to_string(TrendMode mode) { return mode == TrendMode::quantile ? "quantile" : "mean"; }

TrendMode parse_trend_mode(std::string_view text) {
    if (text == "mean")
        return TrendMode::mean;
    if (text == "quantile")
        return TrendMode::quantile;
    throw ValidationError("unknown trend mode '" + std::string(text) + "' (expected mean or quantile)");
}

QuasiResidualData build_quasi_residual(const Eigen::VectorXd& pac, const Eigen::VectorXd& feature, TrendMode mode,
                                       Eigen::Index bins, std::string feature_name) {
    if (bins < 2)
        throw ValidationError("the number of intervals must be at least 2");
    if (pac.size() != feature.size())
        throw ValidationError("PAC and feature differ in length");
    check_pac(pac);

    QuasiResidualData data;
    data.feature_name = std::move(feature_name);
    data.mode = mode;
    data.bin_count = bins;
    for (Eigen::Index i = 0; i < feature.size(); ++i)
        if (std::isfinite(feature(i)))
            data.points.push_back({i, feature(i), pac(i)});
    if (data.points.empty())
        throw ValidationError("feature has no non-missing values");

    double lo = data.points.front().x;
    double hi = lo;
    for (const auto& p : data.points) {
        lo = std::min(lo, p.x);
        hi = std::max(hi, p.x);
    }
    const double width = (hi - lo) / static_cast<double>(bins);
    std::vector<std::vector<double>> members(static_cast<std::size_t>(bins));
    for (const auto& p : data.points) {
        Eigen::Index b = 0;
        if (width > 0.0)
            b = std::min<Eigen::Index>(bins - 1, static_cast<Eigen::Index>(std::floor((p.x - lo) / width)));
        members[static_cast<std::size_t>(b)].push_back(p.pac);
    }
    for (Eigen::Index b = 0; b < bins; ++b) {
        const auto& values = members[static_cast<std::size_t>(b)];
        if (values.empty())
            continue;
        const double lower = lo + static_cast<double>(b) * width;
        const double upper = b + 1 == bins ? hi : lo + static_cast<double>(b + 1) * width;
        data.bins.push_back(summarize(lower, upper, values));
    }
    add_curves(data);
    return data;
}

QuasiResidualData build_quasi_residual(const Eigen::VectorXd& pac, const std::vector<std::string>& feature,
                                       const std::vector<std::string>& levels, TrendMode mode,
                                       std::string feature_name) {
    if (static_cast<Eigen::Index>(feature.size()) != pac.size())
        throw ValidationError("PAC and feature differ in length");
    if (levels.empty())
        throw ValidationError("categorical feature needs at least one level");
    check_pac(pac);

    QuasiResidualData data;
    data.feature_name = std::move(feature_name);
    data.categories = levels;
    data.mode = mode;
    data.bin_count = static_cast<Eigen::Index>(levels.size());
    std::vector<std::vector<double>> members(levels.size());
    for (std::size_t i = 0; i < feature.size(); ++i) {
        if (is_missing(feature[i]))
            continue;
        const auto it = std::find(levels.begin(), levels.end(), feature[i]);
        if (it == levels.end())
            throw ValidationError("case " + std::to_string(i + 1) + ": '" + feature[i] + "' is not a declared category");
        const auto level = static_cast<std::size_t>(it - levels.begin());
        const auto id = static_cast<Eigen::Index>(i);
        data.points.push_back({id, static_cast<double>(level), pac(id)});
        members[level].push_back(pac(id));
    }
    if (data.points.empty())
        throw ValidationError("feature has no non-missing values");
    for (std::size_t l = 0; l < levels.size(); ++l)
        if (!members[l].empty())
            data.bins.push_back(summarize(static_cast<double>(l), static_cast<double>(l), members[l]));
    add_curves(data);
    return data;
}

void add_loess(QuasiResidualData& data, const LoessOptions& options) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(data.points.size()));
    Eigen::VectorXd y(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        x(i) = data.points[static_cast<std::size_t>(i)].x;
        y(i) = data.points[static_cast<std::size_t>(i)].pac;
    }
    data.loess = loess_curve(x, y, options);
}

double probit_position(double farness) {
    const double z = normal_quantile(farness);
    if (std::isnan(z))
        throw ValidationError("farness must lie in [0, 1]");
    return std::clamp(z, 0.0, kProbitAxisMax);
}

ClassMapData build_class_map(Eigen::Index g, const CaseScores& scores, const LabelVector& labels,
                             const ClassCatalog& catalog, const Eigen::MatrixXd& farness, const FlagVector& outliers,
                             double cutoff) {
    if (g < 0 || g >= catalog.size())
        throw ValidationError("class index out of range");
    if (farness.rows() != labels.size() || farness.cols() != catalog.size() || outliers.size() != labels.size() ||
        scores.pac.size() != labels.size())
        throw ValidationError("class map inputs differ in shape");
    if (!(cutoff > 0.0 && cutoff < 1.0))
        throw ValidationError("farness cutoff must lie in (0, 1)");

    ClassMapData data{g, catalog.name(g), catalog.names(), {}, cutoff, probit_position(cutoff)};
    for (Eigen::Index i = 0; i < labels.size(); ++i) {
        if (labels[i] != g)
            continue;
        data.points.push_back(
            {i, farness(i, g), probit_position(farness(i, g)), scores.pac(i), scores.predicted(i), outliers(i)});
    }
    if (data.points.empty())
        throw ValidationError("class '" + catalog.name(g) + "' has no members to map");
    return data;
}

} // namespace classmap
