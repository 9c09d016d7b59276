#pragma once

// Plot datasets for the three displays: silhouette plot, quasi residual plot
// (PAC against a feature, with binned trend curves and an optional loess
// curve) and class map (PAC against probit-scaled farness for one class).

#include "classmap/core.hpp"
#include "classmap/farness.hpp"
#include "classmap/loess.hpp"

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

namespace classmap {

inline constexpr Eigen::Index kDefaultBins = 10;
/// Upper end of the probit-scaled farness axis.
inline constexpr double kProbitAxisMax = 4.0;

// ---------------------------------------------------------------------------

struct SilhouetteBar {
    Eigen::Index case_id;
    double s;
};

struct SilhouetteBlock {
    Eigen::Index class_index;
    std::string name;
    std::vector<SilhouetteBar> bars; ///< sorted by s, descending
    std::optional<double> mean;
    Eigen::Index count = 0;
};

struct SilhouettePlotData {
    std::vector<SilhouetteBlock> classes; ///< catalog order
    double overall = 0.0;
    Eigen::Index total = 0;
};

SilhouettePlotData build_silhouette(const CaseScores& scores, const LabelVector& labels, const ClassCatalog& catalog);

// ---------------------------------------------------------------------------

enum class TrendMode { mean, quantile };

std::string to_string(TrendMode mode);
TrendMode parse_trend_mode(std::string_view text);

struct QuasiPoint {
    Eigen::Index case_id;
    double x;
    double pac;
};

struct TrendBin {
    double lower;
    double upper;
    double midpoint;
    Eigen::Index count;
    double mean;
    double se; ///< sd / sqrt(count), 0 for a single point
    double median;
    double p75;
};

struct TrendCurve {
    std::string name; ///< mean, mean_minus_se, mean_plus_se, median, p75
    std::vector<double> x;
    std::vector<double> y;
};

struct QuasiResidualData {
    std::string feature_name;
    std::vector<std::string> categories; ///< empty for numeric features
    TrendMode mode = TrendMode::mean;
    Eigen::Index bin_count = kDefaultBins;
    std::vector<QuasiPoint> points;
    std::vector<TrendBin> bins; ///< non-empty bins only
    std::vector<TrendCurve> curves;
    std::optional<LoessCurve<double>> loess;
};

/// Numeric feature (NaN marks missing): `bins` equispaced intervals over
/// [min, max], the last one right-closed.
QuasiResidualData build_quasi_residual(const Eigen::VectorXd& pac, const Eigen::VectorXd& feature,
                                       TrendMode mode = TrendMode::mean, Eigen::Index bins = kDefaultBins,
                                       std::string feature_name = {});

/// Categorical feature: one bin per level, in the given order. Missing cells
/// ("" or NA) are dropped; other values outside `levels` are an error.
QuasiResidualData build_quasi_residual(const Eigen::VectorXd& pac, const std::vector<std::string>& feature,
                                       const std::vector<std::string>& levels, TrendMode mode = TrendMode::mean,
                                       std::string feature_name = {});

/// Adds a loess curve through the plotted points.
void add_loess(QuasiResidualData& data, const LoessOptions& options = {});

// ---------------------------------------------------------------------------

struct ClassMapPoint {
    Eigen::Index case_id;
    double farness;
    double x; ///< probit(farness) clamped to [0, 4]
    double pac;
    int predicted;
    bool outlier;
};

struct ClassMapData {
    Eigen::Index class_index;
    std::string class_name;
    std::vector<std::string> class_names; ///< full catalog, for the legend
    std::vector<ClassMapPoint> points;
    double cutoff;
    double cutoff_x;
    double pac_boundary = 0.5;
    double x_max = kProbitAxisMax;
};

/// Probit of a farness value clamped to the displayed axis [0, 4].
double probit_position(double farness);

ClassMapData build_class_map(Eigen::Index g, const CaseScores& scores, const LabelVector& labels,
                             const ClassCatalog& catalog, const Eigen::MatrixXd& farness, const FlagVector& outliers,
                             double cutoff = kDefaultCutoff);

} // namespace classmap
