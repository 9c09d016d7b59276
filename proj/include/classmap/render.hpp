#pragma once

// Deterministic SVG 1.1 output for the plot datasets. Coordinates are
// printed with four decimals; no timestamps or external references.

#include "classmap/diagnostics.hpp"

#include <string>
#include <vector>

namespace classmap {

struct Margins {
    double left = 130.0;
    double right = 30.0;
    double top = 50.0;
    double bottom = 60.0;
};

/// Ten fixed colors; class g uses entry g.
const std::vector<std::string>& default_palette();

struct RenderConfig {
    double width = 720.0;
    double height = 480.0;
    Margins margin;
    double font_size = 12.0;
    std::vector<std::string> palette = default_palette();
    std::string title;   ///< empty: a default per plot kind
    std::string x_label; ///< empty: a default per plot kind
    std::string y_label;
};

/// Probabilities labelled on the class-map farness axis.
const std::vector<double>& farness_axis_ticks();

/// Text used for a class average next to its silhouette.
std::string format_silhouette_mean(double mean);

std::string render_silhouette_svg(const SilhouettePlotData& data, const RenderConfig& config = {});
std::string render_quasi_residual_svg(const QuasiResidualData& data, const RenderConfig& config = {});
std::string render_class_map_svg(const ClassMapData& data, const RenderConfig& config = {});

} // namespace classmap
