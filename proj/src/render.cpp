#include "classmap/render.hpp"

#include "classmap/error.hpp"
#include "classmap/format.hpp"
#include "classmap/normal.hpp"

#include <algorithm>
#include <cmath>
#include <string_view>

namespace classmap {

namespace {

constexpr std::string_view kAxisColor = "#333333";
constexpr std::string_view kShadeColor = "#e6e6e6";
constexpr std::string_view kRed = "#d62728";
constexpr std::string_view kBlue = "#1f77b4";
constexpr std::string_view kOrange = "#ff7f0e";

std::string num(double v) { return format_fixed(v, 4); }

std::string escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '"':
            out += "&quot;";
            break;
        case '\'':
            out += "&apos;";
            break;
        default:
            out += c;
        }
    }
    return out;
}

// Maps data coordinates into the plot rectangle; SVG y grows downwards.
struct Frame {
    double left, top, width, height;
    double x_lo, x_hi, y_lo, y_hi;

    double px(double x) const { return left + (x - x_lo) / (x_hi - x_lo) * width; }
    double py(double y) const { return top + (y_hi - y) / (y_hi - y_lo) * height; }
    double right() const { return left + width; }
    double bottom() const { return top + height; }
};

class SvgDocument {
public:
    SvgDocument(const RenderConfig& config) : font_(config.font_size) {
        out_ += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
        out_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(config.width) +
                "\" height=\"" + num(config.height) + "\" viewBox=\"0 0 " + num(config.width) + " " +
                num(config.height) + "\" font-family=\"Helvetica, Arial, sans-serif\" font-size=\"" +
                num(config.font_size) + "\">\n";
        out_ += "<rect x=\"0.0000\" y=\"0.0000\" width=\"" + num(config.width) + "\" height=\"" +
                num(config.height) + "\" fill=\"#ffffff\"/>\n";
    }

    void raw(std::string_view s) { out_ += s; }

    void rect(double x, double y, double w, double h, std::string_view fill, std::string_view cls = {}) {
        out_ += "<rect";
        add_class(cls);
        out_ += " x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) + "\" height=\"" + num(h) +
                "\" fill=\"" + std::string(fill) + "\"/>\n";
    }

    void line(double x1, double y1, double x2, double y2, std::string_view stroke, double width = 1.0,
              std::string_view cls = {}, std::string_view dash = {}) {
        out_ += "<line";
        add_class(cls);
        out_ += " x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) +
                "\" stroke=\"" + std::string(stroke) + "\" stroke-width=\"" + num(width) + "\"";
        if (!dash.empty())
            out_ += " stroke-dasharray=\"" + std::string(dash) + "\"";
        out_ += "/>\n";
    }

    void circle(double cx, double cy, double r, std::string_view fill, std::string_view cls,
                std::string_view stroke = "none", double stroke_width = 0.0) {
        out_ += "<circle";
        add_class(cls);
        out_ += " cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) + "\" fill=\"" + std::string(fill) +
                "\" stroke=\"" + std::string(stroke) + "\"";
        if (stroke_width > 0.0)
            out_ += " stroke-width=\"" + num(stroke_width) + "\"";
        out_ += "/>\n";
    }

    void polyline(const std::vector<double>& xs, const std::vector<double>& ys, std::string_view stroke,
                  double width, std::string_view cls) {
        out_ += "<polyline";
        add_class(cls);
        out_ += " fill=\"none\" stroke=\"" + std::string(stroke) + "\" stroke-width=\"" + num(width) + "\" points=\"";
        for (std::size_t k = 0; k < xs.size(); ++k) {
            if (k)
                out_ += ' ';
            out_ += num(xs[k]) + "," + num(ys[k]);
        }
        out_ += "\"/>\n";
    }

    void text(double x, double y, std::string_view content, std::string_view anchor = "start",
              std::string_view cls = {}, double size = 0.0, double rotate = 0.0) {
        out_ += "<text";
        add_class(cls);
        out_ += " x=\"" + num(x) + "\" y=\"" + num(y) + "\" text-anchor=\"" + std::string(anchor) + "\"";
        if (size > 0.0)
            out_ += " font-size=\"" + num(size) + "\"";
        if (rotate != 0.0)
            out_ += " transform=\"rotate(" + num(rotate) + " " + num(x) + " " + num(y) + ")\"";
        out_ += ">" + escape(content) + "</text>\n";
    }

    double font() const { return font_; }

    std::string finish() {
        out_ += "</svg>\n";
        return std::move(out_);
    }

private:
    void add_class(std::string_view cls) {
        if (!cls.empty())
            out_ += " class=\"" + std::string(cls) + "\"";
    }

    std::string out_;
    double font_;
};

void check_config(const RenderConfig& config, std::size_t classes) {
    if (!(config.width > 0.0 && config.height > 0.0 && config.font_size > 0.0))
        throw ValidationError("render dimensions and font size must be positive");
    if (config.width - config.margin.left - config.margin.right <= 0.0 ||
        config.height - config.margin.top - config.margin.bottom <= 0.0)
        throw ValidationError("margins leave no room for the plot");
    if (config.palette.size() < classes)
        throw ValidationError("palette has " + std::to_string(config.palette.size()) + " colors for " +
                              std::to_string(classes) + " classes");
}

Frame make_frame(const RenderConfig& config, double x_lo, double x_hi, double y_lo, double y_hi) {
    return {config.margin.left,
            config.margin.top,
            config.width - config.margin.left - config.margin.right,
            config.height - config.margin.top - config.margin.bottom,
            x_lo,
            x_hi,
            y_lo,
            y_hi};
}

struct Tick {
    double value;
    std::string label;
};

std::vector<Tick> nice_ticks(double lo, double hi, int target = 5) {
    if (!(hi > lo))
        return {{lo, format_roundtrip(lo)}};
    const double raw = (hi - lo) / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double norm = raw / mag;
    const double step = (norm < 1.5 ? 1.0 : norm < 3.0 ? 2.0 : norm < 7.0 ? 5.0 : 10.0) * mag;
    const int decimals = std::max(0, static_cast<int>(-std::floor(std::log10(step) + 1e-9)));
    std::vector<Tick> ticks;
    const auto first = static_cast<long>(std::ceil(lo / step - 1e-9));
    for (long k = first;; ++k) {
        const double v = static_cast<double>(k) * step;
        if (v > hi + step * 1e-9)
            break;
        ticks.push_back({v, format_fixed(v, decimals)});
    }
    return ticks;
}

void draw_axes(SvgDocument& svg, const Frame& f, const std::vector<Tick>& x_ticks, const std::vector<Tick>& y_ticks,
               std::string_view x_label, std::string_view y_label) {
    const double fs = svg.font();
    svg.line(f.left, f.bottom(), f.right(), f.bottom(), kAxisColor, 1.0, "axis");
    svg.line(f.left, f.top, f.left, f.bottom(), kAxisColor, 1.0, "axis");
    for (const auto& t : x_ticks) {
        const double x = f.px(t.value);
        svg.line(x, f.bottom(), x, f.bottom() + 5.0, kAxisColor, 1.0, "tick");
        svg.text(x, f.bottom() + 5.0 + fs, t.label, "middle", "tick-label");
    }
    for (const auto& t : y_ticks) {
        const double y = f.py(t.value);
        svg.line(f.left - 5.0, y, f.left, y, kAxisColor, 1.0, "tick");
        svg.text(f.left - 8.0, y + 0.35 * fs, t.label, "end", "tick-label");
    }
    if (!x_label.empty())
        svg.text(f.left + 0.5 * f.width, f.bottom() + 5.0 + 2.6 * fs, x_label, "middle", "axis-label");
    if (!y_label.empty()) {
        const double x = f.left - 3.6 * fs;
        const double y = f.top + 0.5 * f.height;
        svg.text(x, y, y_label, "middle", "axis-label", 0.0, -90.0);
    }
}

void draw_title(SvgDocument& svg, const RenderConfig& config, std::string_view fallback) {
    const std::string& title = config.title.empty() ? std::string(fallback) : config.title;
    svg.text(0.5 * config.width, 0.5 * config.margin.top, title, "middle", "title", 1.3 * config.font_size);
}

std::vector<Tick> unit_ticks() {
    return {{0.0, "0"}, {0.25, "0.25"}, {0.5, "0.5"}, {0.75, "0.75"}, {1.0, "1"}};
}

void clip_to(SvgDocument& svg, const Frame& f, std::string_view id) {
    svg.raw("<defs><clipPath id=\"" + std::string(id) + "\"><rect x=\"" + num(f.left) + "\" y=\"" + num(f.top) +
            "\" width=\"" + num(f.width) + "\" height=\"" + num(f.height) + "\"/></clipPath></defs>\n");
}

} // namespace

const std::vector<std::string>& default_palette() {
    static const std::vector<std::string> palette{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    return palette;
}

const std::vector<double>& farness_axis_ticks() {
    static const std::vector<double> ticks{0.5, 0.75, 0.9, 0.99, 0.999};
    return ticks;
}

std::string format_silhouette_mean(double mean) { return format_fixed(mean, 2); }

std::string render_silhouette_svg(const SilhouettePlotData& data, const RenderConfig& config) {
    if (data.classes.empty())
        throw ValidationError("silhouette plot has no classes");
    if (data.total <= 0)
        throw ValidationError("silhouette plot has no cases");
    check_config(config, data.classes.size());

    double lo = 0.0;
    for (const auto& block : data.classes)
        for (const auto& bar : block.bars)
            lo = std::min(lo, bar.s);
    lo = std::max(-1.0, std::floor(lo * 10.0) / 10.0);
    // Vertical extent uses the bottom margin for the overall average line.
    const Frame f = make_frame(config, lo, 1.0, 0.0, 1.0);

    SvgDocument svg(config);
    draw_title(svg, config, "Silhouette plot");

    const double n = static_cast<double>(data.total);
    const double gap = std::max(1.0, 0.02 * n);
    const double units = n + gap * static_cast<double>(data.classes.size() - 1);
    const double unit = f.height / units;
    const double zero = f.px(0.0);
    const double fs = config.font_size;

    double cursor = f.top;
    for (const auto& block : data.classes) {
        const std::string& color = config.palette[static_cast<std::size_t>(block.class_index)];
        const double block_top = cursor;
        svg.raw("<g class=\"silhouette\" data-class=\"" + escape(block.name) + "\">\n");
        for (const auto& bar : block.bars) {
            const double x = f.px(bar.s);
            svg.rect(std::min(x, zero), cursor, std::abs(x - zero), unit, color, "bar");
            cursor += unit;
        }
        svg.raw("</g>\n");
        const double mid = block_top + 0.5 * static_cast<double>(block.count) * unit;
        const std::string stats = std::to_string(block.count) + " | " +
                                  (block.mean ? format_silhouette_mean(*block.mean) : std::string("NA"));
        svg.text(f.left - 10.0, mid - 0.15 * fs, block.name, "end", "class-label");
        svg.text(f.left - 10.0, mid + 0.95 * fs, stats, "end", "class-stats");
        cursor += gap * unit;
    }

    svg.line(zero, f.top, zero, f.bottom(), kAxisColor, 1.0, "zero-line");
    svg.line(f.left, f.bottom(), f.right(), f.bottom(), kAxisColor, 1.0, "axis");
    for (const auto& t : nice_ticks(lo, 1.0)) {
        const double x = f.px(t.value);
        svg.line(x, f.bottom(), x, f.bottom() + 5.0, kAxisColor, 1.0, "tick");
        svg.text(x, f.bottom() + 5.0 + fs, t.label, "middle", "tick-label");
    }
    svg.text(f.left + 0.5 * f.width, f.bottom() + 5.0 + 2.4 * fs,
             config.x_label.empty() ? std::string("Silhouette width s(i)") : config.x_label, "middle", "axis-label");
    svg.text(f.left + 0.5 * f.width, f.bottom() + 5.0 + 3.8 * fs,
             "Overall average silhouette width: " + format_silhouette_mean(data.overall), "middle", "overall");
    if (!config.y_label.empty())
        svg.text(f.left - 3.6 * fs, f.top + 0.5 * f.height, config.y_label, "middle", "axis-label", 0.0, -90.0);
    return svg.finish();
}

std::string render_quasi_residual_svg(const QuasiResidualData& data, const RenderConfig& config) {
    if (data.points.empty())
        throw ValidationError("quasi residual plot has no points");
    check_config(config, 0);

    double x_lo = 0.0;
    double x_hi = 0.0;
    std::vector<Tick> x_ticks;
    if (!data.categories.empty()) {
        x_lo = -0.5;
        x_hi = static_cast<double>(data.categories.size()) - 0.5;
        for (std::size_t l = 0; l < data.categories.size(); ++l)
            x_ticks.push_back({static_cast<double>(l), data.categories[l]});
    } else {
        x_lo = x_hi = data.points.front().x;
        for (const auto& p : data.points) {
            x_lo = std::min(x_lo, p.x);
            x_hi = std::max(x_hi, p.x);
        }
        const double pad = x_hi > x_lo ? 0.04 * (x_hi - x_lo) : 0.5;
        x_ticks = nice_ticks(x_lo, x_hi);
        x_lo -= pad;
        x_hi += pad;
    }
    const Frame f = make_frame(config, x_lo, x_hi, 0.0, 1.0);

    SvgDocument svg(config);
    clip_to(svg, f, "plot-area");
    draw_title(svg, config, "Quasi residual plot");
    svg.rect(f.left, f.py(0.5), f.width, f.py(0.0) - f.py(0.5), kShadeColor, "pac-shade");

    svg.raw("<g class=\"points\" clip-path=\"url(#plot-area)\" fill-opacity=\"0.6\">\n");
    for (const auto& p : data.points)
        svg.circle(f.px(p.x), f.py(p.pac), 2.0, "#4d4d4d", "point");
    svg.raw("</g>\n");

    svg.raw("<g class=\"trends\" clip-path=\"url(#plot-area)\">\n");
    for (const auto& curve : data.curves) {
        std::vector<double> xs, ys;
        for (std::size_t k = 0; k < curve.x.size(); ++k) {
            xs.push_back(f.px(curve.x[k]));
            ys.push_back(f.py(curve.y[k]));
        }
        const bool primary = curve.name == "mean" || curve.name == "median";
        const std::string_view color = primary ? kRed : curve.name == "p75" ? kOrange : kBlue;
        svg.polyline(xs, ys, color, primary ? 2.0 : 1.5, "trend-" + curve.name);
    }
    if (data.loess) {
        std::vector<double> xs, ys;
        for (Eigen::Index k = 0; k < data.loess->x.size(); ++k) {
            xs.push_back(f.px(data.loess->x(k)));
            ys.push_back(f.py(data.loess->y(k)));
        }
        svg.polyline(xs, ys, kRed, 2.0, "loess");
    }
    svg.raw("</g>\n");

    draw_axes(svg, f, x_ticks, unit_ticks(),
              config.x_label.empty() ? (data.feature_name.empty() ? std::string("feature") : data.feature_name)
                                     : config.x_label,
              config.y_label.empty() ? std::string("PAC") : config.y_label);
    return svg.finish();
}

std::string render_class_map_svg(const ClassMapData& data, const RenderConfig& config) {
    if (data.points.empty())
        throw ValidationError("class map has no points");
    check_config(config, data.class_names.size());

    const Frame f = make_frame(config, -0.1, data.x_max + 0.1, -0.03, 1.03);
    SvgDocument svg(config);
    draw_title(svg, config, "Class map of '" + data.class_name + "'");

    const double fs = config.font_size;
    double legend_x = f.left;
    const double legend_y = config.margin.top - 0.6 * fs;
    for (std::size_t g = 0; g < data.class_names.size(); ++g) {
        svg.circle(legend_x + 4.0, legend_y - 0.35 * fs, 4.0, config.palette[g], "legend-key");
        svg.text(legend_x + 12.0, legend_y, data.class_names[g], "start", "legend-label");
        legend_x += 24.0 + 0.6 * fs * static_cast<double>(data.class_names[g].size());
    }

    svg.rect(f.left, f.py(data.pac_boundary), f.width, f.py(0.0) - f.py(data.pac_boundary), kShadeColor,
             "pac-shade");
    svg.line(f.px(data.cutoff_x), f.top, f.px(data.cutoff_x), f.bottom(), "#000000", 1.0, "cutoff", "6,4");

    svg.raw("<g class=\"points\">\n");
    for (const auto& p : data.points) {
        const std::string& color = config.palette[static_cast<std::size_t>(p.predicted)];
        if (p.outlier)
            svg.circle(f.px(p.x), f.py(p.pac), 3.5, color, "point outlier", "#000000", 1.5);
        else
            svg.circle(f.px(p.x), f.py(p.pac), 3.5, color, "point");
    }
    svg.raw("</g>\n");

    std::vector<Tick> x_ticks;
    for (double prob : farness_axis_ticks())
        x_ticks.push_back({normal_quantile(prob), format_roundtrip(prob)});
    draw_axes(svg, f, x_ticks, unit_ticks(),
              config.x_label.empty() ? std::string("farness from given class") : config.x_label,
              config.y_label.empty() ? std::string("P[alternative class]") : config.y_label);
    return svg.finish();
}

} // namespace classmap
