#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "bldctune/csv.hpp"

namespace bldctune {

/// One named curve (or point set) for the SVG charts.
struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool scatter = false;
    bool point_labels = false;  // annotate points with 1-based indices
};

namespace detail {

inline constexpr const char* kSeriesColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                                "#9467bd", "#ff7f0e", "#8c564b"};

struct AxisRange {
    double lo = 0.0;
    double hi = 1.0;

    void expand(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
};

inline std::string trim_number(double v) {
    std::ostringstream oss;
    oss.precision(4);
    oss << v;
    return oss.str();
}

}  // namespace detail

/// Writes a minimal static chart: axes box, five ticks per axis, the series
/// as polylines or scatter markers, and a legend.
inline void write_svg_chart(const std::string& path, const std::string& title,
                            const std::string& x_label, const std::string& y_label,
                            const std::vector<PlotSeries>& series) {
    constexpr double width = 720.0;
    constexpr double height = 480.0;
    constexpr double margin_left = 72.0;
    constexpr double margin_right = 24.0;
    constexpr double margin_top = 40.0;
    constexpr double margin_bottom = 56.0;

    detail::AxisRange xr{std::numeric_limits<double>::infinity(),
                         -std::numeric_limits<double>::infinity()};
    detail::AxisRange yr = xr;
    for (const auto& s : series) {
        for (double v : s.x) {
            xr.expand(v);
        }
        for (double v : s.y) {
            yr.expand(v);
        }
    }
    if (!(xr.lo < xr.hi)) {
        xr.lo -= 1.0;
        xr.hi += 1.0;
    }
    if (!(yr.lo < yr.hi)) {
        yr.lo -= 1.0;
        yr.hi += 1.0;
    }
    const double y_pad = 0.05 * (yr.hi - yr.lo);
    yr.lo -= y_pad;
    yr.hi += y_pad;

    const double plot_w = width - margin_left - margin_right;
    const double plot_h = height - margin_top - margin_bottom;
    const auto to_px_x = [&](double v) {
        return margin_left + (v - xr.lo) / (xr.hi - xr.lo) * plot_w;
    };
    const auto to_px_y = [&](double v) {
        return margin_top + plot_h - (v - yr.lo) / (yr.hi - yr.lo) * plot_h;
    };

    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='"
        << height << "' viewBox='0 0 " << width << " " << height << "'>\n"
        << "<rect width='100%' height='100%' fill='white'/>\n"
        << "<text x='" << width / 2 << "' y='24' text-anchor='middle' "
        << "font-family='sans-serif' font-size='16'>" << title << "</text>\n"
        << "<rect x='" << margin_left << "' y='" << margin_top << "' width='" << plot_w
        << "' height='" << plot_h << "' fill='none' stroke='#444'/>\n";

    for (int i = 0; i <= 4; ++i) {
        const double fx = xr.lo + (xr.hi - xr.lo) * i / 4.0;
        const double fy = yr.lo + (yr.hi - yr.lo) * i / 4.0;
        const double px = to_px_x(fx);
        const double py = to_px_y(fy);
        svg << "<line x1='" << px << "' y1='" << margin_top + plot_h << "' x2='" << px
            << "' y2='" << margin_top + plot_h + 5 << "' stroke='#444'/>\n"
            << "<text x='" << px << "' y='" << margin_top + plot_h + 20
            << "' text-anchor='middle' font-family='sans-serif' font-size='11'>"
            << detail::trim_number(fx) << "</text>\n"
            << "<line x1='" << margin_left - 5 << "' y1='" << py << "' x2='"
            << margin_left << "' y2='" << py << "' stroke='#444'/>\n"
            << "<text x='" << margin_left - 8 << "' y='" << py + 4
            << "' text-anchor='end' font-family='sans-serif' font-size='11'>"
            << detail::trim_number(fy) << "</text>\n";
    }
    svg << "<text x='" << margin_left + plot_w / 2 << "' y='" << height - 12
        << "' text-anchor='middle' font-family='sans-serif' font-size='13'>" << x_label
        << "</text>\n"
        << "<text x='18' y='" << margin_top + plot_h / 2
        << "' text-anchor='middle' font-family='sans-serif' font-size='13' "
        << "transform='rotate(-90 18 " << margin_top + plot_h / 2 << ")'>" << y_label
        << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = detail::kSeriesColors[s % 6];
        const auto& cur = series[s];
        if (cur.scatter) {
            for (std::size_t i = 0; i < cur.x.size(); ++i) {
                svg << "<circle cx='" << to_px_x(cur.x[i]) << "' cy='"
                    << to_px_y(cur.y[i]) << "' r='4' fill='" << color << "'/>\n";
                if (cur.point_labels) {
                    svg << "<text x='" << to_px_x(cur.x[i]) + 6 << "' y='"
                        << to_px_y(cur.y[i]) - 6
                        << "' font-family='sans-serif' font-size='11'>" << i + 1
                        << "</text>\n";
                }
            }
        } else if (cur.x.size() > 1) {
            svg << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
            for (std::size_t i = 0; i < cur.x.size(); ++i) {
                svg << to_px_x(cur.x[i]) << ',' << to_px_y(cur.y[i]) << ' ';
            }
            svg << "'/>\n";
        }
        const double legend_y = margin_top + 16.0 + 18.0 * static_cast<double>(s);
        svg << "<rect x='" << margin_left + plot_w - 150 << "' y='" << legend_y - 9
            << "' width='12' height='12' fill='" << color << "'/>\n"
            << "<text x='" << margin_left + plot_w - 132 << "' y='" << legend_y + 2
            << "' font-family='sans-serif' font-size='12'>" << cur.label << "</text>\n";
    }
    svg << "</svg>\n";

    write_file(path, svg.str());
}

}  // namespace bldctune
