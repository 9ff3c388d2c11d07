#pragma once

#include <string>
#include <vector>

namespace nnma {

/// One polyline or scatter series in data coordinates.
struct SvgSeries {
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#000000";
    bool dashed = false;
    bool scatter = false;
    double width = 1.5;
    std::string label;
};

/// Minimal static line/scatter plot with axes and tick labels.
struct SvgPlot {
    int width = 860;
    int height = 560;
    std::string x_label;
    std::string y_label;
    std::string title;
    std::vector<SvgSeries> series;

    void write(const std::string& path) const;
};

/// Color ramp for phase-error maps: small values blue, large red, values at
/// or beyond the saturation threshold black.
std::string phase_error_color(double magnitude, double saturation);

}  // namespace nnma
