#include "nnma/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "nnma/branch_io.hpp"

namespace nnma {

namespace {

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void grow(double v) {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    void pad() {
        if (!(hi > lo)) {
            lo -= 1.0;
            hi += 1.0;
        }
        const double m = 0.05 * (hi - lo);
        lo -= m;
        hi += m;
    }
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace

void SvgPlot::write(const std::string& path) const {
    const double ml = 70, mr = 20, mt = title.empty() ? 20 : 40, mb = 50;
    Range rx, ry;
    for (const auto& s : series) {
        for (double v : s.x) rx.grow(v);
        for (double v : s.y) ry.grow(v);
    }
    if (!std::isfinite(rx.lo) || !std::isfinite(ry.lo))
        throw std::runtime_error(path + ": nothing to plot");
    rx.pad();
    ry.pad();

    auto px = [&](double v) { return ml + (v - rx.lo) / (rx.hi - rx.lo) * (width - ml - mr); };
    auto py = [&](double v) { return height - mb - (v - ry.lo) / (ry.hi - ry.lo) * (height - mt - mb); };

    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!title.empty())
        out << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
            << title << "</text>\n";

    // Axes with 6 ticks per direction.
    out << "<g stroke=\"#444444\" stroke-width=\"1\" fill=\"none\">\n";
    out << "<path d=\"M" << ml << " " << mt << " L" << ml << " " << height - mb << " L"
        << width - mr << " " << height - mb << "\"/>\n</g>\n";
    out << "<g font-size=\"11\" fill=\"#333333\">\n";
    for (int k = 0; k <= 5; ++k) {
        const double xv = rx.lo + (rx.hi - rx.lo) * k / 5.0;
        const double yv = ry.lo + (ry.hi - ry.lo) * k / 5.0;
        out << "<line x1=\"" << px(xv) << "\" y1=\"" << height - mb << "\" x2=\"" << px(xv)
            << "\" y2=\"" << height - mb + 4 << "\" stroke=\"#444444\"/>\n";
        out << "<text x=\"" << px(xv) << "\" y=\"" << height - mb + 16
            << "\" text-anchor=\"middle\">" << num(xv) << "</text>\n";
        out << "<line x1=\"" << ml - 4 << "\" y1=\"" << py(yv) << "\" x2=\"" << ml << "\" y2=\""
            << py(yv) << "\" stroke=\"#444444\"/>\n";
        out << "<text x=\"" << ml - 7 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">"
            << num(yv) << "</text>\n";
    }
    out << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-size=\"13\">" << x_label << "</text>\n";
    out << "<text x=\"16\" y=\"" << (mt + height - mb) / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
        << (mt + height - mb) / 2 << ")\">" << y_label << "</text>\n";
    out << "</g>\n";

    double legend_y = mt + 14;
    for (const auto& s : series) {
        if (s.scatter) {
            out << "<g fill=\"" << s.color << "\">\n";
            for (size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
                out << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i])
                    << "\" r=\"" << 2.0 * s.width << "\"/>\n";
            out << "</g>\n";
        } else {
            out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\""
                << s.width << "\"";
            if (s.dashed) out << " stroke-dasharray=\"6 4\"";
            out << " points=\"";
            for (size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
                out << px(s.x[i]) << "," << py(s.y[i]) << " ";
            out << "\"/>\n";
        }
        if (!s.label.empty()) {
            out << "<line x1=\"" << width - mr - 150 << "\" y1=\"" << legend_y << "\" x2=\""
                << width - mr - 120 << "\" y2=\"" << legend_y << "\" stroke=\"" << s.color
                << "\" stroke-width=\"2\"" << (s.dashed ? " stroke-dasharray=\"6 4\"" : "")
                << "/>\n";
            out << "<text x=\"" << width - mr - 114 << "\" y=\"" << legend_y + 4
                << "\" font-size=\"12\">" << s.label << "</text>\n";
            legend_y += 16;
        }
    }
    out << "</svg>\n";
    if (!out) throw std::runtime_error(path + ": write failed");
}

std::string phase_error_color(double magnitude, double saturation) {
    if (!(magnitude < saturation)) return "#000000";
    const double t = std::clamp(magnitude / saturation, 0.0, 1.0);
    const int r = static_cast<int>(std::lround(40 + 215 * t));
    const int g = static_cast<int>(std::lround(70 * (1.0 - t)));
    const int b = static_cast<int>(std::lround(220 * (1.0 - t) + 30 * t));
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
}

}  // namespace nnma
