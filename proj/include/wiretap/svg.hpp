#pragma once

// Minimal self-contained SVG line/scatter plots for the figure outputs.
// No timestamps or other run-dependent metadata: identical data gives
// byte-identical files.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "wiretap/io.hpp"

namespace wiretap {

class SvgPlot {
public:
    SvgPlot(std::string title, std::string x_label, std::string y_label)
        : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

    void set_x_range(double lo, double hi) { x_lo_ = lo; x_hi_ = hi; fixed_x_ = true; }
    void set_y_range(double lo, double hi) { y_lo_ = lo; y_hi_ = hi; fixed_y_ = true; }

    void add_line(const std::vector<std::pair<double, double>>& pts, const std::string& color,
                  const std::string& name = "") {
        series_.push_back({pts, color, name, Kind::line});
    }
    void add_scatter(const std::vector<std::pair<double, double>>& pts, const std::string& color,
                     const std::string& name = "") {
        series_.push_back({pts, color, name, Kind::scatter});
    }
    /// Vertical stems from y=0, for pmf overlays.
    void add_stems(const std::vector<std::pair<double, double>>& pts, const std::string& color,
                   const std::string& name = "") {
        series_.push_back({pts, color, name, Kind::stems});
    }

    std::string render() const {
        double xlo = x_lo_, xhi = x_hi_, ylo = y_lo_, yhi = y_hi_;
        if (!fixed_x_ || !fixed_y_) {
            double axlo = 1e300, axhi = -1e300, aylo = 1e300, ayhi = -1e300;
            for (const auto& s : series_)
                for (const auto& [x, y] : s.pts) {
                    axlo = std::min(axlo, x);
                    axhi = std::max(axhi, x);
                    aylo = std::min(aylo, y);
                    ayhi = std::max(ayhi, y);
                }
            if (axlo > axhi) { axlo = 0; axhi = 1; aylo = 0; ayhi = 1; }
            if (axlo == axhi) { axlo -= 0.5; axhi += 0.5; }
            if (aylo == ayhi) { aylo -= 0.5; ayhi += 0.5; }
            if (!fixed_x_) { xlo = axlo; xhi = axhi; }
            if (!fixed_y_) {
                const double pad = 0.05 * (ayhi - aylo);
                ylo = aylo - pad;
                yhi = ayhi + pad;
            }
        }
        std::ostringstream out;
        out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
            << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\""
            << height_ << "\" viewBox=\"0 0 " << width_ << " " << height_ << "\">\n"
            << "<rect width=\"" << width_ << "\" height=\"" << height_
            << "\" fill=\"white\"/>\n";
        out << "<text x=\"" << width_ / 2 << "\" y=\"20\" text-anchor=\"middle\" "
            << "font-family=\"sans-serif\" font-size=\"14\">" << title_ << "</text>\n";

        const double pxlo = margin_, pxhi = width_ - margin_;
        const double pylo = height_ - margin_, pyhi = margin_;  // y axis flips
        auto sx = [&](double x) { return pxlo + (x - xlo) / (xhi - xlo) * (pxhi - pxlo); };
        auto sy = [&](double y) { return pylo + (y - ylo) / (yhi - ylo) * (pyhi - pylo); };

        // frame and ticks
        out << "<rect x=\"" << pxlo << "\" y=\"" << pyhi << "\" width=\"" << pxhi - pxlo
            << "\" height=\"" << pylo - pyhi << "\" fill=\"none\" stroke=\"black\"/>\n";
        for (int i = 0; i <= ticks_; ++i) {
            const double fx = xlo + (xhi - xlo) * i / ticks_;
            const double fy = ylo + (yhi - ylo) * i / ticks_;
            out << "<line x1=\"" << sx(fx) << "\" y1=\"" << pylo << "\" x2=\"" << sx(fx)
                << "\" y2=\"" << pylo + 5 << "\" stroke=\"black\"/>\n"
                << "<text x=\"" << sx(fx) << "\" y=\"" << pylo + 18
                << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
                << fmt_num(fx, 4) << "</text>\n";
            out << "<line x1=\"" << pxlo - 5 << "\" y1=\"" << sy(fy) << "\" x2=\"" << pxlo
                << "\" y2=\"" << sy(fy) << "\" stroke=\"black\"/>\n"
                << "<text x=\"" << pxlo - 8 << "\" y=\"" << sy(fy) + 3
                << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
                << fmt_num(fy, 4) << "</text>\n";
        }
        out << "<text x=\"" << width_ / 2 << "\" y=\"" << height_ - 8
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
            << x_label_ << "</text>\n";
        out << "<text x=\"14\" y=\"" << height_ / 2
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
            << "transform=\"rotate(-90 14 " << height_ / 2 << ")\">" << y_label_ << "</text>\n";

        int legend_row = 0;
        for (const auto& s : series_) {
            if (s.kind == Kind::line) {
                out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" points=\"";
                for (const auto& [x, y] : s.pts)
                    out << sx(x) << "," << sy(y) << " ";
                out << "\"/>\n";
            } else if (s.kind == Kind::scatter) {
                for (const auto& [x, y] : s.pts)
                    out << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(y)
                        << "\" r=\"2\" fill=\"" << s.color << "\"/>\n";
            } else {
                for (const auto& [x, y] : s.pts)
                    out << "<line x1=\"" << sx(x) << "\" y1=\"" << sy(0.0) << "\" x2=\"" << sx(x)
                        << "\" y2=\"" << sy(y) << "\" stroke=\"" << s.color
                        << "\" stroke-width=\"2\"/>\n";
            }
            if (!s.name.empty()) {
                const double ly = pyhi + 14 + 14 * legend_row++;
                out << "<line x1=\"" << pxhi - 120 << "\" y1=\"" << ly << "\" x2=\""
                    << pxhi - 100 << "\" y2=\"" << ly << "\" stroke=\"" << s.color
                    << "\" stroke-width=\"2\"/>\n"
                    << "<text x=\"" << pxhi - 95 << "\" y=\"" << ly + 4
                    << "\" font-family=\"sans-serif\" font-size=\"10\">" << s.name
                    << "</text>\n";
            }
        }
        out << "</svg>\n";
        return out.str();
    }

private:
    enum class Kind { line, scatter, stems };
    struct Series {
        std::vector<std::pair<double, double>> pts;
        std::string color;
        std::string name;
        Kind kind;
    };

    std::string title_, x_label_, y_label_;
    std::vector<Series> series_;
    double x_lo_ = 0, x_hi_ = 1, y_lo_ = 0, y_hi_ = 1;
    bool fixed_x_ = false, fixed_y_ = false;
    int width_ = 640, height_ = 480, margin_ = 60, ticks_ = 5;
};

}  // namespace wiretap
