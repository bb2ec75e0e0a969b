/**
 * @file svg.hpp
 * @brief Small deterministic SVG writers: band diagrams, line plots, heatmaps.
 */
#pragma once

#include "bands.hpp"
#include "geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <tuple>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace shamrock {

namespace svg_detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string escape(const std::string& s) {
    std::string o;
    for (char c : s) {
        switch (c) {
            case '<': o += "&lt;"; break;
            case '>': o += "&gt;"; break;
            case '&': o += "&amp;"; break;
            default: o += c;
        }
    }
    return o;
}

inline const char* palette(std::size_t i) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};
    return colors[i % 8];
}

inline void save(const std::string& text, const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + file.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + file.string());
}

}  // namespace svg_detail

/// Axes frame mapping data coordinates to a fixed pixel box.
class PlotFrame {
public:
    PlotFrame(double x0, double x1, double y0, double y1, double width = 640, double height = 480)
        : x0_(x0), x1_(x1), y0_(y0), y1_(y1), w_(width), h_(height) {
        if (!(x1 > x0) || !(y1 > y0)) throw std::invalid_argument("empty plot range");
    }

    [[nodiscard]] double px(double x) const { return kLeft + (x - x0_) / (x1_ - x0_) * (w_ - kLeft - kRight); }
    [[nodiscard]] double py(double y) const { return h_ - kBottom - (y - y0_) / (y1_ - y0_) * (h_ - kTop - kBottom); }

    void rect(double xa, double xb, double ya, double yb, const std::string& fill, double opacity) {
        body_ << "<rect x=\"" << svg_detail::num(px(xa)) << "\" y=\"" << svg_detail::num(py(yb)) << "\" width=\""
              << svg_detail::num(px(xb) - px(xa)) << "\" height=\"" << svg_detail::num(py(ya) - py(yb)) << "\" fill=\""
              << fill << "\" fill-opacity=\"" << svg_detail::num(opacity) << "\"/>\n";
    }

    void polyline(const std::vector<double>& xs, const std::vector<double>& ys, const std::string& color, double width = 1.5,
                  const std::string& dash = "") {
        body_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << svg_detail::num(width) << "\"";
        if (!dash.empty()) body_ << " stroke-dasharray=\"" << dash << "\"";
        body_ << " points=\"";
        for (std::size_t i = 0; i < xs.size(); ++i) body_ << svg_detail::num(px(xs[i])) << ',' << svg_detail::num(py(ys[i])) << ' ';
        body_ << "\"/>\n";
    }

    void polygon(const std::vector<double>& xs, const std::vector<double>& ys, const std::string& fill, double opacity) {
        body_ << "<polygon fill=\"" << fill << "\" fill-opacity=\"" << svg_detail::num(opacity) << "\" points=\"";
        for (std::size_t i = 0; i < xs.size(); ++i) body_ << svg_detail::num(px(xs[i])) << ',' << svg_detail::num(py(ys[i])) << ' ';
        body_ << "\"/>\n";
    }

    void marker(double x, double y, const std::string& color, double r = 2.0) {
        body_ << "<circle cx=\"" << svg_detail::num(px(x)) << "\" cy=\"" << svg_detail::num(py(y)) << "\" r=\"" << svg_detail::num(r)
              << "\" fill=\"" << color << "\"/>\n";
    }

    void text(double xpix, double ypix, const std::string& s, const std::string& anchor = "middle", int size = 12) {
        body_ << "<text x=\"" << svg_detail::num(xpix) << "\" y=\"" << svg_detail::num(ypix) << "\" font-size=\"" << size
              << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor << "\">" << svg_detail::escape(s) << "</text>\n";
    }

    void vline(double x, const std::string& color = "#999") {
        body_ << "<line x1=\"" << svg_detail::num(px(x)) << "\" y1=\"" << svg_detail::num(py(y0_)) << "\" x2=\"" << svg_detail::num(px(x))
              << "\" y2=\"" << svg_detail::num(py(y1_)) << "\" stroke=\"" << color << "\" stroke-width=\"0.8\"/>\n";
    }

    /// Frame, y ticks and axis labels. x ticks are supplied as (position, label).
    void axes(const std::string& xlabel, const std::string& ylabel, const std::vector<std::pair<double, std::string>>& xticks,
              int n_yticks = 5) {
        body_ << "<rect x=\"" << svg_detail::num(px(x0_)) << "\" y=\"" << svg_detail::num(py(y1_)) << "\" width=\""
              << svg_detail::num(px(x1_) - px(x0_)) << "\" height=\"" << svg_detail::num(py(y0_) - py(y1_))
              << "\" fill=\"none\" stroke=\"black\"/>\n";
        for (int i = 0; i <= n_yticks; ++i) {
            const double y = y0_ + (y1_ - y0_) * i / n_yticks;
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.3g", y);
            text(px(x0_) - 6, py(y) + 4, buf, "end", 11);
        }
        for (const auto& [x, label] : xticks) text(px(x), py(y0_) + 16, label, "middle", 11);
        text(0.5 * (px(x0_) + px(x1_)), h_ - 8, xlabel);
        body_ << "<text x=\"16\" y=\"" << svg_detail::num(0.5 * (py(y0_) + py(y1_))) << "\" font-size=\"12\" font-family=\"sans-serif\" "
              << "text-anchor=\"middle\" transform=\"rotate(-90 16 " << svg_detail::num(0.5 * (py(y0_) + py(y1_))) << ")\">"
              << svg_detail::escape(ylabel) << "</text>\n";
    }

    [[nodiscard]] std::string str(const std::string& title = "") const {
        std::ostringstream s;
        s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << svg_detail::num(w_) << "\" height=\"" << svg_detail::num(h_)
          << "\" viewBox=\"0 0 " << svg_detail::num(w_) << ' ' << svg_detail::num(h_) << "\">\n"
          << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        if (!title.empty())
            s << "<text x=\"" << svg_detail::num(0.5 * w_) << "\" y=\"18\" font-size=\"14\" font-family=\"sans-serif\" text-anchor=\"middle\">"
              << svg_detail::escape(title) << "</text>\n";
        s << body_.str() << "</svg>\n";
        return s.str();
    }

    static constexpr double kLeft = 64, kRight = 16, kTop = 28, kBottom = 40;

private:
    double x0_, x1_, y0_, y1_, w_, h_;
    std::ostringstream body_;
};

/// Bands vs path length with shaded light cone (when present) and gap bands.
inline std::string band_diagram_svg(const BandStructure& bs, const GapReport* gaps, const std::string& title) {
    if (bs.frequencies.empty()) throw std::invalid_argument("empty band structure");
    const auto& samples = bs.kpath.samples;
    const double xmax = std::max(samples.back().path_length, 1e-12);
    double ymax = 0.0;
    std::size_t nb = bs.frequencies.front().size();
    for (const auto& row : bs.frequencies) {
        nb = std::min(nb, row.size());
        for (double f : row) ymax = std::max(ymax, f);
    }
    ymax *= 1.05;
    PlotFrame pf(0.0, xmax, 0.0, ymax);
    if (!bs.light_line.empty()) {
        std::vector<double> xs, ys;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            xs.push_back(samples[i].path_length);
            ys.push_back(std::min(bs.light_line[i], ymax));
        }
        xs.push_back(xmax);
        ys.push_back(ymax);
        xs.push_back(0.0);
        ys.push_back(ymax);
        pf.polygon(xs, ys, "#bbbbbb", 0.5);
    }
    if (gaps)
        for (const auto& g : gaps->gaps) pf.rect(0.0, xmax, g.lower, std::min(g.upper, ymax), "#f4d03f", 0.45);
    std::vector<std::pair<double, std::string>> ticks;
    for (const auto& s : samples)
        if (!s.label.empty()) {
            pf.vline(s.path_length);
            ticks.emplace_back(s.path_length, s.label == "G" ? "Γ" : s.label);
        }
    std::vector<double> xs;
    for (const auto& s : samples) xs.push_back(s.path_length);
    for (std::size_t b = 0; b < nb; ++b) {
        std::vector<double> ys;
        for (const auto& row : bs.frequencies) ys.push_back(row[b]);
        pf.polyline(xs, ys, "#1f3a93", 1.2);
    }
    pf.axes("wavevector", bs.polarization == Polarization::elastic ? "ωa/2πc_t" : "ωa/2πc", ticks);
    return pf.str(title);
}

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool markers = false;
};

inline std::string line_plot_svg(const std::vector<Series>& series, const std::string& title, const std::string& xlabel,
                                 const std::string& ylabel, std::optional<std::pair<double, double>> yrange = std::nullopt) {
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    if (x0 > x1) throw std::invalid_argument("nothing to plot");
    if (yrange) std::tie(y0, y1) = *yrange;
    if (!(y1 > y0)) y1 = y0 + 1.0;
    if (!(x1 > x0)) x1 = x0 + 1.0;
    PlotFrame pf(x0, x1, y0, y1);
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        if (s.markers)
            for (std::size_t i = 0; i < s.x.size(); ++i) pf.marker(s.x[i], s.y[i], svg_detail::palette(k));
        else
            pf.polyline(s.x, s.y, svg_detail::palette(k));
        pf.text(PlotFrame::kLeft + 12, PlotFrame::kTop + 16 + 14.0 * k, "- " + s.label, "start", 11);
    }
    char a[32], b[32];
    std::snprintf(a, sizeof a, "%.3g", x0);
    std::snprintf(b, sizeof b, "%.3g", x1);
    pf.axes(xlabel, ylabel, {{x0, a}, {x1, b}});
    return pf.str(title);
}

/**
 * @brief Heatmap of a field sampled on grid nodes (i / n1) A1 + (j / n2) A2.
 *
 * Each sample is drawn as its parallelogram pixel; the picture size follows
 * the bounding box of the supercell so the aspect ratio is preserved.
 */
inline std::string heatmap_svg(const std::vector<double>& values, int n1, int n2, Vec2 A1, Vec2 A2, double px_per_a = 40.0) {
    if (values.size() != static_cast<std::size_t>(n1) * static_cast<std::size_t>(n2))
        throw std::invalid_argument("heatmap grid size mismatch");
    const double xs[] = {0.0, A1.x, A2.x, A1.x + A2.x};
    const double ys[] = {0.0, A1.y, A2.y, A1.y + A2.y};
    const double xmin = *std::min_element(xs, xs + 4), xmax = *std::max_element(xs, xs + 4);
    const double ymin = *std::min_element(ys, ys + 4), ymax = *std::max_element(ys, ys + 4);
    const double W = (xmax - xmin) * px_per_a, H = (ymax - ymin) * px_per_a;
    const double vmax = std::max(*std::max_element(values.begin(), values.end()), 1e-300);
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << svg_detail::num(W) << "\" height=\"" << svg_detail::num(H)
      << "\" viewBox=\"0 0 " << svg_detail::num(W) << ' ' << svg_detail::num(H) << "\" shape-rendering=\"crispEdges\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"black\"/>\n";
    const Vec2 d1 = (1.0 / n1) * A1, d2 = (1.0 / n2) * A2;
    auto P = [&](Vec2 r) { return svg_detail::num((r.x - xmin) * px_per_a) + "," + svg_detail::num((ymax - r.y) * px_per_a); };
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) {
            const double t = std::clamp(values[static_cast<std::size_t>(i) * n2 + j] / vmax, 0.0, 1.0);
            if (t < 1e-3) continue;
            // black - red - yellow - white ramp
            const int r = static_cast<int>(std::round(255 * std::min(1.0, 3 * t)));
            const int g = static_cast<int>(std::round(255 * std::clamp(3 * t - 1, 0.0, 1.0)));
            const int b = static_cast<int>(std::round(255 * std::clamp(3 * t - 2, 0.0, 1.0)));
            char col[8];
            std::snprintf(col, sizeof col, "#%02x%02x%02x", r, g, b);
            const Vec2 o = (i - 0.5) * d1 + (j - 0.5) * d2;
            s << "<polygon fill=\"" << col << "\" points=\"" << P(o) << ' ' << P(o + d1) << ' ' << P(o + d1 + d2) << ' ' << P(o + d2)
              << "\"/>\n";
        }
    s << "</svg>\n";
    return s.str();
}

inline void write_svg(const std::string& text, const std::filesystem::path& file) { svg_detail::save(text, file); }

}  // namespace shamrock
