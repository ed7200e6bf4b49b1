#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

namespace kta {

// Minimal SVG 1.1 polyline chart: shared axes, optional log2 x scale,
// one colored polyline per series, legend in the top-right corner.
class LinePlot {
public:
    LinePlot(std::string title, std::string x_label, std::string y_label)
        : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

    void set_log2_x(bool on) { log2_x_ = on; }

    void add_series(std::string name, std::vector<double> xs, std::vector<double> ys) {
        series_.push_back({std::move(name), std::move(xs), std::move(ys)});
    }

    std::string render() const {
        constexpr double kW = 640, kH = 440;
        constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
        const double plot_w = kW - kLeft - kRight;
        const double plot_h = kH - kTop - kBottom;

        double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
        double y_min = x_min, y_max = -x_min;
        for (const auto& s : series_) {
            for (std::size_t i = 0; i < s.xs.size(); ++i) {
                const double x = scale_x(s.xs[i]);
                if (!std::isfinite(x) || !std::isfinite(s.ys[i]))
                    continue;
                x_min = std::min(x_min, x);
                x_max = std::max(x_max, x);
                y_min = std::min(y_min, s.ys[i]);
                y_max = std::max(y_max, s.ys[i]);
            }
        }
        if (!(x_min <= x_max)) { x_min = 0; x_max = 1; }
        if (!(y_min <= y_max)) { y_min = 0; y_max = 1; }
        if (x_max - x_min < 1e-12) { x_min -= 0.5; x_max += 0.5; }
        if (y_max - y_min < 1e-12) { y_min -= 0.5; y_max += 0.5; }

        auto px = [&](double x) { return kLeft + (scale_x(x) - x_min) / (x_max - x_min) * plot_w; };
        auto py = [&](double y) { return kTop + (y_max - y) / (y_max - y_min) * plot_h; };

        std::string out;
        out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + fmt(kW) +
               "\" height=\"" + fmt(kH) + "\" viewBox=\"0 0 " + fmt(kW) + " " + fmt(kH) + "\">\n";
        out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        out += "<text x=\"" + fmt(kW / 2) + "\" y=\"24\" text-anchor=\"middle\" "
               "font-family=\"sans-serif\" font-size=\"16\">" + title_ + "</text>\n";

        // axes
        out += line(kLeft, kTop, kLeft, kTop + plot_h, "#333", 1.0);
        out += line(kLeft, kTop + plot_h, kLeft + plot_w, kTop + plot_h, "#333", 1.0);

        constexpr int kTicks = 5;
        for (int i = 0; i <= kTicks; ++i) {
            const double fx = x_min + (x_max - x_min) * i / kTicks;
            const double gx = kLeft + plot_w * i / kTicks;
            out += line(gx, kTop + plot_h, gx, kTop + plot_h + 5, "#333", 1.0);
            out += "<text x=\"" + fmt(gx) + "\" y=\"" + fmt(kTop + plot_h + 20) +
                   "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
                   fmt(unscale_x(fx)) + "</text>\n";

            const double fy = y_min + (y_max - y_min) * i / kTicks;
            const double gy = py(fy);
            out += line(kLeft - 5, gy, kLeft, gy, "#333", 1.0);
            out += "<text x=\"" + fmt(kLeft - 9) + "\" y=\"" + fmt(gy + 4) +
                   "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + fmt(fy) +
                   "</text>\n";
        }
        out += "<text x=\"" + fmt(kLeft + plot_w / 2) + "\" y=\"" + fmt(kH - 10) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" + x_label_ +
               (log2_x_ ? " (log scale)" : "") + "</text>\n";
        out += "<text x=\"18\" y=\"" + fmt(kTop + plot_h / 2) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
               "transform=\"rotate(-90 18 " + fmt(kTop + plot_h / 2) + ")\">" + y_label_ + "</text>\n";

        static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                         "#ff7f0e", "#9467bd", "#8c564b"};
        constexpr std::size_t kPaletteSize = 6;
        for (std::size_t s = 0; s < series_.size(); ++s) {
            const auto& ser = series_[s];
            const char* color = kPalette[s % kPaletteSize];
            std::string points;
            for (std::size_t i = 0; i < ser.xs.size(); ++i) {
                if (!std::isfinite(ser.xs[i]) || !std::isfinite(ser.ys[i]))
                    continue;
                points += fmt(px(ser.xs[i])) + "," + fmt(py(ser.ys[i])) + " ";
            }
            if (points.empty())
                continue;
            out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
                   "\" stroke-width=\"1.8\" points=\"" + points + "\"/>\n";
            // legend entry
            const double ly = kTop + 14 + 16 * static_cast<double>(s);
            out += line(kLeft + plot_w - 120, ly - 4, kLeft + plot_w - 100, ly - 4, color, 2.0);
            out += "<text x=\"" + fmt(kLeft + plot_w - 94) + "\" y=\"" + fmt(ly) +
                   "\" font-family=\"sans-serif\" font-size=\"12\">" + ser.name + "</text>\n";
        }
        out += "</svg>\n";
        return out;
    }

private:
    struct Series {
        std::string name;
        std::vector<double> xs, ys;
    };

    double scale_x(double x) const { return log2_x_ ? std::log2(std::max(x, 1e-300)) : x; }
    double unscale_x(double x) const { return log2_x_ ? std::exp2(x) : x; }

    static std::string fmt(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4g", v);
        return buf;
    }

    static std::string line(double x1, double y1, double x2, double y2, const std::string& color,
                            double width) {
        return "<line x1=\"" + fmt(x1) + "\" y1=\"" + fmt(y1) + "\" x2=\"" + fmt(x2) + "\" y2=\"" +
               fmt(y2) + "\" stroke=\"" + color + "\" stroke-width=\"" + fmt(width) + "\"/>\n";
    }

    std::string title_, x_label_, y_label_;
    bool log2_x_ = false;
    std::vector<Series> series_;
};

}  // namespace kta
