#include "relnewt/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "relnewt/errors.hpp"

namespace relnewt {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void appendf(std::string& s, const char* fmt, ...) {
    char buf[256];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    s += buf;
}

// pixel coordinates carry two decimals, plenty below a hairline
std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

struct Frame {
    double x0, y0, x1, y1;  // data window
    double w, h;            // pixel size
    double margin;

    double X(double x) const { return margin + (x - x0) / (x1 - x0) * (w - 2 * margin); }
    double Y(double y) const { return h - margin - (y - y0) / (y1 - y0) * (h - 2 * margin); }
};

std::string open_svg(double w, double h) {
    std::string s;
    appendf(&s == nullptr ? s : s, "");  // silence unused warning paths
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + px(w) + "\" height=\"" +
         px(h) + "\" viewBox=\"0 0 " + px(w) + " " + px(h) + "\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    return s;
}

void close_svg(std::string& s) { s += "</svg>\n"; }

void polyline(std::string& s, const std::vector<double>& xs, const std::vector<double>& ys,
              const char* color, double stroke, const char* dash = nullptr) {
    s += "<polyline fill=\"none\" stroke=\"";
    s += color;
    appendf(s, "\" stroke-width=\"%.2f\"", stroke);
    if (dash) {
        s += " stroke-dasharray=\"";
        s += dash;
        s += "\"";
    }
    s += " points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) s += ' ';
        s += px(xs[i]) + "," + px(ys[i]);
    }
    s += "\"/>\n";
}

void axes_box(std::string& s, const Frame& fr) {
    appendf(s,
            "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" "
            "fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n",
            fr.margin, fr.margin, fr.w - 2 * fr.margin, fr.h - 2 * fr.margin);
}

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b"};

// blue through white to red, t in [-1, 1]
std::string diverging(double t) {
    t = std::clamp(t, -1.0, 1.0);
    double lo[3] = {59, 76, 192}, mid[3] = {245, 245, 245}, hi[3] = {180, 4, 38};
    double rgb[3];
    for (int k = 0; k < 3; ++k)
        rgb[k] = t < 0 ? mid[k] + (-t) * (lo[k] - mid[k]) : mid[k] + t * (hi[k] - mid[k]);
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(rgb[0])),
                  static_cast<int>(std::lround(rgb[1])), static_cast<int>(std::lround(rgb[2])));
    return buf;
}

} // namespace

std::string plot_trajectories(const ConvexDomain& domain,
                              const std::vector<std::vector<Vec>>& curves, int width) {
    if (domain.dim() != 2) throw ConfigError("trajectory plots are two dimensional");
    for (const auto& c : curves)
        for (const Vec& p : c)
            if (p.dim() != 2 || !std::isfinite(p[0]) || !std::isfinite(p[1]))
                throw ConfigError("curve samples must be finite plane points");

    double x0 = domain.center()[0] - domain.radii()[0];
    double x1 = domain.center()[0] + domain.radii()[0];
    double y0 = domain.center()[1] - domain.radii()[1];
    double y1 = domain.center()[1] + domain.radii()[1];
    for (const auto& c : curves)
        for (const Vec& p : c) {
            x0 = std::min(x0, p[0]);
            x1 = std::max(x1, p[0]);
            y0 = std::min(y0, p[1]);
            y1 = std::max(y1, p[1]);
        }
    double pad = 0.05 * std::max(x1 - x0, y1 - y0);
    x0 -= pad, x1 += pad, y0 -= pad, y1 += pad;

    // equal scale on both axes so circles stay round
    double w = width;
    double h = w * (y1 - y0) / (x1 - x0);
    Frame fr{x0, y0, x1, y1, w, h, 10.0};

    std::string s = open_svg(w, h);
    double sx = (fr.w - 2 * fr.margin) / (x1 - x0);
    double sy = (fr.h - 2 * fr.margin) / (y1 - y0);
    appendf(s,
            "<ellipse cx=\"%.2f\" cy=\"%.2f\" rx=\"%.2f\" ry=\"%.2f\" "
            "fill=\"none\" stroke=\"#333333\" stroke-width=\"1.5\"/>\n",
            fr.X(domain.center()[0]), fr.Y(domain.center()[1]), domain.radii()[0] * sx,
            domain.radii()[1] * sy);
    int ci = 0;
    for (const auto& c : curves) {
        if (c.empty()) continue;
        std::vector<double> xs(c.size()), ys(c.size());
        for (std::size_t i = 0; i < c.size(); ++i) {
            xs[i] = fr.X(c[i][0]);
            ys[i] = fr.Y(c[i][1]);
        }
        const char* color = kPalette[ci++ % (sizeof kPalette / sizeof *kPalette)];
        polyline(s, xs, ys, color, 1.5);
        appendf(s, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"%s\"/>\n", xs.front(),
                ys.front(), color);
        appendf(s, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"none\" stroke=\"%s\"/>\n",
                xs.back(), ys.back(), color);
    }
    close_svg(s);
    return s;
}

std::string plot_winding(const std::vector<double>& theta, const std::vector<double>& angle,
                         int width) {
    if (theta.size() != angle.size() || theta.size() < 2)
        throw ConfigError("winding plot needs matching sweeps of at least two samples");

    std::vector<double> u(angle.size());
    u[0] = angle[0];
    for (std::size_t i = 1; i < angle.size(); ++i)
        u[i] = u[i - 1] + std::remainder(angle[i] - angle[i - 1], kTwoPi);

    double x0 = theta.front(), x1 = theta.back();
    double y0 = *std::min_element(u.begin(), u.end());
    double y1 = *std::max_element(u.begin(), u.end());
    // the degree one reference line shares the window
    y0 = std::min(y0, u[0]);
    y1 = std::max(y1, u[0] + (x1 - x0));
    double pad = 0.05 * std::max(x1 - x0, y1 - y0);

    double w = width, h = 0.75 * width;
    Frame fr{x0 - pad, y0 - pad, x1 + pad, y1 + pad, w, h, 28.0};

    std::string s = open_svg(w, h);
    axes_box(s, fr);
    std::vector<double> rx = {fr.X(x0), fr.X(x1)};
    std::vector<double> ry = {fr.Y(u[0]), fr.Y(u[0] + (x1 - x0))};
    polyline(s, rx, ry, "#999999", 1.0, "6 4");
    std::vector<double> xs(theta.size()), ys(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        xs[i] = fr.X(theta[i]);
        ys[i] = fr.Y(u[i]);
    }
    polyline(s, xs, ys, kPalette[0], 1.5);
    appendf(s,
            "<text x=\"%.2f\" y=\"%.2f\" font-size=\"12\" fill=\"#333333\">"
            "turn %.6f</text>\n",
            fr.margin + 4, fr.margin - 8, (u.back() - u.front()) / kTwoPi);
    close_svg(s);
    return s;
}

std::string plot_heatmap(int n_rows, int n_cols, const std::vector<double>& values,
                         int width) {
    if (n_rows < 1 || n_cols < 1 ||
        values.size() != static_cast<std::size_t>(n_rows) * static_cast<std::size_t>(n_cols))
        throw ConfigError("heatmap needs a full n_rows by n_cols matrix");

    double vmax = 0.0;
    for (double v : values)
        if (std::isfinite(v)) vmax = std::max(vmax, std::fabs(v));
    if (vmax == 0.0) vmax = 1.0;

    double w = width, h = width;
    Frame fr{0, 0, 1, 1, w, h, 10.0};
    double cw = (w - 2 * fr.margin) / n_cols;
    double ch = (h - 2 * fr.margin) / n_rows;

    std::string s = open_svg(w, h);
    for (int i = 0; i < n_rows; ++i)
        for (int j = 0; j < n_cols; ++j) {
            double v = values[static_cast<std::size_t>(i) * n_cols + j];
            // rows run upward so the origin cell sits bottom left
            double x = fr.margin + j * cw;
            double y = h - fr.margin - (i + 1) * ch;
            std::string fill = std::isfinite(v) ? diverging(v / vmax) : "#dddddd";
            appendf(s,
                    "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" "
                    "fill=\"%s\"/>\n",
                    x, y, cw + 0.05, ch + 0.05, fill.c_str());
        }
    axes_box(s, fr);
    appendf(s,
            "<text x=\"%.2f\" y=\"%.2f\" font-size=\"12\" fill=\"#333333\">"
            "max |value| %.6g</text>\n",
            fr.margin + 4, h - 2, vmax);
    close_svg(s);
    return s;
}

void save_svg(const std::string& path, const std::string& svg) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << svg;
}

} // namespace relnewt
