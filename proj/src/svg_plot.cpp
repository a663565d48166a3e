#include "qcomb/svg_plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace qcomb::svg {

namespace {

constexpr double kWidth = 720;
constexpr double kHeight = 480;
constexpr double kLeft = 80;
constexpr double kRight = 160;
constexpr double kTop = 40;
constexpr double kBottom = 60;

std::string escape(const std::string &s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '&':
            out += "&amp;";
            break;
        default:
            out += c;
        }
    }
    return out;
}

std::string open(const Axes &axes) {
    std::string s = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
        "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"12\">\n"
        "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        kWidth, kHeight);
    s += fmt::format("<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
                     kLeft + (kWidth - kLeft - kRight) / 2, escape(axes.title));
    s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                     kLeft + (kWidth - kLeft - kRight) / 2, kHeight - 16, escape(axes.x_label));
    s += fmt::format("<text transform=\"translate(20 {}) rotate(-90)\" text-anchor=\"middle\">{}</text>\n",
                     kTop + (kHeight - kTop - kBottom) / 2, escape(axes.y_label));
    return s;
}

std::string tick_label(double v) { return fmt::format("{:.3g}", v); }

// Perceptually ordered colour ramp (dark blue to yellow).
std::string ramp(double t) {
    static constexpr std::array<std::array<double, 3>, 5> stops = {{
        {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
    t = std::clamp(t, 0.0, 1.0) * (stops.size() - 1);
    const auto i = std::min<std::size_t>(static_cast<std::size_t>(t), stops.size() - 2);
    const double f = t - static_cast<double>(i);
    std::array<int, 3> rgb{};
    for (int k = 0; k < 3; ++k) {
        rgb[k] = static_cast<int>(std::lround(stops[i][k] + f * (stops[i + 1][k] - stops[i][k])));
    }
    return fmt::format("#{:02x}{:02x}{:02x}", rgb[0], rgb[1], rgb[2]);
}

const std::array<const char *, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                             "#ff7f0e", "#17becf", "#8c564b", "#7f7f7f"};

}  // namespace

std::string line_plot(const Axes &axes, const std::vector<Series> &series) {
    const auto tx = [&](double x) { return axes.log_x ? std::log10(x) : x; };
    double x0 = std::numeric_limits<double>::infinity();
    double x1 = -x0;
    double y0 = x0;
    double y1 = -x0;
    for (const auto &s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.y[i]) || (axes.log_x && !(s.x[i] > 0.0))) {
                continue;
            }
            x0 = std::min(x0, tx(s.x[i]));
            x1 = std::max(x1, tx(s.x[i]));
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    }
    if (!std::isfinite(x0)) {
        x0 = 0;
        x1 = 1;
        y0 = 0;
        y1 = 1;
    }
    if (x1 == x0) {
        x1 = x0 + 1;
    }
    if (y1 == y0) {
        y1 = y0 + 1;
    }
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    const auto px = [&](double x) { return kLeft + (tx(x) - x0) / (x1 - x0) * pw; };
    const auto py = [&](double y) { return kTop + (1.0 - (y - y0) / (y1 - y0)) * ph; };

    std::string s = open(axes);
    s += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
                     kLeft, kTop, pw, ph);
    for (int k = 0; k <= 4; ++k) {
        const double fx = x0 + (x1 - x0) * k / 4.0;
        const double fy = y0 + (y1 - y0) * k / 4.0;
        const double gx = kLeft + pw * k / 4.0;
        const double gy = kTop + ph * (1.0 - k / 4.0);
        s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", gx,
                         kTop + ph + 16, tick_label(axes.log_x ? std::pow(10.0, fx) : fx));
        s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", kLeft - 6,
                         gy + 4, tick_label(fy));
    }
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto &ser = series[k];
        const char *colour = kPalette[k % kPalette.size()];
        std::string points;
        for (std::size_t i = 0; i < ser.x.size(); ++i) {
            if (std::isfinite(ser.y[i]) && (!axes.log_x || ser.x[i] > 0.0)) {
                points += fmt::format("{:.2f},{:.2f} ", px(ser.x[i]), py(ser.y[i]));
            }
        }
        s += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                         colour, points);
        const double ly = kTop + 16 + 18 * static_cast<double>(k);
        s += fmt::format("<line x1=\"{0}\" x2=\"{1}\" y1=\"{2}\" y2=\"{2}\" stroke=\"{3}\" stroke-width=\"2\"/>\n",
                         kWidth - kRight + 12, kWidth - kRight + 32, ly, colour);
        s += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", kWidth - kRight + 38, ly + 4,
                         escape(ser.label));
    }
    s += "</svg>\n";
    return s;
}

std::string heatmap(const Axes &axes, const std::vector<double> &xs, const std::vector<double> &ys,
                    const std::vector<double> &z, const std::string &z_label) {
    double z0 = std::numeric_limits<double>::infinity();
    double z1 = -z0;
    for (double v : z) {
        if (std::isfinite(v)) {
            z0 = std::min(z0, v);
            z1 = std::max(z1, v);
        }
    }
    if (!std::isfinite(z0)) {
        z0 = 0;
        z1 = 1;
    }
    if (z1 == z0) {
        z1 = z0 + 1;
    }
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    const double cw = pw / static_cast<double>(std::max<std::size_t>(xs.size(), 1));
    const double ch = ph / static_cast<double>(std::max<std::size_t>(ys.size(), 1));

    std::string s = open(axes);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t j = 0; j < ys.size(); ++j) {
            const double v = z[i * ys.size() + j];
            if (!std::isfinite(v)) {
                continue;
            }
            s += fmt::format(
                "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"/>\n",
                kLeft + cw * static_cast<double>(i),
                kTop + ph - ch * static_cast<double>(j + 1), cw + 0.3, ch + 0.3,
                ramp((v - z0) / (z1 - z0)));
        }
    }
    s += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
                     kLeft, kTop, pw, ph);
    const auto ticks = [](const std::vector<double> &v, std::size_t k) {
        return v.empty() ? 0.0 : v[std::min(v.size() - 1, k * (v.size() - 1) / 4)];
    };
    for (std::size_t k = 0; k <= 4; ++k) {
        const double fx = kLeft + cw * (0.5 + static_cast<double>(k * (xs.size() - 1) / 4));
        const double fy = kTop + ph - ch * (0.5 + static_cast<double>(k * (ys.size() - 1) / 4));
        s += fmt::format("<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", fx,
                         kTop + ph + 16, tick_label(ticks(xs, k)));
        s += fmt::format("<text x=\"{}\" y=\"{:.2f}\" text-anchor=\"end\">{}</text>\n", kLeft - 6,
                         fy + 4, tick_label(ticks(ys, k)));
    }
    // Colour bar.
    const double bx = kWidth - kRight + 24;
    for (int k = 0; k < 50; ++k) {
        s += fmt::format("<rect x=\"{}\" y=\"{:.2f}\" width=\"16\" height=\"{:.2f}\" fill=\"{}\"/>\n",
                         bx, kTop + ph * (1.0 - (k + 1) / 50.0), ph / 50.0 + 0.3, ramp(k / 49.0));
    }
    s += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", bx + 22, kTop + 8, tick_label(z1));
    s += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", bx + 22, kTop + ph, tick_label(z0));
    s += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", bx - 4, kTop + ph + 32, escape(z_label));
    s += "</svg>\n";
    return s;
}

}  // namespace qcomb::svg
