#pragma once

// Minimal self-contained SVG charts.

#include <string>
#include <vector>

namespace qcomb::svg {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct Axes {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
};

std::string line_plot(const Axes &axes, const std::vector<Series> &series);

/// `z[i * ys.size() + j]` is the value at (xs[i], ys[j]); NaN cells are left blank.
/// Cells are laid out by index, so log-spaced grids render evenly.
std::string heatmap(const Axes &axes, const std::vector<double> &xs, const std::vector<double> &ys,
                    const std::vector<double> &z, const std::string &z_label);

}  // namespace qcomb::svg
