#pragma once

// Grid evaluation of the noise budget over one or two configuration axes.

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qcomb/config.hpp"
#include "qcomb/noise_budget.hpp"

namespace qcomb {

struct PointResult {
    std::vector<double> axis_values;
    double transmissivity = 1.0;
    double lo_transmissivity = 1.0;
    std::optional<double> alpha_per_um;
    double occupation = 0.0;
    NoiseBreakdown breakdown;
    double advantage_db = 0.0;  // 10 log10(SNR_quantum / SNR_classical)
    bool ok = true;
    std::string status = "ok";
    std::string error;  // exception text when !ok
};

/// Evaluates one model. The classical reference replaces both squeezing
/// gains by 1 and keeps everything else. With `water` set the advantage is
/// taken from water_limited_advantage (equal gains, noiseless detector).
PointResult evaluate_point(const Model &model, const std::optional<WaterSettings> &water = {});

struct SweepResult {
    std::vector<SweepAxis> axes;
    std::vector<PointResult> rows;  // row-major, first axis outermost
    bool water = false;
};

/// Evaluates every grid point in parallel; row order is deterministic.
/// Throws InvalidArgument when the configuration declares no sweep axis.
SweepResult run_sweep(const RunConfig &config, bool water_mode = false);

/// Provenance header lines ("# ...") shared by every CSV the tool writes.
void write_csv_header(std::ostream &out, const RunConfig &config, std::string_view command);

void write_sweep_csv(std::ostream &out, const RunConfig &config, const SweepResult &result,
                     std::string_view command);

/// SVG rendering: a line plot of SNR when the outer axis has at most eight
/// values (one curve per value), otherwise a heatmap of the advantage.
std::string sweep_svg(const SweepResult &result, std::string_view title);

}  // namespace qcomb
