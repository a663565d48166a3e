#include "qcomb/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "qcomb/errors.hpp"
#include "qcomb/mc_oracle.hpp"
#include "qcomb/svg_plot.hpp"

#ifndef QCOMB_VERSION
#define QCOMB_VERSION "0.0.0"
#endif

namespace qcomb {

namespace {

std::string num(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    return fmt::format("{:.10g}", v);
}

// Keeps error text usable inside a CSV cell.
std::string sanitize(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

}  // namespace

PointResult evaluate_point(const Model &model, const std::optional<WaterSettings> &water) {
    PointResult r;
    r.transmissivity = model.sample.transmissivity(model.line);
    r.lo_transmissivity = model.lo.transmissivity(model.line);
    r.alpha_per_um = model.alpha_per_um;
    r.occupation = model.environment.occupation(model.comb, model.line);
    try {
        r.breakdown = snr_full(model.comb, model.sample, model.lo, model.environment,
                               model.detector, model.line);
        if (water) {
            if (!(model.comb.signal_gain == model.comb.lo_gain)) {
                throw InvalidArgument("absorption-limited advantage needs equal squeezing gains");
            }
            if (model.detector.nep_w_per_rthz != 0.0 || model.detector.rin_per_hz != 0.0) {
                throw InvalidArgument("absorption-limited advantage assumes NEP = RIN = 0");
            }
            if (model.lo.transmissivity(model.line) != 1.0) {
                throw InvalidArgument("absorption-limited advantage assumes a lossless LO path");
            }
            const WaterAdvantage w = water_limited_advantage(
                *water->table, model.comb.wavelength_m() * 1e6,
                model.path_length_um.value_or(water->path_length_um),
                model.comb.signal_gain, model.comb.lo_ratio(), model.environment);
            r.advantage_db = w.advantage_db;
            if (w.zero_transmission) {
                r.status = "zero_transmission";
            }
        } else {
            DualCombConfig classical = model.comb;
            classical.signal_gain = SqueezeGain::none();
            classical.lo_gain = SqueezeGain::none();
            r.advantage_db = quantum_advantage(model.comb, classical, model.sample, model.lo,
                                               model.environment, model.detector, model.line);
        }
    } catch (const std::exception &e) {
        r.ok = false;
        r.error = e.what();
        r.status = sanitize(fmt::format("error: {}", e.what()));
        r.breakdown.snr = std::nan("");
        r.advantage_db = std::nan("");
    }
    return r;
}

SweepResult run_sweep(const RunConfig &config, bool water_mode) {
    const auto &axes = config.axes();
    if (axes.empty()) {
        throw InvalidArgument("no sweep axis declared (set sweep.axis1)");
    }
    SweepResult out;
    out.axes = axes;
    out.water = water_mode;
    const std::size_t inner = axes.size() == 2 ? axes[1].values.size() : 1;
    const std::size_t total = axes[0].values.size() * inner;
    out.rows.resize(total);

    // Building models can throw configuration errors; surface the first one
    // in grid order so the message is deterministic.
    std::vector<std::string> errors(total);
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < total; i = next++) {
            std::vector<std::pair<std::string, double>> point;
            point.emplace_back(axes[0].key, axes[0].values[i / inner]);
            if (axes.size() == 2) {
                point.emplace_back(axes[1].key, axes[1].values[i % inner]);
            }
            try {
                const Model model = config.model_with(point);
                out.rows[i] = evaluate_point(model, water_mode ? config.water()
                                                               : std::optional<WaterSettings>{});
            } catch (const std::exception &e) {
                errors[i] = e.what();
            }
            out.rows[i].axis_values.clear();
            for (const auto &[key, value] : point) {
                out.rows[i].axis_values.push_back(value);
            }
        }
    };
    const std::size_t workers =
        std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::min<std::size_t>(total, 64));
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto &t : pool) {
        t.join();
    }
    for (std::size_t i = 0; i < total; ++i) {
        if (!errors[i].empty()) {
            std::string where;
            for (std::size_t a = 0; a < axes.size(); ++a) {
                where += fmt::format("{}{}={}", a ? ", " : "", axes[a].key,
                                     num(out.rows[i].axis_values[a]));
            }
            throw ConfigError("", fmt::format("at grid point ({}): {}", where, errors[i]));
        }
    }
    return out;
}

void write_csv_header(std::ostream &out, const RunConfig &config, std::string_view command) {
    out << "# qcomb " << QCOMB_VERSION << " " << command << "\n";
    out << "# config_hash: " << config.hash() << "\n";
    out << "# seed: " << config.mc().seed << "\n";
    out << "# rng: " << rng_description() << "\n";
    out << "# units: gain_db = 10 log10 G; snr_db and advantage_db = 10 log10 of amplitude SNR\n";
    for (const auto &line : config.echo()) {
        out << "# config: " << line << "\n";
    }
}

void write_sweep_csv(std::ostream &out, const RunConfig &config, const SweepResult &result,
                     std::string_view command) {
    write_csv_header(out, config, command);
    for (const auto &axis : result.axes) {
        out << axis.key << ",";
    }
    out << "transmissivity,lo_transmissivity,";
    if (result.water) {
        out << "alpha_per_um,";
    }
    out << "occupation,sigma2_nep,sigma2_quad,sigma2_rin,snr,snr_db_10log10_amp,"
           "advantage_db_10log10_amp,dominant,status\n";
    for (const auto &row : result.rows) {
        for (double v : row.axis_values) {
            out << num(v) << ",";
        }
        out << num(row.transmissivity) << "," << num(row.lo_transmissivity) << ",";
        if (result.water) {
            out << (row.alpha_per_um ? num(*row.alpha_per_um) : "nan") << ",";
        }
        const auto &b = row.breakdown;
        out << num(row.occupation) << ",";
        if (row.ok) {
            out << num(b.sigma2_nep) << "," << num(b.sigma2_quad) << "," << num(b.sigma2_rin) << ","
                << num(b.snr) << "," << num(b.snr_db()) << "," << num(row.advantage_db) << ","
                << to_string(b.dominant());
        } else {
            out << "nan,nan,nan,nan,nan,nan,";
        }
        out << "," << row.status << "\n";
    }
}

std::string sweep_svg(const SweepResult &result, std::string_view title) {
    const auto &axes = result.axes;
    if (axes.empty()) {
        return {};
    }
    const auto db = [](const PointResult &r) { return r.ok ? r.breakdown.snr_db() : std::nan(""); };
    if (axes.size() == 1 || axes[0].values.size() <= 8) {
        const auto &x_axis = axes.size() == 1 ? axes[0] : axes[1];
        svg::Axes a{std::string(title), x_axis.key, "SNR [dB, 10 log10 amplitude]",
                    x_axis.spacing == "log"};
        std::vector<svg::Series> series;
        const std::size_t inner = x_axis.values.size();
        const std::size_t outer = axes.size() == 1 ? 1 : axes[0].values.size();
        for (std::size_t i = 0; i < outer; ++i) {
            svg::Series s;
            s.label = axes.size() == 1 ? "SNR" : fmt::format("{} = {}", axes[0].key, num(axes[0].values[i]));
            s.x = x_axis.values;
            for (std::size_t j = 0; j < inner; ++j) {
                s.y.push_back(db(result.rows[i * inner + j]));
            }
            series.push_back(std::move(s));
        }
        return svg::line_plot(a, series);
    }
    std::vector<double> z;
    z.reserve(result.rows.size());
    for (const auto &r : result.rows) {
        z.push_back(r.advantage_db);
    }
    svg::Axes a{std::string(title), axes[0].key, axes[1].key, false};
    return svg::heatmap(a, axes[0].values, axes[1].values, z, "advantage [dB]");
}

}  // namespace qcomb
