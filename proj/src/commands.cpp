#include "qcomb/commands.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "qcomb/errors.hpp"
#include "qcomb/mc_oracle.hpp"
#include "qcomb/sweep.hpp"

namespace qcomb {

namespace {

std::string num(double v) { return fmt::format("{:.10g}", v); }

std::ofstream open_output(const std::string &path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw ConfigError("output.path", fmt::format("cannot write '{}'", path));
    }
    return f;
}

std::string svg_path(const std::string &csv_path) {
    const auto dot = csv_path.rfind('.');
    const auto slash = csv_path.find_last_of("/\\");
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) {
        return csv_path.substr(0, dot) + ".svg";
    }
    return csv_path + ".svg";
}

}  // namespace

RunConfig resolve_config(const CommandOptions &options) {
    KeyValues file;
    if (options.config_path) {
        file = load_config(*options.config_path);
    }
    std::optional<std::string> base = options.preset;
    if (auto it = file.find("preset"); it != file.end()) {
        if (base && *base != it->second) {
            throw ConfigError("preset", fmt::format("--preset {} conflicts with preset = {} in {}",
                                                    *base, it->second, *options.config_path));
        }
        base = it->second;
        file.erase(it);
    }
    if (!base && options.command == "water") {
        base = "fig5";
    }

    KeyValues values = base ? preset(*base) : KeyValues{};
    layer(values, file);
    KeyValues overrides;
    for (const auto &text : options.assignments) {
        const auto [key, value] = parse_assignment(text);
        overrides[key] = value;
    }
    if (options.seed) {
        overrides["mc.seed"] = std::to_string(*options.seed);
    }
    if (options.out) {
        overrides["output.path"] = *options.out;
    }
    if (options.plot) {
        overrides["output.plot"] = "true";
    }
    if (options.absorption) {
        overrides["water.absorption"] = *options.absorption;
    }
    layer(values, overrides);
    values.erase("preset");

    RunConfig config(std::move(values));
    if (config.plot() && !config.output_path()) {
        throw ConfigError("--plot", "requires an output path (--out)");
    }
    return config;
}

int cmd_snr(const RunConfig &config, std::ostream &out) {
    const Model &m = config.model();
    const PointResult p = evaluate_point(m);
    if (!p.ok) {
        throw DegenerateModel(p.error);
    }
    DualCombConfig classical = m.comb;
    classical.signal_gain = SqueezeGain::none();
    classical.lo_gain = SqueezeGain::none();
    const PowerOptimum best =
        max_advantage_over_power(m.comb, classical, m.sample, m.lo, m.environment, m.detector,
                                 m.line, config.power_min_w(), config.power_max_w());
    const auto &b = p.breakdown;

    out << fmt::format("config hash        {}\n", config.hash());
    out << fmt::format("line m             {}\n", m.line);
    out << fmt::format("sigma2_nep         {}\n", num(b.sigma2_nep));
    out << fmt::format("sigma2_quad        {}\n", num(b.sigma2_quad));
    out << fmt::format("sigma2_rin         {}\n", num(b.sigma2_rin));
    out << fmt::format("snr (amplitude)    {}\n", num(b.snr));
    out << fmt::format("snr [dB]           {:.4f}\n", b.snr_db());
    out << fmt::format("dominant           {}\n", to_string(b.dominant()));
    out << fmt::format("advantage [dB]     {:.4f}  (vs unsqueezed combs, same powers)\n",
                       p.advantage_db);
    out << fmt::format("max advantage [dB] {:.4f}  at P_S = {:.4g} W in [{:.3g}, {:.3g}] W\n",
                       best.advantage_db, best.signal_power_w, config.power_min_w(),
                       config.power_max_w());
    out << "\n";

    std::ostringstream csv;
    csv << "sigma2_nep,sigma2_quad,sigma2_rin,snr,snr_db_10log10_amp,dominant,"
           "advantage_db_10log10_amp,max_advantage_db_10log10_amp,max_advantage_signal_power_w\n";
    csv << num(b.sigma2_nep) << "," << num(b.sigma2_quad) << "," << num(b.sigma2_rin) << ","
        << num(b.snr) << "," << num(b.snr_db()) << "," << to_string(b.dominant()) << ","
        << num(p.advantage_db) << "," << num(best.advantage_db) << "," << num(best.signal_power_w)
        << "\n";
    out << csv.str();
    if (config.output_path()) {
        auto f = open_output(*config.output_path());
        write_csv_header(f, config, "snr");
        f << csv.str();
    }
    return kExitOk;
}

int cmd_sweep(const RunConfig &config, std::ostream &out, bool water_mode) {
    if (water_mode && !config.water()) {
        throw ConfigError("water.absorption", "the water command needs an absorption table");
    }
    const SweepResult result = run_sweep(config, water_mode);
    const char *command = water_mode ? "water" : "sweep";
    if (config.output_path()) {
        auto f = open_output(*config.output_path());
        write_sweep_csv(f, config, result, command);
        if (config.plot()) {
            auto svg = open_output(svg_path(*config.output_path()));
            svg << sweep_svg(result, fmt::format("qcomb {} {}", command, config.hash()));
        }
        std::size_t failed = 0;
        for (const auto &r : result.rows) {
            failed += r.ok ? 0 : 1;
        }
        out << fmt::format("wrote {} rows to {} ({} points with errors)\n", result.rows.size(),
                           *config.output_path(), failed);
    } else {
        write_sweep_csv(out, config, result, command);
    }
    return kExitOk;
}

int cmd_mc_verify(const RunConfig &config, std::ostream &out) {
    SuiteOptions options;
    options.seed = config.mc().seed;
    options.n_samples = config.mc().samples;
    options.crb_samples = config.mc().crb_samples;
    options.time_domain_samples = config.mc().time_domain_samples;
    options.tolerance_sigmas = config.mc().tolerance_sigmas;
    options.analytic_scale = config.mc().analytic_scale;
    const auto rows = run_verification_suite(options);

    std::size_t passed = 0;
    for (const auto &r : rows) {
        passed += r.pass ? 1 : 0;
    }
    std::ostringstream csv;
    write_csv_header(csv, config, "mc-verify");
    write_report_csv(csv, rows);
    csv << fmt::format("# summary: {}/{} checks passed\n", passed, rows.size());

    if (config.output_path()) {
        auto f = open_output(*config.output_path());
        f << csv.str();
        for (const auto &r : rows) {
            if (!r.pass) {
                out << "FAILED " << r.check << "\n";
            }
        }
        out << fmt::format("{}/{} checks passed\n", passed, rows.size());
    } else {
        out << csv.str();
    }
    return passed == rows.size() ? kExitOk : kExitCheckFailed;
}

int run_command(const CommandOptions &options, std::ostream &out, std::ostream &err) {
    try {
        const RunConfig config = resolve_config(options);
        if (options.command == "snr") {
            return cmd_snr(config, out);
        }
        if (options.command == "sweep") {
            return cmd_sweep(config, out, false);
        }
        if (options.command == "water") {
            return cmd_sweep(config, out, true);
        }
        if (options.command == "mc-verify") {
            return cmd_mc_verify(config, out);
        }
        err << "error: unknown command '" << options.command << "'\n";
        return kExitUsage;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
    }
    return kExitUsage;
}

}  // namespace qcomb
