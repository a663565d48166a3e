// qcomb: noise budgets, parameter sweeps and Monte-Carlo checks for
// squeezed-light dual-comb spectroscopy.

#include <iostream>

#include <CLI11.hpp>

#include "qcomb/commands.hpp"
#include "qcomb/config.hpp"

int main(int argc, char **argv) {
    CLI::App app{"Quantum-limited dual-comb spectroscopy noise model"};
    app.set_version_flag("--version", QCOMB_VERSION);
    app.require_subcommand(1);

    qcomb::CommandOptions options;
    const auto add_common = [&](CLI::App *sub) {
        sub->add_option("--config", options.config_path, "INI configuration file")
            ->check(CLI::ExistingFile);
        sub->add_option("--preset", options.preset, "base preset: fig1c, fig3, fig4, fig5");
        sub->add_option("--set", options.assignments, "override section.key=value (repeatable)")
            ->take_last()
            ->allow_extra_args(false);
        sub->add_option("--out", options.out, "CSV output path");
        sub->add_flag("--plot", options.plot, "also write an SVG next to the CSV");
        sub->add_option("--seed", options.seed, "random seed");
    };

    auto *snr = app.add_subcommand("snr", "noise budget and SNR at one parameter point");
    auto *sweep = app.add_subcommand("sweep", "evaluate a one- or two-axis parameter grid");
    auto *mc = app.add_subcommand("mc-verify", "Monte-Carlo verification suite");
    auto *water = app.add_subcommand("water", "absorption-limited advantage map (fig5 preset)");
    for (auto *sub : {snr, sweep, mc, water}) {
        add_common(sub);
    }
    water->add_option("--absorption", options.absorption,
                      "absorption table CSV (default: bundled water table)");
    app.footer("Exit codes: 0 success, 1 failed verification, 2 usage or config error.");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : qcomb::kExitUsage;
    }
    options.command = app.get_subcommands().front()->get_name();
    return qcomb::run_command(options, std::cout, std::cerr);
}
