#pragma once

// Sub-command implementations behind the `qcomb` executable. Each returns the
// process exit code: 0 success, 1 failed verification, 2 usage or config error.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qcomb/config.hpp"

namespace qcomb {

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitUsage = 2 };

struct CommandOptions {
    std::string command;  // snr, sweep, mc-verify, water
    std::optional<std::string> config_path;
    std::optional<std::string> preset;
    std::vector<std::string> assignments;  // "section.key=value"
    std::optional<std::string> out;
    bool plot = false;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> absorption;
};

/// Layers preset, file and overrides into a validated RunConfig.
RunConfig resolve_config(const CommandOptions &options);

int cmd_snr(const RunConfig &config, std::ostream &out);
int cmd_sweep(const RunConfig &config, std::ostream &out, bool water_mode = false);
int cmd_mc_verify(const RunConfig &config, std::ostream &out);

/// Resolves the configuration and dispatches; errors are reported on `err`.
int run_command(const CommandOptions &options, std::ostream &out, std::ostream &err);

}  // namespace qcomb
