#pragma once

// Run configuration: INI-style key/value text, named presets and the mapping
// from keys onto the physical model.
//
// Effective values are layered preset -> file -> command-line overrides. Keys
// are addressed as "section.key"; an override with an empty value removes the
// key. See README for the full key reference.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qcomb/dualcomb.hpp"
#include "qcomb/noise_budget.hpp"
#include "qcomb/spectra.hpp"

namespace qcomb {

/// Invalid configuration; `field()` names the offending key when known.
class ConfigError : public std::runtime_error {
  public:
    ConfigError(std::string field, const std::string &message);
    const std::string &field() const noexcept { return field_; }

  private:
    std::string field_;
};

using KeyValues = std::map<std::string, std::string>;

/// Parses INI text ("[section]" headers, "key = value", ';' or '#' comments).
/// A "preset" key before the first section selects a base preset.
KeyValues parse_config(std::istream &in, const std::string &source = "<config>");
KeyValues load_config(const std::filesystem::path &path);

std::vector<std::string> preset_names();
/// Throws ConfigError for unknown names.
KeyValues preset(std::string_view name);

/// Applies `overrides` on top of `base`; empty override values erase keys.
void layer(KeyValues &base, const KeyValues &overrides);

/// Parses "section.key=value".
std::pair<std::string, std::string> parse_assignment(std::string_view text);

struct SweepAxis {
    std::string key;
    std::string spacing;  // lin, log or list
    std::vector<double> values;
};

/// Physical model at one parameter point.
struct Model {
    DualCombConfig comb;
    SampleResponse sample;
    LOPath lo;
    Environment environment;
    DetectorModel detector;
    std::size_t line = 1;
    // Set when the sample transmissivity comes from an absorption table.
    std::optional<double> alpha_per_um;
    std::optional<double> path_length_um;
};

struct WaterSettings {
    std::shared_ptr<const AbsorptionTable> table;
    double path_length_um = 15.0;
};

struct McSettings {
    std::uint64_t seed = 42;
    std::size_t samples = 100000;
    std::size_t crb_samples = 10000;
    std::size_t time_domain_samples = 20000;
    double tolerance_sigmas = 3.0;
    double analytic_scale = 1.0;
};

class RunConfig {
  public:
    /// Validates every key and builds the base model; throws ConfigError.
    explicit RunConfig(KeyValues values);

    const KeyValues &values() const { return values_; }
    const Model &model() const { return model_; }
    const std::vector<SweepAxis> &axes() const { return axes_; }
    const std::optional<WaterSettings> &water() const { return water_; }
    const McSettings &mc() const { return mc_; }
    double power_min_w() const { return power_min_w_; }
    double power_max_w() const { return power_max_w_; }
    const std::optional<std::string> &output_path() const { return output_path_; }
    bool plot() const { return plot_; }

    /// Model with the given numeric keys replaced (sweep grid points).
    Model model_with(const std::vector<std::pair<std::string, double>> &overrides) const;

    /// Fingerprint of the effective values, output.* keys excluded.
    std::string hash() const;
    /// "section.key = value" lines of the effective values, output.* excluded.
    std::vector<std::string> echo() const;

  private:
    Model build(const KeyValues &values) const;

    KeyValues values_;
    Model model_;
    std::vector<SweepAxis> axes_;
    std::optional<WaterSettings> water_;
    McSettings mc_;
    double power_min_w_ = 1e-7;
    double power_max_w_ = 1e-1;
    std::optional<std::string> output_path_;
    bool plot_ = false;
};

/// Parses an axis declaration "<key> lin|log <start> <stop> <count>" or
/// "<key> list <v1> <v2> ...".
SweepAxis parse_axis(std::string_view text, const std::string &field);

/// Keys accepted in config files, with a one-line description each.
const std::map<std::string, std::string> &known_keys();

}  // namespace qcomb
