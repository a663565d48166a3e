#pragma once

// Absorption tables and the absorption-limited quantum advantage.
//
// Table files are two-column CSV with header `wavelength_um,alpha_per_<unit>`
// where <unit> is um, cm or m. Blank lines and lines starting with '#' are
// ignored. Coefficients are Lambert (base e) absorption coefficients and are
// stored internally per micrometre.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qcomb/dualcomb.hpp"

namespace qcomb {

enum class AbsorptionUnit { per_um, per_cm, per_m };

std::string_view to_string(AbsorptionUnit unit);
/// Accepts "per_um", "per_cm", "per_m"; throws InvalidArgument otherwise.
AbsorptionUnit parse_absorption_unit(std::string_view text);
/// Factor converting a coefficient in `unit` to 1/um.
double to_per_um(AbsorptionUnit unit);

class AbsorptionTable {
  public:
    /// Validates: at least two rows, strictly increasing wavelengths, alpha >= 0.
    AbsorptionTable(std::vector<double> wavelengths_um, std::vector<double> alpha_per_um,
                    AbsorptionUnit source_unit = AbsorptionUnit::per_um, std::string source = {});

    std::size_t size() const { return wavelengths_.size(); }
    const std::vector<double> &wavelengths_um() const { return wavelengths_; }
    const std::vector<double> &alphas_per_um() const { return alphas_; }
    AbsorptionUnit source_unit() const { return unit_; }
    const std::string &source() const { return source_; }
    double min_wavelength_um() const { return wavelengths_.front(); }
    double max_wavelength_um() const { return wavelengths_.back(); }

    /// Linearly interpolated coefficient; ExtrapolationError outside the table.
    double alpha_per_um(double wavelength_um) const;

  private:
    std::vector<double> wavelengths_;
    std::vector<double> alphas_;
    AbsorptionUnit unit_;
    std::string source_;
};

/// Parses a table from a stream. When `unit` is given it must agree with the
/// unit named in the header. Errors carry the 1-based line number.
AbsorptionTable parse_absorption_table(std::istream &in, std::optional<AbsorptionUnit> unit = {},
                                       const std::string &source = "<stream>");

AbsorptionTable load_absorption_table(const std::filesystem::path &path,
                                      std::optional<AbsorptionUnit> unit = {});

/// Path of the bundled pure-water table (per cm).
std::filesystem::path bundled_water_table();

/// kappa = exp(-alpha(lambda) L).
double transmissivity(const AbsorptionTable &table, double wavelength_um, double path_length_um);

struct WaterAdvantage {
    double advantage_db = 0.0;  // 10 log10 of the amplitude-SNR ratio
    double transmissivity = 0.0;
    double occupation = 0.0;
    bool zero_transmission = false;  // kappa == 0; advantage reported as 0 dB
};

/// Quantum advantage with both combs squeezed by `gain`, the sample path
/// attenuated by the table, the LO path lossless and matched phase. The
/// thermal occupation is evaluated at c / lambda from env.temperature_k unless
/// env.uniform_occupation overrides it.
WaterAdvantage water_limited_advantage(const AbsorptionTable &table, double wavelength_um,
                                       double path_length_um, SqueezeGain gain, double gamma,
                                       const Environment &env);

}  // namespace qcomb
