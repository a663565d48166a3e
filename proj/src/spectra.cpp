#include "qcomb/spectra.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>

#include <fmt/format.h>

#include "qcomb/constants.hpp"
#include "qcomb/errors.hpp"

#ifndef QCOMB_DATA_DIR
#define QCOMB_DATA_DIR "data"
#endif

namespace qcomb {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view text, double &out) {
    const std::string s(trim(text));
    if (s.empty()) {
        return false;
    }
    char *end = nullptr;
    errno = 0;
    out = std::strtod(s.c_str(), &end);
    return errno == 0 && end == s.c_str() + s.size() && std::isfinite(out);
}

}  // namespace

std::string_view to_string(AbsorptionUnit unit) {
    switch (unit) {
    case AbsorptionUnit::per_um:
        return "per_um";
    case AbsorptionUnit::per_cm:
        return "per_cm";
    case AbsorptionUnit::per_m:
        return "per_m";
    }
    return "?";
}

AbsorptionUnit parse_absorption_unit(std::string_view text) {
    for (auto unit : {AbsorptionUnit::per_um, AbsorptionUnit::per_cm, AbsorptionUnit::per_m}) {
        if (text == to_string(unit)) {
            return unit;
        }
    }
    throw InvalidArgument(
        fmt::format("unknown absorption unit '{}' (expected per_um, per_cm or per_m)", text));
}

double to_per_um(AbsorptionUnit unit) {
    switch (unit) {
    case AbsorptionUnit::per_um:
        return 1.0;
    case AbsorptionUnit::per_cm:
        return 1e-4;
    case AbsorptionUnit::per_m:
        return 1e-6;
    }
    return 1.0;
}

AbsorptionTable::AbsorptionTable(std::vector<double> wavelengths_um,
                                 std::vector<double> alpha_per_um, AbsorptionUnit source_unit,
                                 std::string source)
    : wavelengths_(std::move(wavelengths_um)), alphas_(std::move(alpha_per_um)),
      unit_(source_unit), source_(std::move(source)) {
    if (wavelengths_.size() != alphas_.size()) {
        throw InvalidArgument("absorption table columns differ in length");
    }
    if (wavelengths_.size() < 2) {
        throw InvalidArgument("absorption table needs at least two rows");
    }
    for (std::size_t i = 0; i < wavelengths_.size(); ++i) {
        if (!(wavelengths_[i] > 0.0) || !std::isfinite(wavelengths_[i])) {
            throw InvalidArgument(fmt::format("row {}: wavelength must be positive", i + 1));
        }
        if (!(alphas_[i] >= 0.0) || !std::isfinite(alphas_[i])) {
            throw InvalidArgument(fmt::format("row {}: absorption must be >= 0", i + 1));
        }
        if (i > 0 && !(wavelengths_[i] > wavelengths_[i - 1])) {
            throw InvalidArgument(
                fmt::format("row {}: wavelengths must be strictly increasing", i + 1));
        }
    }
}

double AbsorptionTable::alpha_per_um(double wavelength_um) const {
    if (!(wavelength_um >= wavelengths_.front() && wavelength_um <= wavelengths_.back())) {
        throw ExtrapolationError(fmt::format("wavelength {} um outside table range [{}, {}] um",
                                             wavelength_um, wavelengths_.front(),
                                             wavelengths_.back()));
    }
    const auto hi = std::lower_bound(wavelengths_.begin(), wavelengths_.end(), wavelength_um);
    const auto j = static_cast<std::size_t>(hi - wavelengths_.begin());
    if (wavelengths_[j] == wavelength_um) {
        return alphas_[j];
    }
    const double t = (wavelength_um - wavelengths_[j - 1]) / (wavelengths_[j] - wavelengths_[j - 1]);
    return alphas_[j - 1] + t * (alphas_[j] - alphas_[j - 1]);
}

AbsorptionTable parse_absorption_table(std::istream &in, std::optional<AbsorptionUnit> unit,
                                       const std::string &source) {
    std::vector<double> wl;
    std::vector<double> alpha;
    std::optional<AbsorptionUnit> header_unit;
    std::size_t header_line = 0;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::string_view text = trim(line);
        if (text.empty() || text.front() == '#') {
            continue;
        }
        if (!header_unit) {
            constexpr std::string_view prefix = "wavelength_um,alpha_";
            if (text.substr(0, prefix.size()) != prefix) {
                throw ParseError(fmt::format("{}:{}: expected header 'wavelength_um,alpha_per_um' "
                                             "(or alpha_per_cm / alpha_per_m), got '{}'",
                                             source, number, text),
                                 number);
            }
            try {
                header_unit = parse_absorption_unit(text.substr(prefix.size()));
            } catch (const InvalidArgument &e) {
                throw ParseError(fmt::format("{}:{}: {}", source, number, e.what()), number);
            }
            if (unit && *unit != *header_unit) {
                throw ParseError(fmt::format("{}:{}: header declares {} but {} was requested",
                                             source, number, to_string(*header_unit),
                                             to_string(*unit)),
                                 number);
            }
            header_line = number;
            continue;
        }
        const auto comma = text.find(',');
        double w = 0.0;
        double a = 0.0;
        if (comma == std::string_view::npos || text.find(',', comma + 1) != std::string_view::npos ||
            !parse_double(text.substr(0, comma), w) || !parse_double(text.substr(comma + 1), a)) {
            throw ParseError(
                fmt::format("{}:{}: malformed row '{}' (expected two numbers)", source, number, text),
                number);
        }
        if (!(w > 0.0)) {
            throw ParseError(fmt::format("{}:{}: wavelength must be positive", source, number),
                             number);
        }
        if (a < 0.0) {
            throw ParseError(fmt::format("{}:{}: negative absorption {}", source, number, a), number);
        }
        if (!wl.empty() && !(w > wl.back())) {
            throw ParseError(fmt::format("{}:{}: wavelength {} not greater than previous {}", source,
                                         number, w, wl.back()),
                             number);
        }
        wl.push_back(w);
        alpha.push_back(a * to_per_um(*header_unit));
    }
    if (!header_unit) {
        throw ParseError(fmt::format("{}: missing header", source), 0);
    }
    if (wl.size() < 2) {
        throw ParseError(fmt::format("{}: need at least two data rows", source), header_line);
    }
    return {std::move(wl), std::move(alpha), *header_unit, source};
}

AbsorptionTable load_absorption_table(const std::filesystem::path &path,
                                      std::optional<AbsorptionUnit> unit) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError(fmt::format("cannot open absorption table '{}'", path.string()), 0);
    }
    return parse_absorption_table(in, unit, path.string());
}

std::filesystem::path bundled_water_table() {
    if (const char *dir = std::getenv("QCOMB_DATA_DIR")) {
        return std::filesystem::path(dir) / "water_absorption.csv";
    }
    return std::filesystem::path(QCOMB_DATA_DIR) / "water_absorption.csv";
}

double transmissivity(const AbsorptionTable &table, double wavelength_um, double path_length_um) {
    if (!(path_length_um >= 0.0)) {
        throw InvalidArgument("path length must be >= 0");
    }
    const double alpha = table.alpha_per_um(wavelength_um);
    return path_length_um == 0.0 ? 1.0 : std::exp(-alpha * path_length_um);
}

WaterAdvantage water_limited_advantage(const AbsorptionTable &table, double wavelength_um,
                                       double path_length_um, SqueezeGain gain, double gamma,
                                       const Environment &env) {
    if (!(gamma > 0.0)) {
        throw InvalidArgument("LO/signal power ratio must be > 0");
    }
    WaterAdvantage out;
    out.transmissivity = transmissivity(table, wavelength_um, path_length_um);

    DualCombConfig classical;
    classical.carrier_hz = DualCombConfig::carrier_from_wavelength(wavelength_um * 1e-6);
    classical.lo_power_w = gamma * classical.signal_power_w;
    DualCombConfig quantum = classical;
    quantum.signal_gain = gain;
    quantum.lo_gain = gain;

    Environment at_carrier = env;
    if (!at_carrier.uniform_occupation) {
        at_carrier.uniform_occupation = thermal_occupation(classical.carrier_hz, env);
    }
    out.occupation = *at_carrier.uniform_occupation;

    if (out.transmissivity == 0.0) {
        out.zero_transmission = true;
        return out;
    }
    const SampleResponse sample(out.transmissivity, 0.0);
    const LOPath lo(1.0, 0.0);
    const double snr_q = snr_fundamental(quantum, sample, lo, at_carrier, 1);
    const double snr_c = snr_fundamental(classical, sample, lo, at_carrier, 1);
    out.advantage_db = 10.0 * std::log10(snr_q / snr_c);
    return out;
}

}  // namespace qcomb
