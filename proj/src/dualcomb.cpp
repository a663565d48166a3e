#include "qcomb/dualcomb.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "qcomb/constants.hpp"
#include "qcomb/errors.hpp"

namespace qcomb {

namespace {

constexpr double kMinLinearizedPhotons = 1e3;

void check_line(const DualCombConfig &cfg, std::size_t line) {
    if (line < 1 || line > cfg.lines) {
        throw InvalidArgument(fmt::format("line index {} outside [1, {}]", line, cfg.lines));
    }
}

double profile_weight(const std::vector<double> &profile, std::size_t lines, std::size_t line) {
    if (profile.empty()) {
        return 1.0;
    }
    const double total = std::accumulate(profile.begin(), profile.end(), 0.0);
    return profile[line - 1] * static_cast<double>(lines) / total;
}

void check_profile(const std::vector<double> &profile, std::size_t lines, const char *name) {
    if (profile.empty()) {
        return;
    }
    if (profile.size() != lines) {
        throw InvalidArgument(
            fmt::format("{} has {} entries but the comb has {} lines", name, profile.size(), lines));
    }
    double total = 0.0;
    for (double w : profile) {
        if (!(w >= 0.0)) {
            throw InvalidArgument(fmt::format("{} weights must be non-negative", name));
        }
        total += w;
    }
    if (!(total > 0.0)) {
        throw InvalidArgument(fmt::format("{} weights sum to zero", name));
    }
}

double pick(const std::vector<double> &values, std::size_t line) {
    return values.size() == 1 ? values.front() : values.at(line - 1);
}

}  // namespace

double DualCombConfig::carrier_from_wavelength(double wavelength_m) {
    if (!(wavelength_m > 0.0)) {
        throw InvalidArgument(fmt::format("wavelength must be positive, got {}", wavelength_m));
    }
    return constants::speed_of_light / wavelength_m;
}

double DualCombConfig::wavelength_m() const { return constants::speed_of_light / carrier_hz; }

double DualCombConfig::photon_energy_j() const { return constants::planck * carrier_hz; }

double DualCombConfig::lo_ratio() const { return lo_power_w / signal_power_w; }

double DualCombConfig::signal_photons(std::size_t line) const {
    check_line(*this, line);
    return profile_weight(signal_profile, lines, line) * photons_per_line(signal_power_w, *this);
}

double DualCombConfig::lo_photons(std::size_t line) const {
    check_line(*this, line);
    return profile_weight(lo_profile, lines, line) * photons_per_line(lo_power_w, *this);
}

void DualCombConfig::check() const {
    if (lines == 0) {
        throw InvalidArgument("comb needs at least one line");
    }
    if (!(rep_rate_hz > 0.0) || !(rep_offset_hz > 0.0)) {
        throw InvalidArgument("repetition rate and repetition-rate offset must be positive");
    }
    if (!(rep_offset_hz / rep_rate_hz < 1e-2)) {
        throw InvalidArgument(fmt::format(
            "repetition-rate offset {} Hz is not small against the repetition rate {} Hz "
            "(need df_r / f_r < 1e-2)",
            rep_offset_hz, rep_rate_hz));
    }
    if (!(acquisition_s > 0.0)) {
        throw InvalidArgument("acquisition time must be positive");
    }
    if (!(rep_rate_hz > 1.0 / acquisition_s)) {
        throw InvalidArgument(fmt::format(
            "repetition rate {} Hz must exceed 1/T = {} Hz to avoid aliasing", rep_rate_hz,
            1.0 / acquisition_s));
    }
    if (!(static_cast<double>(lines) * rep_offset_hz < rep_rate_hz / 2.0)) {
        throw InvalidArgument(fmt::format(
            "{} lines at offset {} Hz overlap the sidebands of adjacent teeth (need N df_r < f_r/2)",
            lines, rep_offset_hz));
    }
    if (!(carrier_hz > 0.0)) {
        throw InvalidArgument("carrier frequency must be positive");
    }
    if (!(signal_power_w >= 0.0) || !(lo_power_w >= 0.0)) {
        throw InvalidArgument("comb powers must be non-negative");
    }
    check_profile(signal_profile, lines, "signal profile");
    check_profile(lo_profile, lines, "LO profile");
}

std::vector<std::string> DualCombConfig::warnings() const {
    std::vector<std::string> out;
    const auto report = [&](const char *which, double photons) {
        if (photons > 0.0 && photons < kMinLinearizedPhotons) {
            out.push_back(fmt::format(
                "{} comb carries only {:.3g} photons per line; the linearized noise model "
                "assumes >> 1",
                which, photons));
        }
    };
    const auto min_weight = [this](const std::vector<double> &profile) {
        if (profile.empty()) {
            return 1.0;
        }
        const double total = std::accumulate(profile.begin(), profile.end(), 0.0);
        return *std::min_element(profile.begin(), profile.end()) * static_cast<double>(lines) / total;
    };
    const double min_signal = min_weight(signal_profile) * photons_per_line(signal_power_w, *this);
    const double min_lo = min_weight(lo_profile) * photons_per_line(lo_power_w, *this);
    report("signal", min_signal);
    report("LO", min_lo);
    return out;
}

LineChannel::LineChannel(double transmissivity, double phase_rad)
    : LineChannel(std::vector<double>{transmissivity}, std::vector<double>{phase_rad}) {}

LineChannel::LineChannel(std::vector<double> transmissivity, std::vector<double> phase_rad)
    : transmissivity_(std::move(transmissivity)), phase_(std::move(phase_rad)) {
    if (transmissivity_.empty() || phase_.empty()) {
        throw InvalidArgument("line channel needs at least one transmissivity and one phase");
    }
    for (double t : transmissivity_) {
        if (!(t >= 0.0 && t <= 1.0)) {
            throw InvalidArgument(fmt::format("transmissivity must lie in [0, 1], got {}", t));
        }
    }
    for (double p : phase_) {
        if (!std::isfinite(p)) {
            throw InvalidArgument("phase must be finite");
        }
    }
}

double LineChannel::transmissivity(std::size_t line) const { return pick(transmissivity_, line); }

double LineChannel::phase(std::size_t line) const { return pick(phase_, line); }

void LineChannel::check(std::size_t lines) const {
    for (const auto *v : {&transmissivity_, &phase_}) {
        if (v->size() != 1 && v->size() != lines) {
            throw InvalidArgument(fmt::format(
                "per-line channel has {} entries but the comb has {} lines", v->size(), lines));
        }
    }
}

double Environment::occupation(const DualCombConfig &cfg, std::size_t line) const {
    if (uniform_occupation) {
        return *uniform_occupation;
    }
    return thermal_occupation(line_frequency(cfg, line), *this);
}

double line_frequency(const DualCombConfig &cfg, std::size_t line) {
    return cfg.carrier_hz + static_cast<double>(line) * cfg.rep_rate_hz;
}

double photons_per_line(double power_w, const DualCombConfig &cfg) {
    return power_w * cfg.acquisition_s / (static_cast<double>(cfg.lines) * cfg.photon_energy_j());
}

double thermal_occupation(double frequency_hz, const Environment &env) {
    if (!(frequency_hz > 0.0)) {
        throw InvalidArgument(fmt::format("frequency must be positive, got {}", frequency_hz));
    }
    if (!(env.temperature_k >= 0.0)) {
        throw InvalidArgument(fmt::format("temperature must be >= 0 K, got {}", env.temperature_k));
    }
    if (env.temperature_k == 0.0) {
        return 0.0;
    }
    const double x = constants::planck * frequency_hz / (constants::boltzmann * env.temperature_k);
    return 1.0 / std::expm1(x);
}

std::complex<double> mean_ac_spectrum(const DualCombConfig &cfg, const SampleResponse &sample,
                                      const LOPath &lo, std::size_t m) {
    cfg.check();
    check_line(cfg, m);
    sample.check(cfg.lines);
    lo.check(cfg.lines);
    const double amp = std::sqrt(sample.transmissivity(m) * lo.transmissivity(m) *
                                 cfg.signal_photons(m) * cfg.lo_photons(m));
    return std::polar(amp, sample.phase(m) - lo.phase(m));
}

namespace {

double line_noise(const DualCombConfig &cfg, const SampleResponse &sample, const LOPath &lo,
                  const Environment &env, std::size_t n, double a2, double b2) {
    const double kappa = sample.transmissivity(n);
    const double eta = lo.transmissivity(n);
    const double theta = sample.phase(n) - lo.phase(n);
    const double thermal = 2.0 * env.occupation(cfg, n) + 1.0;

    const double environment = thermal * (eta * b2 * (1.0 - kappa) + kappa * a2 * (1.0 - eta));
    if (eta * kappa == 0.0) {
        return environment;
    }
    // Q_nm carries the opposite phase; the variance is even in theta.
    const double quadrature = eta * kappa *
                              (b2 * joint_quadrature_variance(cfg.signal_gain, theta) +
                               a2 * joint_quadrature_variance(cfg.lo_gain, -theta));
    return environment + quadrature;
}

}  // namespace

double ac_noise_variance(const DualCombConfig &cfg, const SampleResponse &sample, const LOPath &lo,
                         const Environment &env, std::size_t m) {
    cfg.check();
    check_line(cfg, m);
    sample.check(cfg.lines);
    lo.check(cfg.lines);

    // Lines contribute identically when nothing varies across them.
    const bool uniform_occupation = env.uniform_occupation || env.temperature_k == 0.0;
    if (cfg.symmetric() && sample.uniform() && lo.uniform() && uniform_occupation) {
        return static_cast<double>(cfg.lines) *
               line_noise(cfg, sample, lo, env, 1, cfg.signal_photons(1), cfg.lo_photons(1));
    }
    const auto n_lines = static_cast<double>(cfg.lines);
    const double a2_mean = photons_per_line(cfg.signal_power_w, cfg);
    const double b2_mean = photons_per_line(cfg.lo_power_w, cfg);
    const double a_total = cfg.signal_profile.empty()
                               ? n_lines
                               : std::accumulate(cfg.signal_profile.begin(), cfg.signal_profile.end(), 0.0);
    const double b_total = cfg.lo_profile.empty()
                               ? n_lines
                               : std::accumulate(cfg.lo_profile.begin(), cfg.lo_profile.end(), 0.0);
    double total = 0.0;
    for (std::size_t n = 1; n <= cfg.lines; ++n) {
        const double wa = cfg.signal_profile.empty() ? 1.0 : cfg.signal_profile[n - 1] * n_lines / a_total;
        const double wb = cfg.lo_profile.empty() ? 1.0 : cfg.lo_profile[n - 1] * n_lines / b_total;
        total += line_noise(cfg, sample, lo, env, n, wa * a2_mean, wb * b2_mean);
    }
    return total;
}

double snr_fundamental(const DualCombConfig &cfg, const SampleResponse &sample, const LOPath &lo,
                       const Environment &env, std::size_t m) {
    const double variance = ac_noise_variance(cfg, sample, lo, env, m);
    if (!(variance > 0.0)) {
        throw DegenerateModel("readout noise variance vanishes; SNR is undefined");
    }
    return std::abs(mean_ac_spectrum(cfg, sample, lo, m)) / std::sqrt(variance);
}

}  // namespace qcomb
