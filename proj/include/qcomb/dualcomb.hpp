#pragma once

// Dual-comb heterodyne model: comb configuration, per-line sample and LO
// channels, the mean AC spectrum at each intermediate frequency m*df_r and the
// linearized readout noise variance at that frequency.
//
// Comb lines and intermediate-frequency bins are 1-based (1 <= n, m <= N).

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qcomb/gaussian.hpp"

namespace qcomb {

struct DualCombConfig {
    std::size_t lines = 1;
    double rep_rate_hz = 1e8;
    double rep_offset_hz = 100.0;
    double carrier_hz = 2.99792458e14;  // 1 um
    double acquisition_s = 1.0;
    double signal_power_w = 1e-4;
    double lo_power_w = 5e-4;
    SqueezeGain signal_gain;
    SqueezeGain lo_gain;
    // Optional relative per-line power weights. Empty means symmetric lines;
    // otherwise length `lines`, non-negative, rescaled to sum to `lines`.
    std::vector<double> signal_profile;
    std::vector<double> lo_profile;

    static double carrier_from_wavelength(double wavelength_m);
    double wavelength_m() const;

    /// h * nu_0.
    double photon_energy_j() const;

    /// gamma = P_LO / P_S.
    double lo_ratio() const;

    bool symmetric() const { return signal_profile.empty() && lo_profile.empty(); }

    /// |A_n|^2 and |B_n|^2: photons in line n over the acquisition time.
    double signal_photons(std::size_t line) const;
    double lo_photons(std::size_t line) const;

    /// Throws InvalidArgument when an invariant is violated.
    void check() const;

    /// Non-fatal diagnostics, e.g. per-line photon numbers too small for the
    /// linearized noise model.
    std::vector<std::string> warnings() const;
};

/// Per-line transmissivity and phase. Either field may hold one value
/// (uniform over all lines) or one value per line.
class LineChannel {
  public:
    LineChannel(double transmissivity = 1.0, double phase_rad = 0.0);
    LineChannel(std::vector<double> transmissivity, std::vector<double> phase_rad);

    double transmissivity(std::size_t line) const;
    double phase(std::size_t line) const;

    /// True when both fields hold a single value.
    bool uniform() const { return transmissivity_.size() == 1 && phase_.size() == 1; }

    /// Throws InvalidArgument unless every per-line field has length 1 or `lines`.
    void check(std::size_t lines) const;

  private:
    std::vector<double> transmissivity_;
    std::vector<double> phase_;
};

/// Sample channel (kappa_n, alpha_n) seen by the signal comb.
class SampleResponse : public LineChannel {
  public:
    using LineChannel::LineChannel;
};

/// LO storage channel (eta_n, beta_n).
class LOPath : public LineChannel {
  public:
    using LineChannel::LineChannel;
};

struct Environment {
    double temperature_k = 0.0;
    // When set, used as the thermal occupation of every line instead of the
    // Bose-Einstein value at each line frequency.
    std::optional<double> uniform_occupation;

    /// Thermal occupation E_n of the environment modes around line n.
    double occupation(const DualCombConfig &cfg, std::size_t line) const;
};

/// Optical frequency of line n: nu_0 + n f_r.
double line_frequency(const DualCombConfig &cfg, std::size_t line);

/// P T / (N h nu_0): photons per line for a symmetric comb of total power P.
double photons_per_line(double power_w, const DualCombConfig &cfg);

/// Bose-Einstein mean photon number 1/(exp(h f / k_B T) - 1); 0 at T = 0.
double thermal_occupation(double frequency_hz, const Environment &env);

/// sqrt(kappa_m eta_m) A_m B_m exp(i (alpha_m - beta_m)).
std::complex<double> mean_ac_spectrum(const DualCombConfig &cfg, const SampleResponse &sample,
                                      const LOPath &lo, std::size_t m);

/// var Sigma_AC(m df_r) = sum_n [ N_n + eta_n kappa_n (B_n^2 var X_nm + A_n^2 var Q_nm) ]
/// with thermal term
///   N_n = (2E_n + 1) [eta_n B_n^2 (1 - kappa_n) + kappa_n A_n^2 (1 - eta_n)]
/// and the joint quadrature variances taken at theta_n = alpha_n - beta_n.
double ac_noise_variance(const DualCombConfig &cfg, const SampleResponse &sample, const LOPath &lo,
                         const Environment &env, std::size_t m);

/// |mean_ac_spectrum| / sqrt(ac_noise_variance).
double snr_fundamental(const DualCombConfig &cfg, const SampleResponse &sample, const LOPath &lo,
                       const Environment &env, std::size_t m);

}  // namespace qcomb
