#pragma once

// Practical SNR budget for a symmetric dual comb:
//
//   SNR^-2 = (N^2 / T) (a_NEP / P_S^2 + a_quad / P_S + a_RIN)
//
// with detector (NEP), quadrature and laser-intensity (RIN) contributions,
// plus saturation thresholds, estimation bounds and quantum-advantage figures.
//
// Advantages are amplitude-SNR ratios in dB: 10 log10(SNR_q / SNR_cl), i.e.
// 5 log10 of the noise-variance ratio.

#include <cstddef>
#include <string_view>

#include "qcomb/dualcomb.hpp"

namespace qcomb {

struct DetectorModel {
    double nep_w_per_rthz = 0.0;  // W / Hz^(1/2)
    double rin_per_hz = 0.0;      // linear, 1 / Hz

    static DetectorModel from_dbc(double nep_w_per_rthz, double rin_dbc_per_hz);
    double rin_dbc_per_hz() const;
    void check() const;
};

/// Linear RIN from dBc/Hz: 10^(dB/10).
double rin_from_dbc(double dbc_per_hz);
double rin_to_dbc(double rin_per_hz);

enum class NoiseTerm { nep, quad, rin };

std::string_view to_string(NoiseTerm term);

struct NoiseBreakdown {
    double sigma2_nep = 0.0;
    double sigma2_quad = 0.0;
    double sigma2_rin = 0.0;
    double snr = 0.0;
    // Coefficients of the (N^2/T)(...) form.
    double a_nep = 0.0;   // W^2 s
    double a_quad = 0.0;  // J
    double a_rin = 0.0;   // 1 / Hz
    double gamma = 0.0;
    double c_gamma = 0.0;
    double c_gamma2 = 0.0;

    double total() const { return sigma2_nep + sigma2_quad + sigma2_rin; }
    /// 10 log10 of the amplitude SNR.
    double snr_db() const;
    NoiseTerm dominant() const;
};

/// Normalized detector-noise variance (N^2/T) NEP^2 / (eta_m kappa_m gamma P_S^2).
double sigma_nep(const DualCombConfig &cfg, const SampleResponse &sample, const LOPath &lo,
                 const DetectorModel &det, std::size_t m);

/// Normalized quadrature-noise variance (N^2/T) c_gamma 4 h nu_0 / P_S, with
/// c_gamma = var Sigma_AC / (4 eta_m kappa_m B^2 N) from the full readout noise.
double sigma_quad(const DualCombConfig &cfg, const SampleResponse &sample, const LOPath &lo,
                  const Environment &env, std::size_t m);

/// Normalized intensity-noise variance (N^2/T) 2 c_{gamma^2} RIN = (N^2/T) RIN / 2.
double sigma_rin(const DualCombConfig &cfg, const DetectorModel &det);

/// c_gamma for line m (symmetric combs only).
double quadrature_coefficient(const DualCombConfig &cfg, const SampleResponse &sample,
                              const LOPath &lo, const Environment &env, std::size_t m);

NoiseBreakdown snr_full(const DualCombConfig &cfg, const SampleResponse &sample, const LOPath &lo,
                        const Environment &env, const DetectorModel &det, std::size_t m);

/// 10 log10(SNR_quantum / SNR_classical), both from snr_full.
double quantum_advantage(const DualCombConfig &quantum, const DualCombConfig &classical,
                         const SampleResponse &sample, const LOPath &lo, const Environment &env,
                         const DetectorModel &det, std::size_t m);

struct PowerOptimum {
    double signal_power_w = 0.0;
    double advantage_db = 0.0;
};

/// Maximizes quantum_advantage over P_S in [p_min, p_max] with the LO ratio of
/// each config held fixed.
PowerOptimum max_advantage_over_power(const DualCombConfig &quantum,
                                      const DualCombConfig &classical,
                                      const SampleResponse &sample, const LOPath &lo,
                                      const Environment &env, const DetectorModel &det,
                                      std::size_t m, double p_min_w, double p_max_w);

/// Noise floors left when the quadrature noise is removed.
enum class LimitCurve {
    nep_only,   // detector noise alone
    rin_only,   // intensity noise alone
    technical,  // detector + intensity noise (infinite squeezing)
};

/// 10 log10(SNR_limit / SNR) for a given breakdown.
double limit_advantage(const NoiseBreakdown &breakdown, LimitCurve curve);

/// Signal power sqrt(a_NEP / a_RIN) at which the NEP-only and RIN-only limits cross.
double nep_rin_crossing_power(const NoiseBreakdown &breakdown);

struct SaturationThresholds {
    double nep_w = 0.0;  // below this, sigma2_nep exceeds sigma2_quad
    double rin_w = 0.0;  // above this, sigma2_rin exceeds sigma2_quad; +inf when RIN = 0
};

/// Signal powers at which the detector and intensity noise overtake the
/// quadrature noise, for equal squeezing of signal and LO, an ideal LO path
/// (eta = 1), no thermal photons and uniform transmissivity kappa:
///   P_NEP = G NEP^2 / (h nu_0 D),   P_RIN = 2 h nu_0 D / (G gamma kappa RIN),
///   D = gamma [G (1 - kappa) + kappa] + kappa.
SaturationThresholds saturation_thresholds(SqueezeGain gain, double gamma, double kappa,
                                           const DetectorModel &det, double carrier_hz);

struct MmseBounds {
    double sqrt_kappa = 0.0;  // kappa / (2 SNR^2)
    double phase = 0.0;       // 1 / (2 SNR^2)
};

/// Cramer-Rao bounds on sqrt(kappa_m) and theta_m = alpha_m - beta_m.
MmseBounds mmse_bounds(double snr, double kappa);

struct ClassicalCoefficients {
    double c_gamma = 0.0;              // (1 + 1/gamma) / 4
    double c_gamma2 = 0.0;             // 1/4 (balanced detection)
    double c_gamma2_unbalanced = 0.0;  // (1 + gamma^2) / (2 gamma)
};

ClassicalCoefficients classical_coefficients(double gamma);

}  // namespace qcomb
