#include "qcomb/noise_budget.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <fmt/format.h>

#include "qcomb/errors.hpp"

namespace qcomb {

namespace {

// Detection bandwidth for single-sided spectral densities: df = 1 / (2T).
double detection_bandwidth(const DualCombConfig &cfg) { return 1.0 / (2.0 * cfg.acquisition_s); }

void require_symmetric(const DualCombConfig &cfg, const char *what) {
    if (!cfg.symmetric()) {
        throw InvalidArgument(fmt::format(
            "{} assumes identical comb lines; use ac_noise_variance / snr_fundamental for "
            "per-line amplitude profiles",
            what));
    }
}

// |mean_ac_spectrum(m)|^2, rejecting configurations with no signal at line m.
double mean_power(const DualCombConfig &cfg, const SampleResponse &sample, const LOPath &lo,
                  std::size_t m) {
    const double power = std::norm(mean_ac_spectrum(cfg, sample, lo, m));
    if (!(power > 0.0)) {
        throw DegenerateModel(fmt::format(
            "mean signal at line {} vanishes (kappa eta P_S P_LO = 0); normalized noise is "
            "undefined",
            m));
    }
    return power;
}

}  // namespace

DetectorModel DetectorModel::from_dbc(double nep_w_per_rthz, double rin_dbc_per_hz) {
    DetectorModel det{nep_w_per_rthz, rin_from_dbc(rin_dbc_per_hz)};
    det.check();
    return det;
}

double DetectorModel::rin_dbc_per_hz() const { return rin_to_dbc(rin_per_hz); }

void DetectorModel::check() const {
    if (!(nep_w_per_rthz >= 0.0) || !(rin_per_hz >= 0.0)) {
        throw InvalidArgument(fmt::format("NEP and RIN must be non-negative (got {}, {})",
                                          nep_w_per_rthz, rin_per_hz));
    }
}

double rin_from_dbc(double dbc_per_hz) { return std::pow(10.0, dbc_per_hz / 10.0); }

double rin_to_dbc(double rin_per_hz) { return 10.0 * std::log10(rin_per_hz); }

std::string_view to_string(NoiseTerm term) {
    switch (term) {
        case NoiseTerm::nep:
            return "nep";
        case NoiseTerm::quad:
            return "quad";
        case NoiseTerm::rin:
            return "rin";
    }
    return "?";
}

double NoiseBreakdown::snr_db() const { return 10.0 * std::log10(snr); }

NoiseTerm NoiseBreakdown::dominant() const {
    if (sigma2_nep >= sigma2_quad && sigma2_nep >= sigma2_rin) {
        return NoiseTerm::nep;
    }
    return sigma2_quad >= sigma2_rin ? NoiseTerm::quad : NoiseTerm::rin;
}

double sigma_nep(const DualCombConfig &cfg, const SampleResponse &sample, const LOPath &lo,
                 const DetectorModel &det, std::size_t m) {
    det.check();
    const double signal = mean_power(cfg, sample, lo, m);
    // NEP fluctuation expressed in photon number, both quadratures.
    const double photons = det.nep_w_per_rthz * cfg.acquisition_s / cfg.photon_energy_j();
    const double readout = 2.0 * photons * photons * detection_bandwidth(cfg);
    return readout / signal;
}

double quadrature_coefficient(const DualCombConfig &cfg, const SampleResponse &sample,
                              const LOPath &lo, const Environment &env, std::size_t m) {
    require_symmetric(cfg, "quadrature_coefficient");
    const double signal = mean_power(cfg, sample, lo, m);
    const double a2 = cfg.signal_photons(m);
    // eta_m kappa_m B^2 = |mean|^2 / A^2
    const double eta_kappa_b2 = signal / a2;
    return ac_noise_variance(cfg, sample, lo, env, m) /
           (4.0 * eta_kappa_b2 * static_cast<double>(cfg.lines));
}

double sigma_quad(const DualCombConfig &cfg, const SampleResponse &sample, const LOPath &lo,
                  const Environment &env, std::size_t m) {
    const double c_gamma = quadrature_coefficient(cfg, sample, lo, env, m);
    const double n = static_cast<double>(cfg.lines);
    return n * n / cfg.acquisition_s * c_gamma * 4.0 * cfg.photon_energy_j() / cfg.signal_power_w;
}

double sigma_rin(const DualCombConfig &cfg, const DetectorModel &det) {
    cfg.check();
    det.check();
    require_symmetric(cfg, "sigma_rin");
    const double a2 = photons_per_line(cfg.signal_power_w, cfg);
    const double b2 = photons_per_line(cfg.lo_power_w, cfg);
    if (!(a2 > 0.0) || !(b2 > 0.0)) {
        throw DegenerateModel("RIN-type noise needs non-zero signal and LO power");
    }
    const double n = static_cast<double>(cfg.lines);
    const double df = detection_bandwidth(cfg);
    // Per-tooth power variance RIN df P^2, i.e. var(A^2) = RIN df (N A^2)^2, and
    // var(A) = var(A^2) / (4 A^2) for A^2 >> var A.
    const double var_a = det.rin_per_hz * df * (n * a2) * (n * a2) / (4.0 * a2);
    const double var_b = det.rin_per_hz * df * (n * b2) * (n * b2) / (4.0 * b2);
    // Circular jitter adds to both quadratures; eta_m kappa_m cancels in the ratio.
    const double readout = 2.0 * (var_a * b2 + a2 * var_b);
    return readout / (a2 * b2);
}

NoiseBreakdown snr_full(const DualCombConfig &cfg, const SampleResponse &sample, const LOPath &lo,
                        const Environment &env, const DetectorModel &det, std::size_t m) {
    require_symmetric(cfg, "snr_full");
    NoiseBreakdown out;
    out.sigma2_nep = sigma_nep(cfg, sample, lo, det, m);
    out.c_gamma = quadrature_coefficient(cfg, sample, lo, env, m);
    out.sigma2_quad = sigma_quad(cfg, sample, lo, env, m);
    out.sigma2_rin = sigma_rin(cfg, det);

    const double n = static_cast<double>(cfg.lines);
    const double scale = n * n / cfg.acquisition_s;
    const double ps = cfg.signal_power_w;
    out.gamma = cfg.lo_ratio();
    out.a_nep = out.sigma2_nep * ps * ps / scale;
    out.a_quad = out.sigma2_quad * ps / scale;
    out.a_rin = out.sigma2_rin / scale;
    out.c_gamma2 = det.rin_per_hz > 0.0 ? out.a_rin / (2.0 * det.rin_per_hz) : 0.25;

    const double total = out.total();
    if (!(total > 0.0)) {
        throw DegenerateModel("every noise term vanishes; SNR is unbounded");
    }
    out.snr = 1.0 / std::sqrt(total);
    return out;
}

double quantum_advantage(const DualCombConfig &quantum, const DualCombConfig &classical,
                         const SampleResponse &sample, const LOPath &lo, const Environment &env,
                         const DetectorModel &det, std::size_t m) {
    const double snr_q = snr_full(quantum, sample, lo, env, det, m).snr;
    const double snr_cl = snr_full(classical, sample, lo, env, det, m).snr;
    if (!(snr_cl > 0.0) || !(snr_q > 0.0)) {
        throw DegenerateModel("quantum advantage needs non-zero SNR in both configurations");
    }
    return 10.0 * std::log10(snr_q / snr_cl);
}

PowerOptimum max_advantage_over_power(const DualCombConfig &quantum,
                                      const DualCombConfig &classical,
                                      const SampleResponse &sample, const LOPath &lo,
                                      const Environment &env, const DetectorModel &det,
                                      std::size_t m, double p_min_w, double p_max_w) {
    if (!(p_min_w > 0.0) || !(p_max_w > p_min_w)) {
        throw InvalidArgument(
            fmt::format("power range must satisfy 0 < p_min < p_max (got {}, {})", p_min_w, p_max_w));
    }
    const double gamma_q = quantum.lo_ratio();
    const double gamma_cl = classical.lo_ratio();
    const auto advantage_at = [&](double log_power) {
        DualCombConfig q = quantum;
        DualCombConfig cl = classical;
        const double p = std::pow(10.0, log_power);
        q.signal_power_w = cl.signal_power_w = p;
        q.lo_power_w = gamma_q * p;
        cl.lo_power_w = gamma_cl * p;
        return quantum_advantage(q, cl, sample, lo, env, det, m);
    };

    // Coarse scan to bracket the global maximum, then Brent refinement.
    constexpr int kGrid = 241;
    const double lo_log = std::log10(p_min_w);
    const double hi_log = std::log10(p_max_w);
    const double step = (hi_log - lo_log) / (kGrid - 1);
    int best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < kGrid; ++i) {
        const double v = advantage_at(lo_log + step * i);
        if (v > best_value) {
            best_value = v;
            best = i;
        }
    }
    const double left = lo_log + step * std::max(best - 1, 0);
    const double right = lo_log + step * std::min(best + 1, kGrid - 1);
    const auto [x, neg] = boost::math::tools::brent_find_minima(
        [&](double log_power) { return -advantage_at(log_power); }, left, right, 40);
    if (-neg < best_value) {
        return {std::pow(10.0, lo_log + step * best), best_value};
    }
    return {std::pow(10.0, x), -neg};
}

double limit_advantage(const NoiseBreakdown &breakdown, LimitCurve curve) {
    double floor = 0.0;
    switch (curve) {
        case LimitCurve::nep_only:
            floor = breakdown.sigma2_nep;
            break;
        case LimitCurve::rin_only:
            floor = breakdown.sigma2_rin;
            break;
        case LimitCurve::technical:
            floor = breakdown.sigma2_nep + breakdown.sigma2_rin;
            break;
    }
    if (!(floor > 0.0)) {
        return std::numeric_limits<double>::infinity();
    }
    return 5.0 * std::log10(breakdown.total() / floor);
}

double nep_rin_crossing_power(const NoiseBreakdown &breakdown) {
    if (!(breakdown.a_nep > 0.0) || !(breakdown.a_rin > 0.0)) {
        throw DegenerateModel("NEP-only and RIN-only limits cross only when both are non-zero");
    }
    return std::sqrt(breakdown.a_nep / breakdown.a_rin);
}

SaturationThresholds saturation_thresholds(SqueezeGain gain, double gamma, double kappa,
                                           const DetectorModel &det, double carrier_hz) {
    det.check();
    if (gain.is_infinite()) {
        throw InvalidArgument("saturation thresholds need a finite squeezing gain");
    }
    if (!(gamma > 0.0)) {
        throw InvalidArgument(fmt::format("LO ratio gamma must be positive, got {}", gamma));
    }
    if (!(kappa > 0.0 && kappa <= 1.0)) {
        throw InvalidArgument(fmt::format("transmissivity must lie in (0, 1], got {}", kappa));
    }
    if (!(carrier_hz > 0.0)) {
        throw InvalidArgument("carrier frequency must be positive");
    }
    const double g = gain.value();
    DualCombConfig at_carrier;
    at_carrier.carrier_hz = carrier_hz;
    const double photon = at_carrier.photon_energy_j();
    const double d = gamma * (g * (1.0 - kappa) + kappa) + kappa;

    SaturationThresholds out;
    out.nep_w = g * det.nep_w_per_rthz * det.nep_w_per_rthz / (photon * d);
    out.rin_w = det.rin_per_hz > 0.0 ? 2.0 * photon * d / (g * gamma * kappa * det.rin_per_hz)
                                     : std::numeric_limits<double>::infinity();
    return out;
}

MmseBounds mmse_bounds(double snr, double kappa) {
    if (!(snr > 0.0)) {
        throw InvalidArgument(fmt::format("SNR must be positive, got {}", snr));
    }
    if (!(kappa > 0.0 && kappa <= 1.0)) {
        throw InvalidArgument(fmt::format("transmissivity must lie in (0, 1], got {}", kappa));
    }
    const double inv = 1.0 / (2.0 * snr * snr);
    return {kappa * inv, inv};
}

ClassicalCoefficients classical_coefficients(double gamma) {
    if (!(gamma > 0.0)) {
        throw InvalidArgument(fmt::format("LO ratio gamma must be positive, got {}", gamma));
    }
    return {0.25 * (1.0 + 1.0 / gamma), 0.25, (1.0 + gamma * gamma) / (2.0 * gamma)};
}

}  // namespace qcomb
