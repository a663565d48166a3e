#pragma once

// Monte-Carlo oracle for the dual-comb readout.
//
// Sideband modes are drawn from their Wigner distributions (TMSV pairs built
// from independently squeezed joint modes, thermal environment modes), pushed
// through the loss/phase channels and beaten against the mean fields. The
// Wigner sampling reproduces <X^dag X> exactly for the complex quadratures
// involved, so sample statistics can be compared directly with the analytic
// readout variance.
//
// Random numbers: boost::random::mt19937_64 per chunk of samples, seeded
// through splitmix64 from (seed, chunk index); normal deviates from
// boost::random::normal_distribution. Results do not depend on thread count.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qcomb/dualcomb.hpp"
#include "qcomb/noise_budget.hpp"

namespace qcomb {

/// Identifies the sampling algorithm in report metadata.
std::string rng_description();

enum class Synthesis { frequency_domain, time_domain };

std::string_view to_string(Synthesis mode);

struct McRun {
    std::uint64_t seed = 42;
    std::size_t n_samples = 100000;
    Synthesis mode = Synthesis::frequency_domain;
    DualCombConfig config;
    SampleResponse sample;
    LOPath lo;
    Environment environment;
    // Injected technical noise: additive circular detector noise (NEP) and
    // circular amplitude jitter of every comb line (RIN).
    std::optional<DetectorModel> detector;
    bool quantum_noise = true;
    // Time-domain points per interferogram period; 0 selects 4 N.
    std::size_t samples_per_period = 0;

    static constexpr std::size_t kMinSamples = 100;
    static constexpr std::size_t kMaxTimeDomainLines = 64;

    void check() const;
    std::size_t points_per_period() const;
    /// Stable fingerprint of every field that influences the samples.
    std::string hash() const;
};

struct Readout {
    std::vector<std::complex<double>> samples;
    std::vector<std::string> warnings;
};

/// Complex readout N_AC(m df_r) for `run.n_samples` independent acquisitions.
Readout sample_readout(const McRun &run, std::size_t m);

struct Interferogram {
    std::vector<double> values;  // N(t_k), k = 0 .. L-1
    double duration_s = 0.0;     // one interferogram period, 1 / df_r
};

/// One realization of the filtered photocurrent over one interferogram
/// period (noise-free when run.quantum_noise is false and no detector noise is
/// injected). Throws InvalidArgument when L <= 2N.
Interferogram synthesize_interferogram(const McRun &run);

/// Finite-time Fourier transform at m df_r: (T/L) sum_k N(t_k) e^{-2 pi i m k / L}.
std::complex<double> dft_bin(const Interferogram &series, std::size_t m);

struct EmpiricalStats {
    std::complex<double> sample_mean;
    double sample_variance = 0.0;  // <|x - mean|^2>, unbiased
    // Standard error of sample_variance, estimated from the spread of
    // |x - mean|^2 (exact for any distribution as n grows; for a real
    // Gaussian it approaches variance * sqrt(2/n)).
    double standard_error = 0.0;
    std::size_t n = 0;
};

EmpiricalStats empirical_stats(std::span<const std::complex<double>> samples);

/// Analytic var N_AC(m df_r) for the run, including injected detector noise.
double analytic_readout_variance(const McRun &run, std::size_t m);

struct VarianceReport {
    double empirical = 0.0;
    double analytic = 0.0;
    double standard_error = 0.0;
    double z_score = 0.0;
    bool pass = false;
    std::vector<std::string> warnings;
};

VarianceReport compare_variance(const EmpiricalStats &stats, double analytic,
                                double tolerance_sigmas);

VarianceReport verify_variance(const McRun &run, std::size_t m, double tolerance_sigmas);

struct CrbReport {
    double snr = 0.0;
    double mse_sqrt_kappa = 0.0;
    double mse_theta = 0.0;
    double crb_sqrt_kappa = 0.0;
    double crb_theta = 0.0;
    double ratio_sqrt_kappa = 0.0;  // mse / crb
    double ratio_theta = 0.0;
    double mean_theta = 0.0;
    double theta_standard_error = 0.0;
    bool pass = false;
    std::vector<std::string> warnings;
};

/// Estimates sqrt(kappa_m) = Re N_AC / (sqrt(eta_m) A_m B_m) and
/// theta_m = atan2(Im N_AC, Re N_AC) from each sample and compares their
/// mean-square errors against mmse_bounds at the analytic SNR.
/// Passes when both MSE/CRB ratios lie within 1 +- tolerance.
CrbReport verify_crb(const McRun &run, std::size_t m, double true_kappa, double true_theta,
                     double tolerance = 0.15);

/// z-score of the difference of two independent variance estimates.
double variance_difference_z(const EmpiricalStats &a, const EmpiricalStats &b);

/// Sample covariance of real and imaginary parts divided by its standard error.
double quadrature_correlation_z(std::span<const std::complex<double>> samples);

struct VerificationRow {
    std::string check;
    std::string config_hash;
    double analytic = 0.0;
    double empirical = 0.0;
    double z_score = 0.0;
    bool pass = false;
};

struct SuiteOptions {
    std::uint64_t seed = 42;
    std::size_t n_samples = 100000;
    std::size_t crb_samples = 10000;
    std::size_t time_domain_samples = 20000;
    double tolerance_sigmas = 3.0;
    // Multiplies every analytic reference value; anything but 1 should fail.
    double analytic_scale = 1.0;
};

/// Variance checks (classical, squeezed, lossy-thermal), CRB efficiency,
/// noiseless DFT identity for N in {1, 4, 8, 16}, frequency- vs time-domain
/// agreement, quadrature independence and RIN gamma-independence.
std::vector<VerificationRow> run_verification_suite(const SuiteOptions &options);

void write_report_csv(std::ostream &out, std::span<const VerificationRow> rows);

}  // namespace qcomb
