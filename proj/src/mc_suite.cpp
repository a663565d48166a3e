// Built-in Monte-Carlo verification suite used by `qcomb mc-verify`.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <string_view>

#include <fmt/format.h>

#include "qcomb/hash.hpp"
#include "qcomb/mc_oracle.hpp"

namespace qcomb {

namespace {

using cd = std::complex<double>;

// Every check draws from its own stream so that no two rows share random
// numbers. Without this the lossless squeezed readout would be an exact
// rescaling of the classical one and their comparison would be vacuous.
std::uint64_t stream_seed(std::uint64_t seed, std::string_view stream) {
    return seed ^ fnv1a64(stream);
}

// Sixteen lines at ~8e5 photons per signal line: classical SNR near 200,
// well inside the linearized estimator regime.
McRun base_run(const SuiteOptions &opt, std::string_view stream) {
    McRun run;
    run.seed = stream_seed(opt.seed, stream);
    run.n_samples = opt.n_samples;
    run.config.lines = 16;
    run.config.signal_power_w = 2.5e-12;
    run.config.lo_power_w = 5.0 * run.config.signal_power_w;
    run.environment.uniform_occupation = 0.0;
    return run;
}

class Suite {
  public:
    explicit Suite(const SuiteOptions &opt) : opt_(opt) {}

    void variance(const std::string &name, const McRun &run, std::size_t m) {
        const Readout r = sample_readout(run, m);
        const EmpiricalStats stats = empirical_stats(r.samples);
        const double analytic = opt_.analytic_scale * analytic_readout_variance(run, m);
        const VarianceReport rep = compare_variance(stats, analytic, opt_.tolerance_sigmas);
        add(name, run.hash(), rep.analytic, rep.empirical, rep.z_score, rep.pass);
    }

    void crb(const std::string &name, const McRun &run, std::size_t m) {
        const double kappa = run.sample.transmissivity(m);
        const double theta = run.sample.phase(m) - run.lo.phase(m);
        const CrbReport rep = verify_crb(run, m, kappa, theta);
        const double tol = 0.15;
        // Ratio rows: analytic is the bound, empirical the MSE; z is the
        // relative deviation expressed in units of the tolerance band.
        const double bk = opt_.analytic_scale * rep.crb_sqrt_kappa;
        const double bt = opt_.analytic_scale * rep.crb_theta;
        const double rk = rep.mse_sqrt_kappa / bk - 1.0;
        const double rt = rep.mse_theta / bt - 1.0;
        add(name + "/sqrt_kappa", run.hash(), bk, rep.mse_sqrt_kappa, rk / tol,
            std::abs(rk) <= tol);
        add(name + "/theta", run.hash(), bt, rep.mse_theta, rt / tol, std::abs(rt) <= tol);
        const double zt = rep.theta_standard_error > 0.0
                              ? (rep.mean_theta - theta) / rep.theta_standard_error
                              : 0.0;
        add(name + "/theta_unbiased", run.hash(), theta, rep.mean_theta, zt,
            std::abs(zt) <= opt_.tolerance_sigmas);
        mse_[name] = rep.mse_sqrt_kappa;
    }

    double mse(const std::string &name) const { return mse_.at(name); }

    void add(std::string name, std::string hash, double analytic, double empirical, double z,
             bool pass) {
        rows_.push_back({std::move(name), std::move(hash), analytic, empirical, z, pass});
    }

    std::vector<VerificationRow> take() { return std::move(rows_); }
    const SuiteOptions &options() const { return opt_; }

  private:
    SuiteOptions opt_;
    std::vector<VerificationRow> rows_;
    std::map<std::string, double> mse_;
};

void dft_identity(Suite &suite, std::size_t lines) {
    McRun run = base_run(suite.options(), "dft_identity");
    run.quantum_noise = false;
    run.config.lines = lines;
    run.config.signal_power_w = 1e-9;
    run.config.lo_power_w = 3e-9;
    // Non-uniform amplitudes and phases so that bins cannot be confused.
    std::vector<double> sp(lines);
    std::vector<double> lp(lines);
    std::vector<double> kappa(lines);
    std::vector<double> phase(lines);
    for (std::size_t i = 0; i < lines; ++i) {
        const auto x = static_cast<double>(i);
        sp[i] = 1.0 + 0.5 * std::sin(1.3 * x);
        lp[i] = 1.0 + 0.3 * std::cos(0.7 * x);
        kappa[i] = 0.2 + 0.7 * (x + 1.0) / static_cast<double>(lines);
        phase[i] = 0.4 * x - 1.0;
    }
    run.config.signal_profile = sp;
    run.config.lo_profile = lp;
    run.sample = SampleResponse(kappa, phase);
    run.lo = LOPath(std::vector<double>(lines, 0.9), std::vector<double>(lines, 0.25));

    const Interferogram series = synthesize_interferogram(run);
    double worst = 0.0;
    for (std::size_t m = 1; m <= lines; ++m) {
        const cd expected = mean_ac_spectrum(run.config, run.sample, run.lo, m);
        const cd got = dft_bin(series, m);
        worst = std::max(worst, std::abs(got - expected) / std::abs(expected));
    }
    constexpr double tolerance = 1e-6;
    suite.add(fmt::format("dft_identity/N={}", lines), run.hash(), 0.0, worst, worst / tolerance,
              worst <= tolerance);
}

}  // namespace

std::vector<VerificationRow> run_verification_suite(const SuiteOptions &options) {
    Suite suite(options);
    const std::size_t m = 5;

    {
        McRun run = base_run(options, "variance/classical_lossless");
        suite.variance("variance/classical_lossless", run, m);
    }
    {
        McRun run = base_run(options, "variance/squeezed_g10");
        run.config.signal_gain = SqueezeGain::linear(10.0);
        run.config.lo_gain = SqueezeGain::linear(10.0);
        suite.variance("variance/squeezed_g10", run, m);
    }
    {
        McRun run = base_run(options, "variance/lossy_thermal");
        run.sample = SampleResponse(0.5, 0.0);
        run.environment.uniform_occupation = 0.01;
        suite.variance("variance/lossy_thermal", run, m);
    }
    {
        McRun run = base_run(options, "variance/mismatched_phase");
        run.config.signal_gain = SqueezeGain::linear(10.0);
        run.config.lo_gain = SqueezeGain::linear(3.0);
        run.sample = SampleResponse(0.8, 0.5);
        run.lo = LOPath(0.9, 0.2);
        run.environment.uniform_occupation = 0.05;
        suite.variance("variance/mismatched_phase", run, m);
    }
    {
        McRun run = base_run(options, "variance/detector_noise");
        run.detector = DetectorModel{2e-15, 1e-7};
        suite.variance("variance/detector_noise", run, m);
    }

    {
        McRun run = base_run(options, "crb/classical");
        run.n_samples = options.crb_samples;
        suite.crb("crb/classical", run, m);
        run.seed = stream_seed(options.seed, "crb/squeezed_g10");
        run.config.signal_gain = SqueezeGain::linear(10.0);
        run.config.lo_gain = SqueezeGain::linear(10.0);
        suite.crb("crb/squeezed_g10", run, m);
        const double ratio = suite.mse("crb/classical") / suite.mse("crb/squeezed_g10");
        const double expected = options.analytic_scale * 10.0;
        const double rel = ratio / expected - 1.0;
        suite.add("crb/mse_reduction", run.hash(), expected, ratio, rel / 0.15,
                  std::abs(rel) <= 0.15);
    }

    for (std::size_t lines : {1U, 4U, 8U, 16U}) {
        dft_identity(suite, lines);
    }

    {
        McRun run = base_run(options, "time_vs_frequency/time");
        run.n_samples = options.time_domain_samples;
        run.config.signal_gain = SqueezeGain::linear(5.0);
        run.config.lo_gain = SqueezeGain::linear(2.0);
        run.sample = SampleResponse(0.7, 0.2);
        run.lo = LOPath(0.9, 0.0);
        run.environment.uniform_occupation = 0.02;
        run.mode = Synthesis::time_domain;
        const Readout td = sample_readout(run, m);
        run.mode = Synthesis::frequency_domain;
        run.seed = stream_seed(options.seed, "time_vs_frequency/frequency");
        const Readout fd = sample_readout(run, m);
        const EmpiricalStats ts = empirical_stats(td.samples);
        const EmpiricalStats fs = empirical_stats(fd.samples);
        const double z = variance_difference_z(ts, fs);
        suite.add("time_vs_frequency/difference", run.hash(), fs.sample_variance,
                  ts.sample_variance, z, std::abs(z) <= options.tolerance_sigmas);
        const VarianceReport rep = compare_variance(
            ts, options.analytic_scale * analytic_readout_variance(run, m), options.tolerance_sigmas);
        suite.add("time_vs_frequency/time_domain_analytic", run.hash(), rep.analytic,
                  rep.empirical, rep.z_score, rep.pass);
    }

    {
        McRun run = base_run(options, "quadrature_independence");
        run.config.signal_gain = SqueezeGain::linear(10.0);
        run.config.lo_gain = SqueezeGain::linear(10.0);
        const Readout r = sample_readout(run, m);
        const double z = quadrature_correlation_z(r.samples);
        suite.add("quadrature_independence", run.hash(), 0.0, z, z,
                  std::abs(z) <= options.tolerance_sigmas);
    }

    for (double gamma : {0.1, 1.0, 10.0}) {
        const std::string name = fmt::format("rin_gamma_independence/gamma={}", gamma);
        McRun run = base_run(options, name);
        run.quantum_noise = false;
        run.config.lo_power_w = gamma * run.config.signal_power_w;
        run.detector = DetectorModel{0.0, 1e-6};
        const Readout r = sample_readout(run, m);
        const EmpiricalStats stats = empirical_stats(r.samples);
        const double signal = std::norm(mean_ac_spectrum(run.config, run.sample, run.lo, m));
        const double analytic = options.analytic_scale * sigma_rin(run.config, *run.detector);
        const double empirical = stats.sample_variance / signal;
        const double z = (empirical - analytic) / (stats.standard_error / signal);
        suite.add(name, run.hash(), analytic,
                  empirical, z, std::abs(z) <= options.tolerance_sigmas);
    }

    return suite.take();
}

}  // namespace qcomb
