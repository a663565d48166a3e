#include "qcomb/mc_oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/version.hpp>
#include <fmt/format.h>

#include "qcomb/constants.hpp"
#include "qcomb/errors.hpp"
#include "qcomb/hash.hpp"

namespace qcomb {

namespace {

using cd = std::complex<double>;

constexpr std::size_t kChunk = 2048;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t chunk_seed(std::uint64_t seed, std::size_t chunk) {
    return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(chunk) + 1));
}

class Sampler {
  public:
    explicit Sampler(std::uint64_t seed) : engine_(seed) {}

    double normal(double variance) { return std::sqrt(variance) * unit_(engine_); }

    /// Wigner amplitudes (alpha_1, alpha_2) of a TMSV pair of gain g, built
    /// from independently squeezed joint modes a_pm = (a1 +- a2)/sqrt2.
    std::pair<cd, cd> tmsv_pair(double g) {
        const double q_plus = normal(0.5 / g);
        const double p_plus = normal(0.5 * g);
        const double q_minus = normal(0.5 * g);
        const double p_minus = normal(0.5 / g);
        const double r = 1.0 / std::sqrt(2.0);
        const double q1 = r * (q_plus + q_minus);
        const double q2 = r * (q_plus - q_minus);
        const double p1 = r * (p_plus + p_minus);
        const double p2 = r * (p_plus - p_minus);
        return {r * cd(q1, p1), r * cd(q2, p2)};
    }

    /// Wigner amplitude of a thermal mode, E|alpha|^2 = occupation + 1/2.
    cd thermal(double occupation) {
        const double v = occupation + 0.5;
        const double r = 1.0 / std::sqrt(2.0);
        return r * cd(normal(v), normal(v));
    }

    /// Circular complex Gaussian with E|z|^2 = total_variance.
    cd circular(double total_variance) {
        const double v = 0.5 * total_variance;
        return {normal(v), normal(v)};
    }

  private:
    boost::random::mt19937_64 engine_;
    boost::random::normal_distribution<double> unit_{0.0, 1.0};
};

// Per-line quantities resolved once per run.
struct Line {
    double a = 0.0;  // A_n
    double b = 0.0;  // B_n
    double kappa = 1.0;
    double eta = 1.0;
    double alpha = 0.0;
    double beta = 0.0;
    double occupation = 0.0;
    double jitter_a = 0.0;  // per-component variance of the amplitude jitter
    double jitter_b = 0.0;
};

struct Prepared {
    std::vector<Line> lines;
    double gain = 1.0;
    double lo_gain = 1.0;
    bool quantum_noise = true;
    bool jitter = false;
    double nep_variance = 0.0;  // E|z|^2 of the detector noise at a readout bin
    std::size_t points = 0;
    double period_s = 0.0;
    std::vector<cd> twiddle;  // e^{2 pi i k / L}
};

Prepared prepare(const McRun &run) {
    run.check();
    const auto &cfg = run.config;
    Prepared p;
    p.gain = cfg.signal_gain.value();
    p.lo_gain = cfg.lo_gain.value();
    p.quantum_noise = run.quantum_noise;

    double total_a2 = 0.0;
    double total_b2 = 0.0;
    p.lines.resize(cfg.lines);
    for (std::size_t n = 1; n <= cfg.lines; ++n) {
        Line &l = p.lines[n - 1];
        const double a2 = cfg.signal_photons(n);
        const double b2 = cfg.lo_photons(n);
        total_a2 += a2;
        total_b2 += b2;
        l.a = std::sqrt(a2);
        l.b = std::sqrt(b2);
        l.kappa = run.sample.transmissivity(n);
        l.eta = run.lo.transmissivity(n);
        l.alpha = run.sample.phase(n);
        l.beta = run.lo.phase(n);
        l.occupation = run.environment.occupation(cfg, n);
    }

    if (run.detector) {
        const auto &det = *run.detector;
        const double df = 1.0 / (2.0 * cfg.acquisition_s);
        if (det.rin_per_hz > 0.0) {
            p.jitter = true;
            // Tooth power variance RIN df P^2 -> var(A_n) = RIN df (sum A^2)^2 / (4 A_n^2).
            for (auto &l : p.lines) {
                const double a2 = l.a * l.a;
                const double b2 = l.b * l.b;
                l.jitter_a = a2 > 0.0 ? det.rin_per_hz * df * total_a2 * total_a2 / (4.0 * a2) : 0.0;
                l.jitter_b = b2 > 0.0 ? det.rin_per_hz * df * total_b2 * total_b2 / (4.0 * b2) : 0.0;
            }
        }
        const double photons = det.nep_w_per_rthz * cfg.acquisition_s / cfg.photon_energy_j();
        p.nep_variance = 2.0 * photons * photons * df;
    }

    if (run.mode == Synthesis::time_domain) {
        p.points = run.points_per_period();
        if (p.points <= 2 * cfg.lines) {
            throw InvalidArgument(fmt::format(
                "{} points per period undersample {} lines (need more than 2 N = {})", p.points,
                cfg.lines, 2 * cfg.lines));
        }
        p.period_s = 1.0 / cfg.rep_offset_hz;
        p.twiddle.resize(p.points);
        for (std::size_t k = 0; k < p.points; ++k) {
            p.twiddle[k] = std::polar(1.0, 2.0 * constants::pi * static_cast<double>(k) /
                                               static_cast<double>(p.points));
        }
    }
    return p;
}

// Mean beat of line n including circular amplitude jitter when injected.
cd line_mean(const Line &l, Sampler &s, bool jitter) {
    cd a = l.a;
    cd b = l.b;
    if (jitter) {
        a += cd(s.normal(l.jitter_a), s.normal(l.jitter_a));
        b += cd(s.normal(l.jitter_b), s.normal(l.jitter_b));
    }
    return std::sqrt(l.kappa * l.eta) * a * std::conj(b) * std::polar(1.0, l.alpha - l.beta);
}

// One acquisition of N_AC(m df_r) from the per-line noise decomposition.
cd sample_frequency(const Prepared &p, Sampler &s, std::size_t m) {
    cd z = line_mean(p.lines[m - 1], s, p.jitter);
    if (p.quantum_noise) {
        for (const Line &l : p.lines) {
            const double theta = l.alpha - l.beta;
            const cd rot = std::polar(1.0, theta);
            const auto [a1, a2] = s.tmsv_pair(p.gain);
            const auto [b1, b2] = s.tmsv_pair(p.lo_gain);
            const cd e1 = s.thermal(l.occupation);
            const cd e2 = s.thermal(l.occupation);
            const cd f1 = s.thermal(l.occupation);
            const cd f2 = s.thermal(l.occupation);

            const cd x = a1 * rot + std::conj(a2) * std::conj(rot);
            const cd q = b1 * std::conj(rot) + std::conj(b2) * rot;
            const cd xe = e1 + std::conj(e2);
            const cd qf = f1 + std::conj(f2);

            const double gain = std::sqrt(l.eta * l.kappa);
            z += gain * l.b * x + gain * l.a * q + std::sqrt(l.eta * (1.0 - l.kappa)) * l.b * xe +
                 std::sqrt((1.0 - l.eta) * l.kappa) * l.a * qf;
        }
    }
    if (p.nep_variance > 0.0) {
        z += s.circular(p.nep_variance);
    }
    return z;
}

// One realization of the filtered photocurrent over an interferogram period.
// Spectral coefficients c_f of the positive-frequency part s(t) are built from
// channel outputs of every sideband pair, then N(t) = (s + s^*) / T.
void synthesize_time(const Prepared &p, Sampler &s, std::vector<cd> &coeff,
                     std::vector<double> &series) {
    const std::size_t n_lines = p.lines.size();
    const std::size_t L = p.points;
    coeff.assign(L, cd{});
    const auto slot = [L](long f) { return static_cast<std::size_t>((f % static_cast<long>(L) + static_cast<long>(L)) % static_cast<long>(L)); };

    for (std::size_t n = 1; n <= n_lines; ++n) {
        const Line &l = p.lines[n - 1];
        coeff[slot(static_cast<long>(n))] += line_mean(l, s, p.jitter);
        if (!p.quantum_noise) {
            continue;
        }
        const cd sig = std::sqrt(l.eta) * l.b * std::polar(1.0, -l.beta);
        const cd loc = std::sqrt(l.kappa) * l.a * std::polar(1.0, l.alpha);
        const cd sample_rot = std::sqrt(l.kappa) * std::polar(1.0, l.alpha);
        const cd lo_rot = std::sqrt(l.eta) * std::polar(1.0, l.beta);
        const double sample_leak = std::sqrt(1.0 - l.kappa);
        const double lo_leak = std::sqrt(1.0 - l.eta);
        for (std::size_t j = 1; j <= n_lines; ++j) {
            // Signal sidebands a_{n,+j}, a_{n,-j}; LO sidebands b_{n,n+j}, b_{n,n-j}.
            const auto [a_up, a_down] = s.tmsv_pair(p.gain);
            const auto [b_up, b_down] = s.tmsv_pair(p.lo_gain);
            const cd a_up_out = sample_rot * a_up + sample_leak * s.thermal(l.occupation);
            const cd a_down_out = sample_rot * a_down + sample_leak * s.thermal(l.occupation);
            const cd b_up_out = lo_rot * b_up + lo_leak * s.thermal(l.occupation);
            const cd b_down_out = lo_rot * b_down + lo_leak * s.thermal(l.occupation);

            const long f = static_cast<long>(j);
            coeff[slot(f)] += sig * a_up_out + loc * std::conj(b_down_out);
            coeff[slot(-f)] += sig * a_down_out + loc * std::conj(b_up_out);
        }
    }

    series.assign(L, 0.0);
    for (std::size_t k = 0; k < L; ++k) {
        cd acc{};
        for (std::size_t f = 0; f < L; ++f) {
            if (coeff[f] != cd{}) {
                acc += coeff[f] * p.twiddle[(f * k) % L];
            }
        }
        series[k] = 2.0 * acc.real() / p.period_s;
    }
    if (p.nep_variance > 0.0) {
        // White noise with E|DFT bin|^2 = nep_variance.
        const double v = p.nep_variance * static_cast<double>(L) / (p.period_s * p.period_s);
        for (auto &x : series) {
            x += s.normal(v);
        }
    }
}

cd dft(const std::vector<double> &series, double period_s, std::size_t m,
       const std::vector<cd> *twiddle) {
    const std::size_t L = series.size();
    cd acc{};
    for (std::size_t k = 0; k < L; ++k) {
        const cd w = twiddle ? (*twiddle)[(m * k) % L]
                             : std::polar(1.0, 2.0 * constants::pi * static_cast<double>((m * k) % L) /
                                                   static_cast<double>(L));
        acc += series[k] * std::conj(w);
    }
    return acc * (period_s / static_cast<double>(L));
}

template <class Fn>
void parallel_chunks(std::size_t n_chunks, Fn &&fn) {
    const std::size_t workers =
        std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(n_chunks, 1));
    if (workers <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c) {
            fn(c);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            try {
                for (std::size_t c = next++; c < n_chunks; c = next++) {
                    fn(c);
                }
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
            }
        });
    }
    for (auto &t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

std::string g17(double x) { return fmt::format("{:.17g}", x); }

}  // namespace

std::string rng_description() {
    return fmt::format("mt19937_64 chunks of {} seeded by splitmix64(seed, chunk); "
                       "boost {} normal_distribution",
                       kChunk, BOOST_LIB_VERSION);
}

std::string_view to_string(Synthesis mode) {
    return mode == Synthesis::time_domain ? "time_domain" : "frequency_domain";
}

void McRun::check() const {
    if (n_samples < kMinSamples) {
        throw InvalidArgument(
            fmt::format("Monte-Carlo runs need at least {} samples, got {}", kMinSamples, n_samples));
    }
    config.check();
    sample.check(config.lines);
    lo.check(config.lines);
    if (config.signal_gain.is_infinite() || config.lo_gain.is_infinite()) {
        throw InvalidArgument("cannot sample states with infinite squeezing gain");
    }
    if (environment.uniform_occupation && !(*environment.uniform_occupation >= 0.0)) {
        throw InvalidArgument("thermal occupation must be >= 0");
    }
    if (detector) {
        detector->check();
    }
    if (mode == Synthesis::time_domain && config.lines > kMaxTimeDomainLines) {
        throw InvalidArgument(fmt::format("time-domain synthesis supports at most {} lines, got {}",
                                          kMaxTimeDomainLines, config.lines));
    }
}

std::size_t McRun::points_per_period() const {
    return samples_per_period == 0 ? 4 * config.lines : samples_per_period;
}

std::string McRun::hash() const {
    std::string s = fmt::format("seed={};n={};mode={};quantum={};points={};", seed, n_samples,
                                to_string(mode), quantum_noise, points_per_period());
    const auto &c = config;
    s += fmt::format("lines={};fr={};dfr={};nu0={};T={};PS={};PLO={};G={};GLO={};", c.lines,
                     g17(c.rep_rate_hz), g17(c.rep_offset_hz), g17(c.carrier_hz),
                     g17(c.acquisition_s), g17(c.signal_power_w), g17(c.lo_power_w),
                     g17(c.signal_gain.value()), g17(c.lo_gain.value()));
    for (double w : c.signal_profile) {
        s += g17(w) + ",";
    }
    s += ";";
    for (double w : c.lo_profile) {
        s += g17(w) + ",";
    }
    s += ";";
    for (std::size_t n = 1; n <= c.lines; ++n) {
        s += fmt::format("{},{},{},{};", g17(sample.transmissivity(n)), g17(sample.phase(n)),
                         g17(lo.transmissivity(n)), g17(lo.phase(n)));
    }
    s += fmt::format("TB={};occ={};", g17(environment.temperature_k),
                     environment.uniform_occupation ? g17(*environment.uniform_occupation) : "-");
    if (detector) {
        s += fmt::format("nep={};rin={};", g17(detector->nep_w_per_rthz), g17(detector->rin_per_hz));
    }
    return fingerprint(s);
}

Readout sample_readout(const McRun &run, std::size_t m) {
    if (m < 1 || m > run.config.lines) {
        throw InvalidArgument(fmt::format("line index {} outside [1, {}]", m, run.config.lines));
    }
    const Prepared p = prepare(run);
    Readout out;
    out.warnings = run.config.warnings();
    out.samples.resize(run.n_samples);

    const std::size_t n_chunks = (run.n_samples + kChunk - 1) / kChunk;
    parallel_chunks(n_chunks, [&](std::size_t chunk) {
        Sampler sampler(chunk_seed(run.seed, chunk));
        const std::size_t begin = chunk * kChunk;
        const std::size_t end = std::min(begin + kChunk, run.n_samples);
        std::vector<cd> coeff;
        std::vector<double> series;
        for (std::size_t i = begin; i < end; ++i) {
            if (run.mode == Synthesis::frequency_domain) {
                out.samples[i] = sample_frequency(p, sampler, m);
            } else {
                synthesize_time(p, sampler, coeff, series);
                out.samples[i] = dft(series, p.period_s, m, &p.twiddle);
            }
        }
    });
    return out;
}

Interferogram synthesize_interferogram(const McRun &run) {
    McRun td = run;
    td.mode = Synthesis::time_domain;
    const Prepared p = prepare(td);
    Sampler sampler(chunk_seed(run.seed, 0));
    std::vector<cd> coeff;
    Interferogram out;
    synthesize_time(p, sampler, coeff, out.values);
    out.duration_s = p.period_s;
    return out;
}

std::complex<double> dft_bin(const Interferogram &series, std::size_t m) {
    if (series.values.empty()) {
        throw InvalidArgument("empty interferogram");
    }
    return dft(series.values, series.duration_s, m, nullptr);
}

EmpiricalStats empirical_stats(std::span<const std::complex<double>> samples) {
    const std::size_t n = samples.size();
    if (n < 2) {
        throw InvalidArgument("empirical statistics need at least two samples");
    }
    EmpiricalStats out;
    out.n = n;
    out.sample_mean = std::accumulate(samples.begin(), samples.end(), cd{}) / static_cast<double>(n);

    double sum = 0.0;
    for (const cd &x : samples) {
        sum += std::norm(x - out.sample_mean);
    }
    const double mean_dev = sum / static_cast<double>(n);
    double spread = 0.0;
    for (const cd &x : samples) {
        const double d = std::norm(x - out.sample_mean) - mean_dev;
        spread += d * d;
    }
    out.sample_variance = sum / static_cast<double>(n - 1);
    out.standard_error = std::sqrt(spread / static_cast<double>(n - 1) / static_cast<double>(n));
    return out;
}

double analytic_readout_variance(const McRun &run, std::size_t m) {
    double total = 0.0;
    if (run.quantum_noise) {
        total += ac_noise_variance(run.config, run.sample, run.lo, run.environment, m);
    }
    if (run.detector) {
        const double signal = std::norm(mean_ac_spectrum(run.config, run.sample, run.lo, m));
        if (run.detector->nep_w_per_rthz > 0.0) {
            total += sigma_nep(run.config, run.sample, run.lo, *run.detector, m) * signal;
        }
        if (run.detector->rin_per_hz > 0.0) {
            total += sigma_rin(run.config, *run.detector) * signal;
        }
    }
    return total;
}

VarianceReport compare_variance(const EmpiricalStats &stats, double analytic,
                                double tolerance_sigmas) {
    VarianceReport r;
    r.empirical = stats.sample_variance;
    r.analytic = analytic;
    r.standard_error = stats.standard_error;
    r.z_score = stats.standard_error > 0.0 ? (r.empirical - r.analytic) / stats.standard_error
                                           : (r.empirical == r.analytic ? 0.0 : INFINITY);
    r.pass = std::abs(r.z_score) <= tolerance_sigmas;
    return r;
}

VarianceReport verify_variance(const McRun &run, std::size_t m, double tolerance_sigmas) {
    const Readout readout = sample_readout(run, m);
    VarianceReport r = compare_variance(empirical_stats(readout.samples),
                                        analytic_readout_variance(run, m), tolerance_sigmas);
    r.warnings = readout.warnings;
    return r;
}

CrbReport verify_crb(const McRun &run, std::size_t m, double true_kappa, double true_theta,
                     double tolerance) {
    const auto &cfg = run.config;
    const double phase = run.sample.phase(m) - run.lo.phase(m);
    if (std::abs(phase) > 1e-9) {
        throw InvalidArgument(fmt::format(
            "the transmissivity estimator assumes matched phases (alpha_m - beta_m = {})", phase));
    }
    CrbReport r;
    r.snr = run.detector ? snr_full(cfg, run.sample, run.lo, run.environment, *run.detector, m).snr
                         : snr_fundamental(cfg, run.sample, run.lo, run.environment, m);
    const MmseBounds bounds = mmse_bounds(r.snr, true_kappa);
    r.crb_sqrt_kappa = bounds.sqrt_kappa;
    r.crb_theta = bounds.phase;

    const Readout readout = sample_readout(run, m);
    r.warnings = readout.warnings;
    if (r.snr < 3.0) {
        r.warnings.push_back(fmt::format(
            "SNR {:.3g} < 3: estimators are biased outside the linearized regime", r.snr));
    }

    const double scale = std::sqrt(run.lo.transmissivity(m) * cfg.signal_photons(m) * cfg.lo_photons(m));
    const double root_kappa = std::sqrt(true_kappa);
    double se_kappa = 0.0;
    double se_theta = 0.0;
    double sum_theta = 0.0;
    double sum_theta2 = 0.0;
    for (const cd &x : readout.samples) {
        const double dk = x.real() / scale - root_kappa;
        const double theta = std::atan2(x.imag(), x.real());
        const double dt = theta - true_theta;
        se_kappa += dk * dk;
        se_theta += dt * dt;
        sum_theta += theta;
        sum_theta2 += theta * theta;
    }
    const auto n = static_cast<double>(readout.samples.size());
    r.mse_sqrt_kappa = se_kappa / n;
    r.mse_theta = se_theta / n;
    r.mean_theta = sum_theta / n;
    r.theta_standard_error =
        std::sqrt(std::max(sum_theta2 / n - r.mean_theta * r.mean_theta, 0.0) / n);
    r.ratio_sqrt_kappa = r.mse_sqrt_kappa / r.crb_sqrt_kappa;
    r.ratio_theta = r.mse_theta / r.crb_theta;
    r.pass = std::abs(r.ratio_sqrt_kappa - 1.0) <= tolerance &&
             std::abs(r.ratio_theta - 1.0) <= tolerance;
    return r;
}

double variance_difference_z(const EmpiricalStats &a, const EmpiricalStats &b) {
    const double se = std::hypot(a.standard_error, b.standard_error);
    return se > 0.0 ? (a.sample_variance - b.sample_variance) / se : 0.0;
}

double quadrature_correlation_z(std::span<const std::complex<double>> samples) {
    const std::size_t n = samples.size();
    if (n < 2) {
        throw InvalidArgument("correlation needs at least two samples");
    }
    const cd mean = std::accumulate(samples.begin(), samples.end(), cd{}) / static_cast<double>(n);
    double sum = 0.0;
    for (const cd &x : samples) {
        sum += (x.real() - mean.real()) * (x.imag() - mean.imag());
    }
    const double cov = sum / static_cast<double>(n);
    double spread = 0.0;
    for (const cd &x : samples) {
        const double d = (x.real() - mean.real()) * (x.imag() - mean.imag()) - cov;
        spread += d * d;
    }
    const double se = std::sqrt(spread / static_cast<double>(n - 1) / static_cast<double>(n));
    return se > 0.0 ? cov / se : 0.0;
}

void write_report_csv(std::ostream &out, std::span<const VerificationRow> rows) {
    out << "check,config_hash,analytic,empirical,z_score,pass\n";
    for (const auto &row : rows) {
        out << fmt::format("{},{},{:.10g},{:.10g},{:.4f},{}\n", row.check, row.config_hash,
                           row.analytic, row.empirical, row.z_score, row.pass ? 1 : 0);
    }
}

}  // namespace qcomb
