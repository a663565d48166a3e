// Acceptance checks AC1-AC10. Prints one [PASS]/[FAIL] line per criterion and
// exits non-zero if any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "qcomb/config.hpp"
#include "qcomb/constants.hpp"
#include "qcomb/dualcomb.hpp"
#include "qcomb/gaussian.hpp"
#include "qcomb/mc_oracle.hpp"
#include "qcomb/noise_budget.hpp"
#include "qcomb/sweep.hpp"

namespace fs = std::filesystem;
using namespace qcomb;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string &what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

DualCombConfig reference_comb(double p_s, double gain_db) {
    DualCombConfig cfg;
    cfg.lines = 100000;
    cfg.acquisition_s = 1.0;
    cfg.carrier_hz = DualCombConfig::carrier_from_wavelength(1e-6);
    cfg.signal_power_w = p_s;
    cfg.lo_power_w = 5.0 * p_s;
    cfg.signal_gain = cfg.lo_gain = SqueezeGain::decibels(gain_db);
    return cfg;
}

const DetectorModel kReferenceDetector = DetectorModel::from_dbc(5e-13, -170.0);

McRun mc_base(std::size_t n) {
    McRun run;
    run.seed = 42;
    run.n_samples = n;
    run.config.lines = 16;
    run.config.signal_power_w = 2.5e-12;
    run.config.lo_power_w = 1.25e-11;
    run.environment.uniform_occupation = 0.0;
    return run;
}

Outcome ac1() {
    Outcome o;
    for (double theta = -3.0; theta <= 3.0; theta += 0.1) {
        o.require(joint_quadrature_variance(SqueezeGain::none(), theta) == 1.0, "G=1 not exactly 1");
    }
    for (double g : {2.0, 10.0, 1e3, 1e6}) {
        const double v = joint_quadrature_variance(SqueezeGain::linear(g), 0.0);
        o.require(std::abs(v - 1.0 / g) <= 1e-12, fmt::format("var(G={},0)={}", g, v));
    }
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> log_gain(0.0, 3.0);
    std::uniform_real_distribution<double> phase(-constants::pi, constants::pi);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const auto gain = SqueezeGain::linear(std::pow(10.0, log_gain(rng)));
        const double theta = phase(rng);
        const double closed = joint_quadrature_variance(gain, theta);
        const double cov = joint_quadrature_variance(tmsv_state(gain), 0, 1, theta);
        worst = std::max(worst, std::abs(cov - closed) / closed);
    }
    o.require(worst <= 1e-10, fmt::format("covariance path rel. error {:.2e}", worst));
    o.detail = o.pass ? fmt::format("max rel. diff {:.1e} over 100 draws", worst) : o.detail;
    return o;
}

Outcome ac2() {
    Outcome o;
    double worst = 0.0;
    for (double gamma : {0.2, 1.0, 5.0, 100.0}) {
        DualCombConfig cfg = reference_comb(1e-4, 0.0);
        cfg.lo_power_w = gamma * cfg.signal_power_w;
        const auto b = snr_full(cfg, SampleResponse(), LOPath(), Environment{}, kReferenceDetector, 1);
        const double c1 = (1.0 + 1.0 / gamma) / 4.0;
        worst = std::max({worst, std::abs(b.c_gamma - c1) / c1, std::abs(b.c_gamma2 - 0.25) / 0.25});
    }
    o.require(worst <= 1e-13, fmt::format("coefficient rel. error {:.2e}", worst));
    o.detail = o.pass ? fmt::format("max rel. diff {:.1e}", worst) : o.detail;
    return o;
}

Outcome ac3() {
    Outcome o;
    const auto q = reference_comb(1e-4, 10.0);
    const auto cl = reference_comb(1e-4, 0.0);
    const auto best = max_advantage_over_power(q, cl, SampleResponse(), LOPath(), Environment{},
                                               kReferenceDetector, 1, 1e-7, 1e-1);
    const auto b = snr_full(cl, SampleResponse(), LOPath(), Environment{}, kReferenceDetector, 1);
    const double crossing = nep_rin_crossing_power(b);
    const auto at_crossing = snr_full(reference_comb(crossing, 0.0), SampleResponse(), LOPath(),
                                      Environment{}, kReferenceDetector, 1);
    const double nep_limit = limit_advantage(at_crossing, LimitCurve::nep_only);
    o.require(std::abs(best.advantage_db - 4.9) <= 0.2,
              fmt::format("max advantage {:.3f} dB", best.advantage_db));
    o.require(std::abs(nep_limit - 13.4) <= 0.3, fmt::format("NEP-only limit {:.3f} dB", nep_limit));
    o.require(std::abs(crossing / 1e-4 - 1.0) < 0.05, fmt::format("crossing {:.3e} W", crossing));
    if (o.pass) {
        o.detail = fmt::format("max advantage {:.3f} dB at P_S={:.3g} W; NEP-only limit {:.3f} dB at "
                               "P_S={:.3g} W",
                               best.advantage_db, best.signal_power_w, nep_limit, crossing);
    }
    return o;
}

// Bisection in log P for ratio(P) = 1.
double solve_log(const std::function<double(double)> &log_ratio, double lo, double hi) {
    double a = std::log(lo);
    double b = std::log(hi);
    double fa = log_ratio(std::exp(a));
    for (int i = 0; i < 200 && b - a > 1e-12; ++i) {
        const double mid = 0.5 * (a + b);
        const double fm = log_ratio(std::exp(mid));
        if ((fm > 0) == (fa > 0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    return std::exp(0.5 * (a + b));
}

Outcome ac4() {
    Outcome o;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double g = std::pow(10.0, 2.0 * u(rng));
        const double gamma = std::pow(10.0, -1.0 + 2.0 * u(rng));
        const double kappa = 0.1 + 0.9 * u(rng);
        const DetectorModel det{std::pow(10.0, -14.0 + 2.0 * u(rng)),
                                std::pow(10.0, -18.0 + 2.0 * u(rng))};
        DualCombConfig cfg = reference_comb(1e-4, 0.0);
        cfg.signal_gain = cfg.lo_gain = SqueezeGain::linear(g);
        const SampleResponse sample(kappa, 0.0);
        const auto log_ratio = [&](bool nep) {
            return [&, nep](double p) {
                cfg.signal_power_w = p;
                cfg.lo_power_w = gamma * p;
                const auto b = snr_full(cfg, sample, LOPath(), Environment{}, det, 1);
                return std::log((nep ? b.sigma2_nep : b.sigma2_rin) / b.sigma2_quad);
            };
        };
        const auto t = saturation_thresholds(SqueezeGain::linear(g), gamma, kappa, det, cfg.carrier_hz);
        const double p_nep = solve_log(log_ratio(true), 1e-20, 1e10);
        const double p_rin = solve_log(log_ratio(false), 1e-20, 1e10);
        worst = std::max({worst, std::abs(t.nep_w / p_nep - 1.0), std::abs(t.rin_w / p_rin - 1.0)});
    }
    o.require(worst <= 0.01, fmt::format("max rel. deviation {:.3e}", worst));
    o.detail = o.pass ? fmt::format("20 draws, max rel. deviation {:.2e}", worst) : o.detail;
    return o;
}

Outcome ac5() {
    Outcome o;
    std::vector<std::pair<std::string, McRun>> runs;
    runs.emplace_back("classical lossless", mc_base(100000));
    McRun squeezed = mc_base(100000);
    squeezed.config.signal_gain = squeezed.config.lo_gain = SqueezeGain::linear(10.0);
    runs.emplace_back("G=10 matched", squeezed);
    McRun lossy = mc_base(100000);
    lossy.sample = SampleResponse(0.5, 0.0);
    lossy.environment.uniform_occupation = 0.01;
    runs.emplace_back("kappa=0.5 E=0.01", lossy);

    std::vector<std::string> parts;
    for (const auto &[name, run] : runs) {
        const auto r = verify_variance(run, 5, 3.0);
        o.require(r.pass, fmt::format("{}: z={:.2f}", name, r.z_score));
        parts.push_back(fmt::format("{} z={:+.2f}", name, r.z_score));
    }
    if (o.pass) {
        o.detail = fmt::format("n=1e5; {}", fmt::join(parts, ", "));
    }
    return o;
}

Outcome ac6() {
    Outcome o;
    McRun run = mc_base(10000);
    const CrbReport classical = verify_crb(run, 5, 1.0, 0.0);
    // Independent draws: with a shared seed the lossless squeezed readout is
    // an exact rescaling of the classical one.
    run.seed = 4242;
    run.config.signal_gain = run.config.lo_gain = SqueezeGain::linear(10.0);
    const CrbReport squeezed = verify_crb(run, 5, 1.0, 0.0);
    for (const auto *r : {&classical, &squeezed}) {
        o.require(r->snr >= 10.0, fmt::format("SNR {:.1f} < 10", r->snr));
        o.require(std::abs(r->ratio_sqrt_kappa - 1.0) <= 0.15,
                  fmt::format("sqrt(kappa) MSE/CRB {:.3f}", r->ratio_sqrt_kappa));
        o.require(std::abs(r->ratio_theta - 1.0) <= 0.15,
                  fmt::format("theta MSE/CRB {:.3f}", r->ratio_theta));
    }
    const double reduction = classical.mse_sqrt_kappa / squeezed.mse_sqrt_kappa;
    const double reduction_theta = classical.mse_theta / squeezed.mse_theta;
    o.require(std::abs(reduction / 10.0 - 1.0) <= 0.15, fmt::format("MSE reduction {:.2f}", reduction));
    o.require(std::abs(reduction_theta / 10.0 - 1.0) <= 0.15,
              fmt::format("theta MSE reduction {:.2f}", reduction_theta));
    if (o.pass) {
        o.detail = fmt::format(
            "MSE/CRB classical {:.3f}/{:.3f}, squeezed {:.3f}/{:.3f}; reduction {:.2f}/{:.2f} (G=10)",
            classical.ratio_sqrt_kappa, classical.ratio_theta, squeezed.ratio_sqrt_kappa,
            squeezed.ratio_theta, reduction, reduction_theta);
    }
    return o;
}

Outcome ac7() {
    Outcome o;
    double worst = 0.0;
    for (std::size_t lines : {1U, 4U, 8U, 16U}) {
        McRun run = mc_base(100);
        run.quantum_noise = false;
        run.config.lines = lines;
        std::vector<double> profile(lines);
        std::vector<double> phases(lines);
        for (std::size_t i = 0; i < lines; ++i) {
            profile[i] = 1.0 + 0.5 * std::cos(1.7 * static_cast<double>(i));
            phases[i] = 0.4 * static_cast<double>(i) - 1.0;
        }
        run.config.signal_profile = profile;
        run.sample = SampleResponse(std::vector<double>(lines, 0.8), phases);
        const Interferogram series = synthesize_interferogram(run);
        for (std::size_t m = 1; m <= lines; ++m) {
            const auto expected = mean_ac_spectrum(run.config, run.sample, run.lo, m);
            worst = std::max(worst, std::abs(dft_bin(series, m) - expected) / std::abs(expected));
        }
    }
    o.require(worst <= 1e-6, fmt::format("max rel. error {:.2e}", worst));
    o.detail = o.pass ? fmt::format("N in {{1,4,8,16}}, max rel. error {:.1e}", worst) : o.detail;
    return o;
}

Outcome ac8() {
    Outcome o;
    const Environment room{300.0, std::nullopt};
    const double e10 = thermal_occupation(constants::speed_of_light / 10e-6, room);
    const double e5 = thermal_occupation(constants::speed_of_light / 5e-6, room);
    o.require(std::abs(e10 - 0.0083) <= 0.0002, fmt::format("E(10 um)={:.5f}", e10));
    o.require(e5 <= 1e-4, fmt::format("E(5 um)={:.3e}", e5));
    o.detail = o.pass ? fmt::format("E(300 K, 10 um)={:.5f}, E(300 K, 5 um)={:.2e}", e10, e5) : o.detail;
    return o;
}

Outcome ac9() {
    Outcome o;
    // RIN term across gamma.
    const DualCombConfig base = reference_comb(1e-4, 0.0);
    const double reference = sigma_rin(base, kReferenceDetector);
    double worst = 0.0;
    for (double gamma : {0.1, 1.0, 10.0}) {
        DualCombConfig cfg = base;
        cfg.lo_power_w = gamma * cfg.signal_power_w;
        worst = std::max(worst, std::abs(sigma_rin(cfg, kReferenceDetector) / reference - 1.0));
    }
    o.require(worst <= 1e-12, fmt::format("RIN varies with gamma by {:.2e}", worst));

    // Fixed total power: SNR maximum on the 101-point diagonal.
    const auto fig4 = run_sweep(RunConfig(preset("fig4")));
    const auto best = std::max_element(fig4.rows.begin(), fig4.rows.end(),
                                       [](const PointResult &a, const PointResult &b) {
                                           return a.breakdown.snr < b.breakdown.snr;
                                       });
    o.require(fig4.rows.size() == 101, "fig4 grid is not 101 points");
    o.require(std::abs(best->axis_values[0] - 0.5) < 1e-9,
              fmt::format("SNR peak at share {:.4f}", best->axis_values[0]));

    // Absorption sweep: monotone in G at each wavelength.
    const auto fig5 = run_sweep(RunConfig(preset("fig5")), true);
    const std::size_t n_wl = fig5.axes[0].values.size();
    const std::size_t n_g = fig5.axes[1].values.size();
    std::size_t gain_violations = 0;
    for (std::size_t i = 0; i < n_wl; ++i) {
        for (std::size_t j = 1; j < n_g; ++j) {
            const auto &prev = fig5.rows[i * n_g + j - 1];
            const auto &cur = fig5.rows[i * n_g + j];
            gain_violations += (!cur.ok || cur.advantage_db < prev.advantage_db - 1e-12) ? 1 : 0;
        }
    }
    o.require(gain_violations == 0, fmt::format("{} non-monotone steps in G", gain_violations));

    // Anti-monotone in absorption, compared at one thermal occupation so that
    // only the absorption coefficient differs between grid points.
    KeyValues fixed = preset("fig5");
    layer(fixed, {{"environment.occupation_at_carrier", ""},
                  {"environment.temperature_k", ""},
                  {"environment.occupation", "0.0083"}});
    const auto fig5_fixed = run_sweep(RunConfig(fixed), true);
    std::size_t alpha_violations = 0;
    for (std::size_t j = 0; j < n_g; ++j) {
        std::vector<const PointResult *> column;
        for (std::size_t i = 0; i < n_wl; ++i) {
            column.push_back(&fig5_fixed.rows[i * n_g + j]);
        }
        std::stable_sort(column.begin(), column.end(), [](const PointResult *a, const PointResult *b) {
            return *a->alpha_per_um < *b->alpha_per_um;
        });
        for (std::size_t i = 1; i < column.size(); ++i) {
            alpha_violations += column[i]->advantage_db > column[i - 1]->advantage_db + 1e-12 ? 1 : 0;
        }
    }
    o.require(alpha_violations == 0,
              fmt::format("{} increases of advantage with absorption", alpha_violations));
    if (o.pass) {
        o.detail = fmt::format("RIN spread {:.1e}; fig4 peak at share 0.5; fig5 {}x{} monotone in G and "
                               "anti-monotone in alpha",
                               worst, n_wl, n_g);
    }
    return o;
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

Outcome ac10() {
    Outcome o;
#ifdef QCOMB_CLI_PATH
    const fs::path dir = fs::temp_directory_path() / "qcomb_acceptance";
    fs::create_directories(dir);
    std::vector<std::string> outputs;
    for (int i = 0; i < 2; ++i) {
        const fs::path csv = dir / fmt::format("mc_{}.csv", i);
        const std::string cmd = fmt::format("{} mc-verify --seed 42 --out {} >/dev/null 2>&1",
                                            QCOMB_CLI_PATH, csv.string());
        const int status = std::system(cmd.c_str());
        const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        o.require(code == 0, fmt::format("run {} exited with {}", i + 1, code));
        outputs.push_back(slurp(csv));
    }
    fs::remove_all(dir);
    o.require(!outputs[0].empty(), "empty CSV");
    o.require(outputs[0] == outputs[1], "CSV outputs differ");
    if (o.pass) {
        const auto rows = std::count(outputs[0].begin(), outputs[0].end(), '\n');
        o.detail = fmt::format("two runs, {} bytes / {} lines, identical", outputs[0].size(), rows);
    }
#else
    o.require(false, "qcomb executable not built");
#endif
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        const char *id;
        const char *name;
        Outcome (*run)();
        double budget_s;  // 0 = no runtime limit
    };
    const std::vector<Criterion> criteria = {
        {"AC1", "joint quadrature variance closed form", ac1, 1.0},
        {"AC2", "classical coefficient recovery", ac2, 0.0},
        {"AC3", "headline advantage and NEP-only limit", ac3, 10.0},
        {"AC4", "saturation thresholds vs numeric crossings", ac4, 0.0},
        {"AC5", "Monte-Carlo variance oracle", ac5, 60.0},
        {"AC6", "Cramer-Rao bound efficiency", ac6, 0.0},
        {"AC7", "interferogram DFT recovers line spectrum", ac7, 0.0},
        {"AC8", "thermal occupation", ac8, 0.0},
        {"AC9", "property suite", ac9, 0.0},
        {"AC10", "mc-verify determinism", ac10, 0.0},
    };
    int failed = 0;
    for (const auto &c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = c.run();
        } catch (const std::exception &e) {
            outcome.pass = false;
            outcome.detail = fmt::format("exception: {}", e.what());
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.budget_s > 0.0 && seconds > c.budget_s) {
            outcome.pass = false;
            outcome.detail += fmt::format(" (over {:.0f} s budget)", c.budget_s);
        }
        failed += outcome.pass ? 0 : 1;
        std::cout << fmt::format("[{}] {} {}: {} ({:.2f} s)\n", outcome.pass ? "PASS" : "FAIL", c.id,
                                 c.name, outcome.detail, seconds)
                  << std::flush;
    }
    std::cout << fmt::format("{}/{} criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
