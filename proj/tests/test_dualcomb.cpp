#include <cmath>
#include <complex>

#include <gtest/gtest.h>

#include "qcomb/constants.hpp"
#include "qcomb/dualcomb.hpp"
#include "qcomb/errors.hpp"

namespace qcomb {
namespace {

DualCombConfig small_comb() {
    DualCombConfig cfg;
    cfg.lines = 8;
    cfg.signal_power_w = 1e-6;
    cfg.lo_power_w = 5e-6;
    return cfg;
}

TEST(DualCombConfig, PhotonBookkeeping) {
    const DualCombConfig cfg = small_comb();
    const double hv = constants::planck * constants::speed_of_light / 1e-6;
    EXPECT_NEAR(cfg.photon_energy_j(), hv, 1e-30);
    EXPECT_NEAR(cfg.signal_photons(3), 1e-6 / (8 * hv), 1e-3);
    EXPECT_NEAR(cfg.lo_photons(3) / cfg.signal_photons(3), 5.0, 1e-12);
    EXPECT_NEAR(cfg.lo_ratio(), 5.0, 1e-12);
    EXPECT_NEAR(cfg.wavelength_m(), 1e-6, 1e-20);
}

TEST(DualCombConfig, ProfilesRedistributePower) {
    DualCombConfig cfg = small_comb();
    cfg.signal_profile = {1, 1, 1, 1, 2, 2, 2, 2};
    double total = 0.0;
    for (std::size_t n = 1; n <= cfg.lines; ++n) {
        total += cfg.signal_photons(n);
    }
    EXPECT_NEAR(total, cfg.signal_power_w * cfg.acquisition_s / cfg.photon_energy_j(), 1e-3);
    EXPECT_NEAR(cfg.signal_photons(8) / cfg.signal_photons(1), 2.0, 1e-12);
    EXPECT_FALSE(cfg.symmetric());
}

TEST(DualCombConfig, RejectsBrokenInvariants) {
    auto expect_invalid = [](auto mutate) {
        DualCombConfig cfg = small_comb();
        mutate(cfg);
        EXPECT_THROW(cfg.check(), InvalidArgument);
    };
    expect_invalid([](DualCombConfig &c) { c.lines = 0; });
    expect_invalid([](DualCombConfig &c) { c.rep_offset_hz = 0.02 * c.rep_rate_hz; });
    expect_invalid([](DualCombConfig &c) { c.acquisition_s = 1e-9; });
    expect_invalid([](DualCombConfig &c) { c.lines = 600000; });
    expect_invalid([](DualCombConfig &c) { c.signal_power_w = -1.0; });
    expect_invalid([](DualCombConfig &c) { c.signal_profile = {1, 2}; });
    expect_invalid([](DualCombConfig &c) { c.lo_profile = std::vector<double>(8, 0.0); });
    EXPECT_NO_THROW(small_comb().check());
}

TEST(DualCombConfig, WarnsAtLowPhotonNumber) {
    DualCombConfig cfg = small_comb();
    EXPECT_TRUE(cfg.warnings().empty());
    cfg.signal_power_w = 1e-18;
    ASSERT_EQ(cfg.warnings().size(), 1U);
    EXPECT_NE(cfg.warnings().front().find("signal"), std::string::npos);
}

TEST(LineChannel, ValidatesEntries) {
    EXPECT_THROW(SampleResponse(1.2, 0.0), InvalidArgument);
    EXPECT_THROW(LOPath(-0.1, 0.0), InvalidArgument);
    EXPECT_THROW(SampleResponse(0.5, std::nan("")), InvalidArgument);
    const SampleResponse per_line({0.1, 0.2, 0.3}, {0.0});
    EXPECT_DOUBLE_EQ(per_line.transmissivity(2), 0.2);
    EXPECT_DOUBLE_EQ(per_line.phase(3), 0.0);
    EXPECT_THROW(per_line.check(4), InvalidArgument);
    EXPECT_NO_THROW(per_line.check(3));
}

TEST(ThermalOccupation, PlanckValues) {
    // tests/oracle/derive.py
    Environment room{300.0, std::nullopt};
    EXPECT_NEAR(thermal_occupation(constants::speed_of_light / 10e-6, room), 0.008332221053365356,
                1e-12);
    EXPECT_NEAR(thermal_occupation(constants::speed_of_light / 5e-6, room), 6.828792746826143e-05,
                1e-15);
    EXPECT_EQ(thermal_occupation(1e14, Environment{}), 0.0);
    EXPECT_THROW(thermal_occupation(0.0, room), InvalidArgument);
    EXPECT_THROW(thermal_occupation(1e14, Environment{-1.0, std::nullopt}), InvalidArgument);
}

TEST(ThermalOccupation, UniformOverrideAndLineFrequencies) {
    DualCombConfig cfg = small_comb();
    Environment env{300.0, std::nullopt};
    EXPECT_DOUBLE_EQ(line_frequency(cfg, 2), cfg.carrier_hz + 2 * cfg.rep_rate_hz);
    EXPECT_GT(env.occupation(cfg, 1), env.occupation(cfg, 8));
    env.uniform_occupation = 0.25;
    EXPECT_EQ(env.occupation(cfg, 5), 0.25);
}

TEST(MeanSpectrum, MagnitudeAndPhase) {
    const DualCombConfig cfg = small_comb();
    const SampleResponse sample(0.64, 0.4);
    const LOPath lo(0.81, 0.1);
    const auto z = mean_ac_spectrum(cfg, sample, lo, 2);
    const double expected =
        std::sqrt(0.64 * 0.81 * cfg.signal_photons(2) * cfg.lo_photons(2));
    EXPECT_NEAR(std::abs(z), expected, 1e-9 * expected);
    EXPECT_NEAR(std::arg(z), 0.3, 1e-12);
    EXPECT_THROW(mean_ac_spectrum(cfg, sample, lo, 9), InvalidArgument);
    EXPECT_THROW(mean_ac_spectrum(cfg, sample, lo, 0), InvalidArgument);
}

// Per-line variance with unit amplitudes from the 8-mode covariance oracle.
TEST(AcNoiseVariance, MatchesCovarianceOracle) {
    DualCombConfig cfg;
    cfg.lines = 1;
    cfg.acquisition_s = 1.0;
    // Choose powers so that A^2 = 1 and B^2 = 4.
    cfg.signal_power_w = cfg.photon_energy_j();
    cfg.lo_power_w = 4.0 * cfg.photon_energy_j();
    Environment env{0.0, 0.01};
    EXPECT_NEAR(ac_noise_variance(cfg, SampleResponse(0.5, 0.0), LOPath(), env, 1), 4.54, 1e-12);

    cfg.signal_power_w = 2.25 * cfg.photon_energy_j();
    cfg.lo_power_w = 6.25 * cfg.photon_energy_j();
    cfg.signal_gain = SqueezeGain::linear(10.0);
    cfg.lo_gain = SqueezeGain::linear(3.0);
    env.uniform_occupation = 0.05;
    EXPECT_NEAR(ac_noise_variance(cfg, SampleResponse(0.8, 0.5), LOPath(0.9, 0.2), env, 1),
                6.693424249682007, 1e-11);
}

TEST(AcNoiseVariance, ClassicalLosslessIsShotNoise) {
    const DualCombConfig cfg = small_comb();
    const double expected = 8.0 * (cfg.signal_photons(1) + cfg.lo_photons(1));
    EXPECT_NEAR(ac_noise_variance(cfg, SampleResponse(), LOPath(), Environment{}, 1), expected,
                1e-12 * expected);
}

TEST(AcNoiseVariance, PerLinePathMatchesFastPath) {
    DualCombConfig cfg = small_comb();
    cfg.signal_gain = SqueezeGain::linear(4.0);
    cfg.lo_gain = SqueezeGain::linear(2.0);
    const Environment env{0.0, 0.02};
    const double fast = ac_noise_variance(cfg, SampleResponse(0.7, 0.1), LOPath(0.9, 0.0), env, 3);
    const SampleResponse per_line(std::vector<double>(8, 0.7), std::vector<double>(8, 0.1));
    const double slow = ac_noise_variance(cfg, per_line, LOPath(0.9, 0.0), env, 3);
    EXPECT_NEAR(fast, slow, 1e-12 * fast);
}

TEST(AcNoiseVariance, FullLossIsGainIndependent) {
    DualCombConfig cfg = small_comb();
    const Environment env{0.0, 0.0};
    const double reference = ac_noise_variance(cfg, SampleResponse(0.0, 0.0), LOPath(), env, 1);
    cfg.signal_gain = cfg.lo_gain = SqueezeGain::linear(1000.0);
    EXPECT_NEAR(ac_noise_variance(cfg, SampleResponse(0.0, 0.0), LOPath(), env, 1), reference,
                1e-12 * reference);
}

TEST(SnrFundamental, SqueezingImprovesLosslessSnrBySqrtG) {
    DualCombConfig cfg = small_comb();
    const double classical = snr_fundamental(cfg, SampleResponse(), LOPath(), Environment{}, 1);
    cfg.signal_gain = cfg.lo_gain = SqueezeGain::linear(100.0);
    const double squeezed = snr_fundamental(cfg, SampleResponse(), LOPath(), Environment{}, 1);
    EXPECT_NEAR(squeezed / classical, 10.0, 1e-9);
}

TEST(SnrFundamental, DegenerateWhenNoiseVanishes) {
    DualCombConfig cfg = small_comb();
    cfg.signal_gain = cfg.lo_gain = SqueezeGain::linear(std::numeric_limits<double>::infinity());
    EXPECT_THROW(snr_fundamental(cfg, SampleResponse(), LOPath(), Environment{}, 1), DegenerateModel);
}

TEST(SnrFundamental, MonotoneInGainAtMatchedPhase) {
    DualCombConfig cfg = small_comb();
    const SampleResponse sample(0.6, 0.0);
    const Environment env{0.0, 0.01};
    double previous = 0.0;
    for (double g : {1.0, 2.0, 5.0, 10.0, 100.0, 1e4}) {
        cfg.signal_gain = cfg.lo_gain = SqueezeGain::linear(g);
        const double snr = snr_fundamental(cfg, sample, LOPath(), env, 1);
        EXPECT_GE(snr, previous) << g;
        previous = snr;
    }
}

}  // namespace
}  // namespace qcomb
