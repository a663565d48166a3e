#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include <gtest/gtest.h>

#include "qcomb/commands.hpp"
#include "qcomb/config.hpp"
#include "qcomb/errors.hpp"
#include "qcomb/sweep.hpp"

namespace fs = std::filesystem;

namespace qcomb {
namespace {

KeyValues parse(const std::string &text) {
    std::istringstream in(text);
    return parse_config(in, "test.ini");
}

std::string config_error_field(const KeyValues &values) {
    try {
        RunConfig config(values);
    } catch (const ConfigError &e) {
        return e.field();
    }
    return "<no error>";
}

class TempDir : public ::testing::Test {
  protected:
    void SetUp() override {
        const auto *info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() /
               (std::string("qcomb_cli_") + info->test_suite_name() + "_" + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path write(const std::string &name, const std::string &text) const {
        const fs::path p = dir_ / name;
        std::ofstream(p) << text;
        return p;
    }

    static std::string slurp(const fs::path &p) {
        std::ifstream in(p, std::ios::binary);
        return {std::istreambuf_iterator<char>(in), {}};
    }

    fs::path dir_;
};

TEST(ConfigParse, SectionsAndComments) {
    const auto kv = parse("preset = fig1c\n; comment\n[comb]\nlines = 10 \n# other\n[detector]\n"
                          "nep_w_per_rthz=1e-12\n");
    EXPECT_EQ(kv.at("preset"), "fig1c");
    EXPECT_EQ(kv.at("comb.lines"), "10");
    EXPECT_EQ(kv.at("detector.nep_w_per_rthz"), "1e-12");
}

TEST(ConfigParse, DuplicateKeyIsAParseError) {
    EXPECT_THROW(parse("[comb]\nlines = 10\nlines = 20\n"), ParseError);
}

TEST(ConfigValidation, UnknownKeysAndBadValues) {
    KeyValues kv = preset("fig4");
    kv["comb.linez"] = "3";
    EXPECT_EQ(config_error_field(kv), "comb.linez");

    kv = preset("fig4");
    kv["comb.lines"] = "-3";
    EXPECT_EQ(config_error_field(kv), "comb.lines");

    kv = preset("fig4");
    kv["sample.transmissivity"] = "1.5";
    EXPECT_EQ(config_error_field(kv), "sample.transmissivity");

    kv = preset("fig4");
    kv["mc.samples"] = "10";
    EXPECT_EQ(config_error_field(kv), "mc.samples");

    EXPECT_THROW(preset("fig9"), ConfigError);
}

TEST(ConfigValidation, ConflictingKeys) {
    KeyValues kv = preset("fig1c");
    kv["comb.carrier_hz"] = "3e14";
    EXPECT_NE(config_error_field(kv), "<no error>");

    kv = preset("fig4");
    kv["comb.signal_gain_db"] = "3";
    EXPECT_NE(config_error_field(kv), "<no error>");

    kv = preset("fig1c");
    kv["detector.rin_per_hz"] = "1e-17";
    EXPECT_NE(config_error_field(kv), "<no error>");
}

TEST(ConfigValidation, AtMostTwoAxes) {
    KeyValues kv = preset("fig1c");
    kv["sweep.axis3"] = "comb.lo_ratio list 1 2";
    EXPECT_THROW(RunConfig{kv}, std::exception);

    kv = preset("fig1c");
    kv["sweep.axis2"] = "comb.gain_db list 1 2";
    EXPECT_EQ(config_error_field(kv), "sweep.axis2");

    kv = preset("fig1c");
    kv["sweep.axis2"] = "comb.signal_power_w log 0 1 5";
    EXPECT_EQ(config_error_field(kv), "sweep.axis2");
}

TEST(ConfigLayering, OverrideAndUnset) {
    KeyValues kv = preset("fig1c");
    layer(kv, {{"comb.lines", "20"}, {"sweep.axis2", ""}});
    EXPECT_EQ(kv.at("comb.lines"), "20");
    EXPECT_EQ(kv.count("sweep.axis2"), 0U);
    const RunConfig config(kv);
    EXPECT_EQ(config.axes().size(), 1U);
    EXPECT_EQ(config.model().comb.lines, 20U);

    const auto [key, value] = parse_assignment("detector.rin_dbc_per_hz=-160");
    EXPECT_EQ(key, "detector.rin_dbc_per_hz");
    EXPECT_EQ(value, "-160");
    EXPECT_THROW(parse_assignment("novalue"), ConfigError);
}

TEST(ConfigHash, StableAndIgnoresOutput) {
    KeyValues kv = preset("fig4");
    const std::string h = RunConfig(kv).hash();
    EXPECT_EQ(RunConfig(kv).hash(), h);
    kv["output.path"] = "/tmp/elsewhere.csv";
    EXPECT_EQ(RunConfig(kv).hash(), h);
    kv["comb.lines"] = "99999";
    EXPECT_NE(RunConfig(kv).hash(), h);
}

TEST(Presets, GridSizes) {
    const std::map<std::string, std::size_t> expected = {
        {"fig1c", 4 * 200}, {"fig3", 101 * 100}, {"fig4", 101}, {"fig5", 120 * 16}};
    for (const auto &name : preset_names()) {
        const RunConfig config(preset(name));
        const auto result = run_sweep(config, name == "fig5");
        EXPECT_EQ(result.rows.size(), expected.at(name)) << name;
        const auto failed = std::count_if(result.rows.begin(), result.rows.end(),
                                          [](const PointResult &r) { return !r.ok; });
        EXPECT_EQ(failed, 0) << name;
    }
}

TEST(Presets, FixedTotalPowerPeaksAtEqualSplit) {
    const auto result = run_sweep(RunConfig(preset("fig4")));
    const auto best = std::max_element(
        result.rows.begin(), result.rows.end(),
        [](const PointResult &a, const PointResult &b) { return a.breakdown.snr < b.breakdown.snr; });
    EXPECT_NEAR(best->axis_values[0], 0.5, 1e-9);
}

TEST(Presets, LoOnlyAdvantageApproachesHalfGainAtStrongLo) {
    KeyValues kv = preset("fig3");
    layer(kv, {{"sweep.axis2", ""}, {"sample.transmissivity", "1"}});
    const auto result = run_sweep(RunConfig(kv));
    double previous = -1.0;
    for (const auto &row : result.rows) {
        EXPECT_GE(row.advantage_db, previous - 1e-12);
        previous = row.advantage_db;
    }
    // Signal squeezed by 10 dB, LO coherent: sqrt(101/11) at gamma = 100.
    EXPECT_NEAR(result.rows.back().advantage_db, 5.0 * std::log10(101.0 / 11.0), 1e-6);
    EXPECT_LT(result.rows.back().advantage_db, 5.0);
}

TEST(Presets, WaterAdvantageFallsWithPathLength) {
    KeyValues kv = preset("fig5");
    layer(kv, {{"sweep.axis1", "water.path_length_um list 0 15 150 1500"},
               {"sweep.axis2", ""},
               {"comb.wavelength_um", "1.45"},
               {"comb.gain_db", "20"}});
    const auto result = run_sweep(RunConfig(kv), true);
    ASSERT_EQ(result.rows.size(), 4U);
    EXPECT_NEAR(result.rows[0].advantage_db, 10.0, 1e-3);
    for (std::size_t i = 1; i < result.rows.size(); ++i) {
        EXPECT_LT(result.rows[i].transmissivity, result.rows[i - 1].transmissivity);
        EXPECT_LT(result.rows[i].advantage_db, result.rows[i - 1].advantage_db);
    }
}

TEST(SnrCommand, PrintsBreakdownAndCsvRow) {
    KeyValues kv = preset("fig1c");
    layer(kv, {{"sweep.axis1", ""}, {"sweep.axis2", ""}, {"comb.gain_db", "10"}});
    std::ostringstream out;
    EXPECT_EQ(cmd_snr(RunConfig(kv), out), kExitOk);
    const std::string text = out.str();
    EXPECT_NE(text.find("dominant"), std::string::npos);
    EXPECT_NE(text.find("advantage_db_10log10_amp"), std::string::npos);
}

TEST_F(TempDir, SweepCsvIsByteIdenticalAcrossRuns) {
    CommandOptions options;
    options.command = "sweep";
    options.preset = "fig4";
    std::ostringstream a, b, err;
    EXPECT_EQ(run_command(options, a, err), kExitOk);
    EXPECT_EQ(run_command(options, b, err), kExitOk);
    EXPECT_EQ(a.str(), b.str());
    EXPECT_NE(a.str().find("# config_hash:"), std::string::npos);
    EXPECT_NE(a.str().find("comb.signal_share,"), std::string::npos);
}

TEST_F(TempDir, ConfigFileLayersOverPreset) {
    const auto cfg = write("run.ini", "preset = fig4\n[comb]\ntotal_power_w = 2e-3\n");
    CommandOptions options;
    options.command = "sweep";
    options.config_path = cfg.string();
    options.assignments = {"sample.transmissivity=0.25"};
    options.out = (dir_ / "out.csv").string();
    options.plot = true;
    const RunConfig config = resolve_config(options);
    EXPECT_EQ(config.values().at("comb.total_power_w"), "2e-3");
    EXPECT_DOUBLE_EQ(config.model().sample.transmissivity(1), 0.25);

    std::ostringstream out, err;
    EXPECT_EQ(run_command(options, out, err), kExitOk) << err.str();
    EXPECT_TRUE(fs::exists(dir_ / "out.csv"));
    EXPECT_NE(slurp(dir_ / "out.svg").find("<svg"), std::string::npos);

    options.preset = "fig1c";
    EXPECT_THROW(resolve_config(options), ConfigError);
}

TEST_F(TempDir, UsageErrorsReturnTwo) {
    std::ostringstream out, err;
    CommandOptions options;
    options.command = "sweep";
    options.preset = "fig4";
    options.plot = true;
    EXPECT_EQ(run_command(options, out, err), kExitUsage);

    options.plot = false;
    options.assignments = {"comb.bogus=1"};
    EXPECT_EQ(run_command(options, out, err), kExitUsage);
    EXPECT_NE(err.str().find("comb.bogus"), std::string::npos);

    options.assignments = {};
    options.config_path = (dir_ / "missing.ini").string();
    EXPECT_EQ(run_command(options, out, err), kExitUsage);
}

#ifdef QCOMB_CLI_PATH

int run_cli(const std::string &args) {
    const std::string cmd = std::string(QCOMB_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST_F(TempDir, ExecutableExitCodes) {
    const auto cfg = write("snr.ini", "preset = fig1c\n[sweep]\naxis1 =\naxis2 =\n[comb]\ngain_db = 10\n");
    EXPECT_EQ(run_cli("snr --config " + cfg.string()), 0);
    EXPECT_EQ(run_cli("sweep --preset fig4 --out " + (dir_ / "f4.csv").string() + " --plot"), 0);
    EXPECT_TRUE(fs::exists(dir_ / "f4.svg"));
    EXPECT_EQ(run_cli("water --set sweep.axis2= --out " + (dir_ / "w.csv").string()), 0);

    EXPECT_EQ(run_cli("frobnicate"), 2);
    EXPECT_EQ(run_cli("snr --config " + (dir_ / "nope.ini").string()), 2);
    EXPECT_EQ(run_cli("snr --config " + cfg.string() + " --set comb.lines=abc"), 2);
    EXPECT_EQ(run_cli("sweep --preset fig4 --set comb.total_power_w=-1"), 2);
    EXPECT_EQ(run_cli("mc-verify --seed notanumber"), 2);

    const std::string small_mc =
        " --set mc.samples=4000 --set mc.crb_samples=4000 --set mc.time_domain_samples=2000";
    EXPECT_EQ(run_cli("mc-verify --seed 7 --set mc.corrupt_analytic=1.5" + small_mc +
                      " --out " + (dir_ / "mc.csv").string()),
              1);
    EXPECT_NE(slurp(dir_ / "mc.csv").find(",0\n"), std::string::npos);
}

#endif

}  // namespace
}  // namespace qcomb
