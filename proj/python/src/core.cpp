#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "qcomb/commands.hpp"
#include "qcomb/config.hpp"
#include "qcomb/dualcomb.hpp"
#include "qcomb/errors.hpp"
#include "qcomb/gaussian.hpp"
#include "qcomb/mc_oracle.hpp"
#include "qcomb/noise_budget.hpp"
#include "qcomb/spectra.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

namespace qcomb {
namespace {

py::dict breakdown_dict(const NoiseBreakdown &b) {
    return py::dict("sigma2_nep"_a = b.sigma2_nep, "sigma2_quad"_a = b.sigma2_quad,
                    "sigma2_rin"_a = b.sigma2_rin, "snr"_a = b.snr, "snr_db"_a = b.snr_db(),
                    "a_nep"_a = b.a_nep, "a_quad"_a = b.a_quad, "a_rin"_a = b.a_rin,
                    "gamma"_a = b.gamma, "c_gamma"_a = b.c_gamma, "c_gamma2"_a = b.c_gamma2,
                    "dominant"_a = std::string(to_string(b.dominant())));
}

DualCombConfig unsqueezed(DualCombConfig cfg) {
    cfg.signal_gain = SqueezeGain::none();
    cfg.lo_gain = SqueezeGain::none();
    return cfg;
}

template <class Channel>
void bind_channel(py::module_ &m, const char *name, const char *kappa, const char *phase) {
    py::class_<Channel>(m, name)
        .def(py::init<double, double>(), py::arg(kappa) = 1.0, py::arg(phase) = 0.0)
        .def(py::init<std::vector<double>, std::vector<double>>(), py::arg(kappa), py::arg(phase))
        .def("transmissivity", &Channel::transmissivity, "line"_a)
        .def("phase", &Channel::phase, "line"_a)
        .def("__repr__", [name](const Channel &c) {
            return std::string(name) + "(" + std::to_string(c.transmissivity(1)) + ", " +
                   std::to_string(c.phase(1)) + (c.uniform() ? ")" : ", ...)");
        });
}

}  // namespace
}  // namespace qcomb

PYBIND11_MODULE(_core, m) {
    using namespace qcomb;
    m.doc() = "Squeezed dual-comb noise model, Monte-Carlo oracle and sweep tools";

    py::register_exception<DegenerateModel>(m, "DegenerateModel", PyExc_ArithmeticError);
    py::register_exception<ExtrapolationError>(m, "ExtrapolationError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    m.def(
        "joint_quadrature_variance",
        [](double gain, double theta) {
            return joint_quadrature_variance(SqueezeGain::linear(gain), theta);
        },
        "gain"_a, "theta"_a,
        "Variance of the joint quadrature of a two-mode squeezed vacuum with linear gain G at "
        "mismatch angle theta (vacuum = 1).");
    m.def("db_to_gain", [](double db) { return SqueezeGain::decibels(db).value(); }, "db"_a);
    m.def(
        "thermal_occupation",
        [](double frequency_hz, double temperature_k) {
            return thermal_occupation(frequency_hz, Environment{temperature_k, std::nullopt});
        },
        "frequency_hz"_a, "temperature_k"_a);

    py::class_<DualCombConfig>(m, "Comb")
        .def(py::init([](std::size_t lines, double signal_power_w, double lo_power_w,
                         double signal_gain, double lo_gain, double wavelength_um,
                         double acquisition_s) {
                 DualCombConfig c;
                 c.lines = lines;
                 c.signal_power_w = signal_power_w;
                 c.lo_power_w = lo_power_w;
                 c.signal_gain = SqueezeGain::linear(signal_gain);
                 c.lo_gain = SqueezeGain::linear(lo_gain);
                 c.carrier_hz = DualCombConfig::carrier_from_wavelength(wavelength_um * 1e-6);
                 c.acquisition_s = acquisition_s;
                 c.check();
                 return c;
             }),
             "lines"_a = 1, "signal_power_w"_a = 1e-4, "lo_power_w"_a = 5e-4, "signal_gain"_a = 1.0,
             "lo_gain"_a = 1.0, "wavelength_um"_a = 1.0, "acquisition_s"_a = 1.0)
        .def_readwrite("lines", &DualCombConfig::lines)
        .def_readwrite("rep_rate_hz", &DualCombConfig::rep_rate_hz)
        .def_readwrite("rep_offset_hz", &DualCombConfig::rep_offset_hz)
        .def_readwrite("carrier_hz", &DualCombConfig::carrier_hz)
        .def_readwrite("acquisition_s", &DualCombConfig::acquisition_s)
        .def_readwrite("signal_power_w", &DualCombConfig::signal_power_w)
        .def_readwrite("lo_power_w", &DualCombConfig::lo_power_w)
        .def_readwrite("signal_profile", &DualCombConfig::signal_profile)
        .def_readwrite("lo_profile", &DualCombConfig::lo_profile)
        .def_property(
            "signal_gain", [](const DualCombConfig &c) { return c.signal_gain.value(); },
            [](DualCombConfig &c, double g) { c.signal_gain = SqueezeGain::linear(g); })
        .def_property(
            "lo_gain", [](const DualCombConfig &c) { return c.lo_gain.value(); },
            [](DualCombConfig &c, double g) { c.lo_gain = SqueezeGain::linear(g); })
        .def_property_readonly("photon_energy_j", &DualCombConfig::photon_energy_j)
        .def_property_readonly("lo_ratio", &DualCombConfig::lo_ratio)
        .def("signal_photons", &DualCombConfig::signal_photons, "line"_a)
        .def("lo_photons", &DualCombConfig::lo_photons, "line"_a)
        .def("check", &DualCombConfig::check)
        .def("warnings", &DualCombConfig::warnings);

    bind_channel<SampleResponse>(m, "Sample", "transmissivity", "phase_rad");
    bind_channel<LOPath>(m, "LOPath", "transmissivity", "phase_rad");

    py::class_<Environment>(m, "Environment")
        .def(py::init<double, std::optional<double>>(), "temperature_k"_a = 0.0,
             "occupation"_a = std::nullopt)
        .def_readwrite("temperature_k", &Environment::temperature_k)
        .def_readwrite("occupation", &Environment::uniform_occupation);

    py::class_<DetectorModel>(m, "Detector")
        .def(py::init([](double nep, std::optional<double> rin_per_hz,
                         std::optional<double> rin_dbc_per_hz) {
                 if (rin_per_hz && rin_dbc_per_hz) {
                     throw InvalidArgument("give rin_per_hz or rin_dbc_per_hz, not both");
                 }
                 DetectorModel d{nep, rin_per_hz.value_or(0.0)};
                 if (rin_dbc_per_hz) {
                     d.rin_per_hz = rin_from_dbc(*rin_dbc_per_hz);
                 }
                 d.check();
                 return d;
             }),
             "nep_w_per_rthz"_a = 0.0, "rin_per_hz"_a = std::nullopt,
             "rin_dbc_per_hz"_a = std::nullopt)
        .def_readwrite("nep_w_per_rthz", &DetectorModel::nep_w_per_rthz)
        .def_readwrite("rin_per_hz", &DetectorModel::rin_per_hz);

    m.def("mean_ac_spectrum", &mean_ac_spectrum, "comb"_a, "sample"_a = SampleResponse(),
          "lo"_a = LOPath(), "line"_a = 1);
    m.def("ac_noise_variance", &ac_noise_variance, "comb"_a, "sample"_a = SampleResponse(),
          "lo"_a = LOPath(), "environment"_a = Environment{}, "line"_a = 1);
    m.def(
        "snr",
        [](const DualCombConfig &c, const SampleResponse &s, const LOPath &lo,
           const Environment &env, const DetectorModel &det, std::size_t line) {
            return breakdown_dict(snr_full(c, s, lo, env, det, line));
        },
        "comb"_a, "sample"_a = SampleResponse(), "lo"_a = LOPath(), "environment"_a = Environment{},
        "detector"_a = DetectorModel{}, "line"_a = 1,
        "Noise budget at one line: the three normalized variances and the amplitude SNR.");
    m.def(
        "quantum_advantage",
        [](const DualCombConfig &c, const SampleResponse &s, const LOPath &lo,
           const Environment &env, const DetectorModel &det, std::size_t line) {
            return quantum_advantage(c, unsqueezed(c), s, lo, env, det, line);
        },
        "comb"_a, "sample"_a = SampleResponse(), "lo"_a = LOPath(), "environment"_a = Environment{},
        "detector"_a = DetectorModel{}, "line"_a = 1,
        "10 log10 of the amplitude-SNR ratio against the same comb with both gains set to 1.");
    m.def(
        "max_advantage_over_power",
        [](const DualCombConfig &c, const SampleResponse &s, const LOPath &lo,
           const Environment &env, const DetectorModel &det, std::size_t line, double p_min,
           double p_max) {
            const auto best =
                max_advantage_over_power(c, unsqueezed(c), s, lo, env, det, line, p_min, p_max);
            return py::make_tuple(best.signal_power_w, best.advantage_db);
        },
        "comb"_a, "sample"_a = SampleResponse(), "lo"_a = LOPath(), "environment"_a = Environment{},
        "detector"_a = DetectorModel{}, "line"_a = 1, "power_min_w"_a = 1e-7,
        "power_max_w"_a = 1e-1);
    m.def(
        "saturation_thresholds",
        [](double gain, double gamma, double kappa, const DetectorModel &det, double carrier_hz) {
            const auto t =
                saturation_thresholds(SqueezeGain::linear(gain), gamma, kappa, det, carrier_hz);
            return py::make_tuple(t.nep_w, t.rin_w);
        },
        "gain"_a, "gamma"_a, "kappa"_a, "detector"_a, "carrier_hz"_a = 2.99792458e14);
    m.def(
        "classical_coefficients",
        [](double gamma) {
            const auto c = classical_coefficients(gamma);
            return py::dict("c_gamma"_a = c.c_gamma, "c_gamma2"_a = c.c_gamma2,
                            "c_gamma2_unbalanced"_a = c.c_gamma2_unbalanced);
        },
        "gamma"_a);
    m.def(
        "mmse_bounds",
        [](double snr, double kappa) {
            const auto b = mmse_bounds(snr, kappa);
            return py::make_tuple(b.sqrt_kappa, b.phase);
        },
        "snr"_a, "kappa"_a);

    m.def(
        "sample_readout",
        [](const DualCombConfig &c, std::size_t n, std::uint64_t seed, std::size_t line,
           const SampleResponse &s, const LOPath &lo, const Environment &env,
           std::optional<DetectorModel> det, bool time_domain) {
            McRun run;
            run.seed = seed;
            run.n_samples = n;
            run.config = c;
            run.sample = s;
            run.lo = lo;
            run.environment = env;
            run.detector = det;
            run.mode = time_domain ? Synthesis::time_domain : Synthesis::frequency_domain;
            Readout r;
            {
                py::gil_scoped_release release;
                r = sample_readout(run, line);
            }
            py::array_t<std::complex<double>> out(static_cast<py::ssize_t>(r.samples.size()));
            std::copy(r.samples.begin(), r.samples.end(), out.mutable_data());
            return out;
        },
        "comb"_a, "n"_a, "seed"_a = 42, "line"_a = 1, "sample"_a = SampleResponse(),
        "lo"_a = LOPath(), "environment"_a = Environment{}, "detector"_a = std::nullopt,
        "time_domain"_a = false,
        "Seeded Monte-Carlo draws of the complex heterodyne readout at one intermediate "
        "frequency.");
    m.def(
        "verification_suite",
        [](std::uint64_t seed, std::size_t n_samples, std::size_t crb_samples,
           std::size_t time_domain_samples, double tolerance_sigmas) {
            SuiteOptions options;
            options.seed = seed;
            options.n_samples = n_samples;
            options.crb_samples = crb_samples;
            options.time_domain_samples = time_domain_samples;
            options.tolerance_sigmas = tolerance_sigmas;
            std::vector<VerificationRow> rows;
            {
                py::gil_scoped_release release;
                rows = run_verification_suite(options);
            }
            py::list out;
            for (const auto &r : rows) {
                out.append(py::dict("check"_a = r.check, "config_hash"_a = r.config_hash,
                                    "analytic"_a = r.analytic, "empirical"_a = r.empirical,
                                    "z_score"_a = r.z_score, "pass"_a = r.pass));
            }
            return out;
        },
        "seed"_a = 42, "n_samples"_a = 100000, "crb_samples"_a = 10000,
        "time_domain_samples"_a = 20000, "tolerance_sigmas"_a = 3.0);

    py::class_<AbsorptionTable, std::shared_ptr<AbsorptionTable>>(m, "AbsorptionTable")
        .def(py::init<std::vector<double>, std::vector<double>>(), "wavelengths_um"_a,
             "alpha_per_um"_a)
        .def_static(
            "load",
            [](const std::filesystem::path &path, std::optional<std::string> unit) {
                std::optional<AbsorptionUnit> u;
                if (unit) {
                    u = parse_absorption_unit(*unit);
                }
                return load_absorption_table(path, u);
            },
            "path"_a, "unit"_a = std::nullopt)
        .def_static("bundled_water", [] { return load_absorption_table(bundled_water_table()); })
        .def("alpha_per_um", &AbsorptionTable::alpha_per_um, "wavelength_um"_a)
        .def_property_readonly("wavelengths_um", &AbsorptionTable::wavelengths_um)
        .def_property_readonly("alphas_per_um", &AbsorptionTable::alphas_per_um)
        .def("__len__", &AbsorptionTable::size);
    m.def(
        "water_limited_advantage",
        [](const AbsorptionTable &table, double wavelength_um, double path_length_um, double gain,
           double gamma, const Environment &env) {
            const auto w = water_limited_advantage(table, wavelength_um, path_length_um,
                                                   SqueezeGain::linear(gain), gamma, env);
            return py::dict("advantage_db"_a = w.advantage_db,
                            "transmissivity"_a = w.transmissivity, "occupation"_a = w.occupation,
                            "zero_transmission"_a = w.zero_transmission);
        },
        "table"_a, "wavelength_um"_a, "path_length_um"_a, "gain"_a, "gamma"_a = 5.0,
        "environment"_a = Environment{295.0, std::nullopt});

    m.def(
        "run_command",
        [](const std::string &command, std::optional<std::string> config,
           std::optional<std::string> preset, std::vector<std::string> set,
           std::optional<std::string> out, bool plot, std::optional<std::uint64_t> seed) {
            CommandOptions options{command, config, preset, std::move(set), out, plot, seed, {}};
            std::ostringstream stdout_text;
            std::ostringstream stderr_text;
            int code = 0;
            {
                py::gil_scoped_release release;
                code = run_command(options, stdout_text, stderr_text);
            }
            return py::make_tuple(code, stdout_text.str(), stderr_text.str());
        },
        "command"_a, "config"_a = std::nullopt, "preset"_a = std::nullopt,
        "set"_a = std::vector<std::string>{}, "out"_a = std::nullopt, "plot"_a = false,
        "seed"_a = std::nullopt,
        "Runs a CLI sub-command in-process; returns (exit_code, stdout, stderr).");
    m.def("preset_names", &preset_names);
    m.def("preset", [](const std::string &name) { return preset(name); }, "name"_a);

    m.attr("__version__") = QCOMB_VERSION;
}
