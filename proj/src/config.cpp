#include "qcomb/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "qcomb/errors.hpp"
#include "qcomb/hash.hpp"

namespace qcomb {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_ws(std::string_view s) {
    std::istringstream in{std::string(s)};
    std::vector<std::string> out;
    for (std::string token; in >> token;) {
        out.push_back(token);
    }
    return out;
}

double to_number(const std::string &text, const std::string &field, bool allow_inf = false) {
    const std::string s = trim(text);
    char *end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || std::isnan(v)) {
        throw ConfigError(field, fmt::format("'{}' is not a number", text));
    }
    if (std::isinf(v) && !allow_inf) {
        throw ConfigError(field, "must be finite");
    }
    return v;
}

std::uint64_t to_unsigned(const std::string &text, const std::string &field) {
    const std::string s = trim(text);
    char *end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (s.empty() || s.front() == '-' || end != s.c_str() + s.size() || errno == ERANGE) {
        throw ConfigError(field, fmt::format("'{}' is not a non-negative integer", text));
    }
    return v;
}

bool to_bool(const std::string &text, const std::string &field) {
    std::string s = trim(text);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "true" || s == "1" || s == "yes" || s == "on") {
        return true;
    }
    if (s == "false" || s == "0" || s == "no" || s == "off") {
        return false;
    }
    throw ConfigError(field, fmt::format("'{}' is not a boolean", text));
}

// Read-only view with typed getters that name the key on failure.
class View {
  public:
    explicit View(const KeyValues &v) : v_(v) {}

    bool has(const std::string &key) const { return v_.count(key) != 0; }

    std::optional<double> number(const std::string &key, bool allow_inf = false) const {
        const auto it = v_.find(key);
        if (it == v_.end()) {
            return std::nullopt;
        }
        return to_number(it->second, key, allow_inf);
    }

    double number_or(const std::string &key, double fallback) const {
        return number(key).value_or(fallback);
    }

    std::optional<std::uint64_t> integer(const std::string &key) const {
        const auto it = v_.find(key);
        if (it == v_.end()) {
            return std::nullopt;
        }
        return to_unsigned(it->second, key);
    }

    bool flag(const std::string &key) const {
        const auto it = v_.find(key);
        return it != v_.end() && to_bool(it->second, key);
    }

    std::optional<std::string> text(const std::string &key) const {
        const auto it = v_.find(key);
        if (it == v_.end()) {
            return std::nullopt;
        }
        return trim(it->second);
    }

    void exclusive(const std::string &a, const std::string &b) const {
        if (has(a) && has(b)) {
            throw ConfigError(b, fmt::format("conflicts with {}", a));
        }
    }

  private:
    const KeyValues &v_;
};

SqueezeGain gain_from_db(const View &view, const std::string &key) {
    const double db = *view.number(key, true);
    if (!(db >= 0.0)) {
        throw ConfigError(key, "squeezing gain must be >= 0 dB");
    }
    return std::isinf(db) ? SqueezeGain::linear(db) : SqueezeGain::decibels(db);
}

const std::set<std::string> &sweepable_keys() {
    static const std::set<std::string> keys = {
        "comb.lines",           "comb.rep_rate_hz",        "comb.rep_offset_hz",
        "comb.wavelength_um",   "comb.carrier_hz",         "comb.acquisition_s",
        "comb.signal_power_w",  "comb.lo_power_w",         "comb.lo_ratio",
        "comb.total_power_w",   "comb.signal_share",       "comb.gain_db",
        "comb.signal_gain_db",  "comb.lo_gain_db",         "sample.transmissivity",
        "sample.phase_rad",     "lo.transmissivity",       "lo.phase_rad",
        "environment.temperature_k", "environment.occupation", "detector.nep_w_per_rthz",
        "detector.rin_dbc_per_hz",   "detector.rin_per_hz",    "water.path_length_um",
    };
    return keys;
}

bool is_axis_key(const std::string &key) {
    return key.size() == std::string("sweep.axis").size() + 1 && key.rfind("sweep.axis", 0) == 0 &&
           std::isdigit(static_cast<unsigned char>(key.back()));
}

}  // namespace

ConfigError::ConfigError(std::string field, const std::string &message)
    : std::runtime_error(field.empty() ? message : field + ": " + message),
      field_(std::move(field)) {}

const std::map<std::string, std::string> &known_keys() {
    static const std::map<std::string, std::string> keys = {
        {"preset", "base preset applied before the file (top level only)"},
        {"comb.lines", "number of comb lines N"},
        {"comb.rep_rate_hz", "repetition rate f_r [Hz]"},
        {"comb.rep_offset_hz", "repetition-rate difference [Hz]"},
        {"comb.wavelength_um", "carrier wavelength [um]"},
        {"comb.carrier_hz", "carrier frequency [Hz]"},
        {"comb.acquisition_s", "acquisition time T [s]"},
        {"comb.signal_power_w", "signal comb power [W]"},
        {"comb.lo_power_w", "LO comb power [W]"},
        {"comb.lo_ratio", "LO/signal power ratio gamma"},
        {"comb.total_power_w", "total power shared by both combs [W]"},
        {"comb.signal_share", "signal fraction of total_power_w (default 0.5)"},
        {"comb.gain_db", "squeezing gain of both combs [dB, 10 log10 G]"},
        {"comb.signal_gain_db", "signal squeezing gain [dB, 10 log10 G]"},
        {"comb.lo_gain_db", "LO squeezing gain [dB, 10 log10 G]"},
        {"sample.transmissivity", "sample power transmissivity kappa"},
        {"sample.phase_rad", "sample phase alpha [rad]"},
        {"lo.transmissivity", "LO path transmissivity eta"},
        {"lo.phase_rad", "LO path phase beta [rad]"},
        {"lo.follow_sample", "LO path copies the sample transmissivity (eta = kappa)"},
        {"environment.temperature_k", "environment temperature [K]"},
        {"environment.occupation", "fixed thermal occupation for every line"},
        {"environment.occupation_at_carrier", "use the carrier-frequency occupation for every line"},
        {"detector.nep_w_per_rthz", "noise-equivalent power [W/sqrt(Hz)]"},
        {"detector.rin_dbc_per_hz", "relative intensity noise [dBc/Hz]"},
        {"detector.rin_per_hz", "relative intensity noise, linear [1/Hz]"},
        {"sweep.axis1", "first (outer) sweep axis"},
        {"sweep.axis2", "second (inner) sweep axis"},
        {"water.absorption", "absorption table path, or 'bundled'"},
        {"water.units", "expected table unit: per_um, per_cm or per_m"},
        {"water.path_length_um", "sample path length L [um]"},
        {"mc.samples", "Monte-Carlo samples per variance check"},
        {"mc.seed", "random seed"},
        {"mc.tolerance_sigmas", "pass threshold in standard errors"},
        {"mc.corrupt_analytic", "test hook: multiply analytic references by this factor"},
        {"mc.time_domain_samples", "samples for the time-domain check"},
        {"mc.crb_samples", "samples for the estimator checks"},
        {"eval.line", "evaluated comb line m"},
        {"eval.power_min_w", "lower bound of the optimal-power search [W]"},
        {"eval.power_max_w", "upper bound of the optimal-power search [W]"},
        {"output.path", "CSV output path"},
        {"output.plot", "also write an SVG next to the CSV"},
    };
    return keys;
}

KeyValues parse_config(std::istream &in, const std::string &source) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error &e) {
        throw ParseError(fmt::format("{}:{}: {}", source, e.line(), e.message()), e.line());
    }
    KeyValues out;
    for (const auto &[name, node] : tree) {
        if (node.empty()) {
            out[name] = node.data();
            continue;
        }
        for (const auto &[key, leaf] : node) {
            out[name + "." + key] = leaf.data();
        }
    }
    return out;
}

KeyValues load_config(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("--config", fmt::format("cannot open '{}'", path.string()));
    }
    return parse_config(in, path.string());
}

std::vector<std::string> preset_names() { return {"fig1c", "fig3", "fig4", "fig5"}; }

KeyValues preset(std::string_view name) {
    const KeyValues fig1c_base = {
        {"comb.lines", "100000"},
        {"comb.wavelength_um", "1.0"},
        {"comb.acquisition_s", "1"},
        {"comb.lo_ratio", "5"},
        {"detector.nep_w_per_rthz", "5e-13"},
        {"detector.rin_dbc_per_hz", "-170"},
    };
    if (name == "fig1c") {
        KeyValues v = fig1c_base;
        v["comb.signal_power_w"] = "1e-4";
        v["sweep.axis1"] = "comb.gain_db list 0 10 20 30";
        v["sweep.axis2"] = "comb.signal_power_w log 1e-7 1e-1 200";
        return v;
    }
    if (name == "fig3") {
        KeyValues v = fig1c_base;
        v["comb.signal_power_w"] = "1e-4";
        v["comb.signal_gain_db"] = "10";
        v["comb.lo_gain_db"] = "0";
        v.erase("detector.nep_w_per_rthz");
        v.erase("detector.rin_dbc_per_hz");
        v["sweep.axis1"] = "comb.lo_ratio log 1e-2 1e2 101";
        v["sweep.axis2"] = "sample.transmissivity lin 0.01 1 100";
        return v;
    }
    if (name == "fig4") {
        KeyValues v = fig1c_base;
        v.erase("comb.lo_ratio");
        v["comb.total_power_w"] = "1e-3";
        v["comb.gain_db"] = "10";
        v["sample.transmissivity"] = "0.5";
        v["lo.follow_sample"] = "true";
        v["sweep.axis1"] = "comb.signal_share lin 0.005 0.995 101";
        return v;
    }
    if (name == "fig5") {
        return {
            {"comb.lines", "1"},
            {"comb.wavelength_um", "1.0"},
            {"comb.signal_power_w", "1e-4"},
            {"comb.lo_ratio", "5"},
            {"comb.gain_db", "10"},
            {"environment.temperature_k", "295"},
            {"environment.occupation_at_carrier", "true"},
            {"water.absorption", "bundled"},
            {"water.path_length_um", "15"},
            {"sweep.axis1", "comb.wavelength_um log 0.4 10 120"},
            {"sweep.axis2", "comb.gain_db lin 0 30 16"},
        };
    }
    throw ConfigError("preset", fmt::format("unknown preset '{}' (available: fig1c, fig3, fig4, fig5)",
                                            name));
}

void layer(KeyValues &base, const KeyValues &overrides) {
    for (const auto &[key, value] : overrides) {
        if (trim(value).empty()) {
            base.erase(key);
        } else {
            base[key] = value;
        }
    }
}

std::pair<std::string, std::string> parse_assignment(std::string_view text) {
    const auto eq = text.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw ConfigError("--set", fmt::format("expected key=value, got '{}'", text));
    }
    return {trim(text.substr(0, eq)), trim(text.substr(eq + 1))};
}

SweepAxis parse_axis(std::string_view text, const std::string &field) {
    const auto tokens = split_ws(text);
    if (tokens.size() < 3) {
        throw ConfigError(field, "expected '<key> lin|log <start> <stop> <count>' or '<key> list <values...>'");
    }
    SweepAxis axis{tokens[0], tokens[1], {}};
    if (!sweepable_keys().count(axis.key)) {
        throw ConfigError(field, fmt::format("'{}' is not a sweepable numeric key", axis.key));
    }
    if (axis.spacing == "list") {
        for (std::size_t i = 2; i < tokens.size(); ++i) {
            axis.values.push_back(to_number(tokens[i], field, true));
        }
        return axis;
    }
    if (axis.spacing != "lin" && axis.spacing != "log") {
        throw ConfigError(field, fmt::format("unknown spacing '{}' (lin, log or list)", axis.spacing));
    }
    if (tokens.size() != 5) {
        throw ConfigError(field, fmt::format("{} axis needs <start> <stop> <count>", axis.spacing));
    }
    const double start = to_number(tokens[2], field);
    const double stop = to_number(tokens[3], field);
    const std::uint64_t count = to_unsigned(tokens[4], field);
    if (count < 2 || start == stop) {
        throw ConfigError(field, "degenerate range: need count >= 2 and start != stop");
    }
    if (axis.spacing == "log" && !(start > 0.0 && stop > 0.0)) {
        throw ConfigError(field, "log axis needs positive bounds");
    }
    axis.values.resize(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(count - 1);
        axis.values[i] = axis.spacing == "lin"
                             ? start + t * (stop - start)
                             : std::exp(std::log(start) + t * (std::log(stop) - std::log(start)));
    }
    // Pin the endpoints exactly.
    axis.values.front() = start;
    axis.values.back() = stop;
    return axis;
}

RunConfig::RunConfig(KeyValues values) : values_(std::move(values)) {
    const auto &known = known_keys();
    std::vector<std::string> axis_keys;
    for (const auto &[key, value] : values_) {
        if (is_axis_key(key)) {
            axis_keys.push_back(key);
            continue;
        }
        if (!known.count(key)) {
            throw ConfigError(key, "unknown key");
        }
    }
    if (axis_keys.size() > 2) {
        throw InvalidArgument(fmt::format("at most two sweep axes are supported, got {}",
                                          axis_keys.size()));
    }
    for (const auto &key : axis_keys) {
        if (key != "sweep.axis1" && key != "sweep.axis2") {
            throw ConfigError(key, "sweep axes are named sweep.axis1 and sweep.axis2");
        }
    }
    if (values_.count("sweep.axis2") && !values_.count("sweep.axis1")) {
        throw ConfigError("sweep.axis2", "requires sweep.axis1");
    }
    for (const auto &key : {"sweep.axis1", "sweep.axis2"}) {
        if (values_.count(key)) {
            axes_.push_back(parse_axis(values_.at(key), key));
        }
    }
    if (axes_.size() == 2 && axes_[0].key == axes_[1].key) {
        throw ConfigError("sweep.axis2", fmt::format("duplicates axis '{}'", axes_[0].key));
    }

    const View view(values_);
    if (auto path = view.text("water.absorption")) {
        std::optional<AbsorptionUnit> unit;
        if (auto u = view.text("water.units")) {
            try {
                unit = parse_absorption_unit(*u);
            } catch (const InvalidArgument &e) {
                throw ConfigError("water.units", e.what());
            }
        }
        const std::filesystem::path file =
            *path == "bundled" ? bundled_water_table() : std::filesystem::path(*path);
        water_ = WaterSettings{std::make_shared<const AbsorptionTable>(load_absorption_table(file, unit)),
                               view.number_or("water.path_length_um", 15.0)};
    } else {
        for (const auto &key : {"water.units", "water.path_length_um"}) {
            if (view.has(key)) {
                throw ConfigError(key, "requires water.absorption");
            }
        }
    }

    if (auto seed = view.integer("mc.seed")) {
        mc_.seed = *seed;
    }
    const auto samples = [&](const std::string &key, std::size_t &slot) {
        if (auto n = view.integer(key)) {
            if (*n < 100) {
                throw ConfigError(key, "need at least 100 samples");
            }
            slot = *n;
        }
    };
    samples("mc.samples", mc_.samples);
    samples("mc.crb_samples", mc_.crb_samples);
    samples("mc.time_domain_samples", mc_.time_domain_samples);
    mc_.tolerance_sigmas = view.number_or("mc.tolerance_sigmas", mc_.tolerance_sigmas);
    if (!(mc_.tolerance_sigmas > 0.0)) {
        throw ConfigError("mc.tolerance_sigmas", "must be > 0");
    }
    mc_.analytic_scale = view.number_or("mc.corrupt_analytic", 1.0);

    power_min_w_ = view.number_or("eval.power_min_w", power_min_w_);
    power_max_w_ = view.number_or("eval.power_max_w", power_max_w_);
    if (!(power_min_w_ > 0.0 && power_max_w_ > power_min_w_)) {
        throw ConfigError("eval.power_max_w", "need 0 < power_min_w < power_max_w");
    }
    output_path_ = view.text("output.path");
    plot_ = view.flag("output.plot");

    model_ = build(values_);
}

Model RunConfig::model_with(const std::vector<std::pair<std::string, double>> &overrides) const {
    if (overrides.empty()) {
        return model_;
    }
    KeyValues v = values_;
    for (const auto &[key, value] : overrides) {
        v[key] = fmt::format("{:.17g}", value);
    }
    return build(v);
}

Model RunConfig::build(const KeyValues &values) const {
    const View view(values);
    Model m;
    auto &c = m.comb;

    if (auto n = view.integer("comb.lines")) {
        if (*n < 1) {
            throw ConfigError("comb.lines", "need at least one line");
        }
        c.lines = *n;
    }
    c.rep_rate_hz = view.number_or("comb.rep_rate_hz", c.rep_rate_hz);
    c.rep_offset_hz = view.number_or("comb.rep_offset_hz", c.rep_offset_hz);
    view.exclusive("comb.wavelength_um", "comb.carrier_hz");
    if (auto wl = view.number("comb.wavelength_um")) {
        if (!(*wl > 0.0)) {
            throw ConfigError("comb.wavelength_um", "must be > 0");
        }
        c.carrier_hz = DualCombConfig::carrier_from_wavelength(*wl * 1e-6);
    }
    c.carrier_hz = view.number_or("comb.carrier_hz", c.carrier_hz);
    c.acquisition_s = view.number_or("comb.acquisition_s", c.acquisition_s);

    // Power allocation: signal power plus exactly one way of fixing the LO.
    if (view.has("comb.total_power_w")) {
        for (const auto &key : {"comb.signal_power_w", "comb.lo_power_w", "comb.lo_ratio"}) {
            view.exclusive("comb.total_power_w", key);
        }
        const double total = *view.number("comb.total_power_w");
        const double share = view.number_or("comb.signal_share", 0.5);
        if (!(share > 0.0 && share < 1.0)) {
            throw ConfigError("comb.signal_share", "must lie in (0, 1)");
        }
        c.signal_power_w = share * total;
        c.lo_power_w = (1.0 - share) * total;
    } else {
        if (view.has("comb.signal_share")) {
            throw ConfigError("comb.signal_share", "requires comb.total_power_w");
        }
        view.exclusive("comb.lo_power_w", "comb.lo_ratio");
        c.signal_power_w = view.number_or("comb.signal_power_w", c.signal_power_w);
        if (auto p = view.number("comb.lo_power_w")) {
            c.lo_power_w = *p;
        } else {
            const double ratio = view.number_or("comb.lo_ratio", 5.0);
            if (!(ratio >= 0.0)) {
                throw ConfigError("comb.lo_ratio", "must be >= 0");
            }
            c.lo_power_w = ratio * c.signal_power_w;
        }
    }

    view.exclusive("comb.gain_db", "comb.signal_gain_db");
    view.exclusive("comb.gain_db", "comb.lo_gain_db");
    if (view.has("comb.gain_db")) {
        c.signal_gain = c.lo_gain = gain_from_db(view, "comb.gain_db");
    }
    if (view.has("comb.signal_gain_db")) {
        c.signal_gain = gain_from_db(view, "comb.signal_gain_db");
    }
    if (view.has("comb.lo_gain_db")) {
        c.lo_gain = gain_from_db(view, "comb.lo_gain_db");
    }

    double kappa = view.number_or("sample.transmissivity", 1.0);
    if (water_) {
        view.exclusive("water.absorption", "sample.transmissivity");
        const double wl_um = c.wavelength_m() * 1e6;
        m.path_length_um = view.number_or("water.path_length_um", water_->path_length_um);
        try {
            kappa = transmissivity(*water_->table, wl_um, *m.path_length_um);
            m.alpha_per_um = water_->table->alpha_per_um(wl_um);
        } catch (const ExtrapolationError &e) {
            throw ConfigError("comb.wavelength_um", e.what());
        } catch (const InvalidArgument &e) {
            throw ConfigError("water.path_length_um", e.what());
        }
    }
    try {
        m.sample = SampleResponse(kappa, view.number_or("sample.phase_rad", 0.0));
    } catch (const InvalidArgument &e) {
        throw ConfigError("sample.transmissivity", e.what());
    }

    view.exclusive("lo.follow_sample", "lo.transmissivity");
    const double eta = view.flag("lo.follow_sample") ? kappa : view.number_or("lo.transmissivity", 1.0);
    try {
        m.lo = LOPath(eta, view.number_or("lo.phase_rad", 0.0));
    } catch (const InvalidArgument &e) {
        throw ConfigError("lo.transmissivity", e.what());
    }

    m.environment.temperature_k = view.number_or("environment.temperature_k", 0.0);
    if (!(m.environment.temperature_k >= 0.0)) {
        throw ConfigError("environment.temperature_k", "must be >= 0");
    }
    view.exclusive("environment.occupation", "environment.occupation_at_carrier");
    if (auto occ = view.number("environment.occupation")) {
        if (!(*occ >= 0.0)) {
            throw ConfigError("environment.occupation", "must be >= 0");
        }
        m.environment.uniform_occupation = *occ;
    } else if (view.flag("environment.occupation_at_carrier")) {
        m.environment.uniform_occupation = thermal_occupation(c.carrier_hz, m.environment);
    }

    view.exclusive("detector.rin_dbc_per_hz", "detector.rin_per_hz");
    m.detector.nep_w_per_rthz = view.number_or("detector.nep_w_per_rthz", 0.0);
    if (auto dbc = view.number("detector.rin_dbc_per_hz", true)) {
        if (std::isinf(*dbc) && *dbc > 0.0) {
            throw ConfigError("detector.rin_dbc_per_hz", "must be finite or -inf");
        }
        m.detector.rin_per_hz = rin_from_dbc(*dbc);
    }
    m.detector.rin_per_hz = view.number_or("detector.rin_per_hz", m.detector.rin_per_hz);

    if (auto line = view.integer("eval.line")) {
        m.line = *line;
    }
    if (m.line < 1 || m.line > c.lines) {
        throw ConfigError("eval.line", fmt::format("must lie in [1, {}]", c.lines));
    }

    try {
        c.check();
        m.sample.check(c.lines);
        m.lo.check(c.lines);
        m.detector.check();
    } catch (const InvalidArgument &e) {
        throw ConfigError("", e.what());
    }
    return m;
}

std::string RunConfig::hash() const {
    std::string canonical;
    for (const auto &[key, value] : values_) {
        if (key.rfind("output.", 0) == 0) {
            continue;
        }
        canonical += key + "=" + trim(value) + "\n";
    }
    return fingerprint(canonical);
}

std::vector<std::string> RunConfig::echo() const {
    std::vector<std::string> out;
    for (const auto &[key, value] : values_) {
        if (key.rfind("output.", 0) != 0) {
            out.push_back(key + " = " + trim(value));
        }
    }
    return out;
}

}  // namespace qcomb
