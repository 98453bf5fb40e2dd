#include "mgsim/config.hpp"

#include <array>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace mgsim {

namespace {

// clang-format off
constexpr SchemaEntry kSchema[] = {
    // electrical plant
    {"plant.l_g",        KeyType::F64, "0.0022",  "output filter inductance, H"},
    {"plant.c_g",        KeyType::F64, "1e-05",   "output filter capacitance, F"},
    {"plant.r_f",        KeyType::F64, "0.1",     "filter series resistance, ohm"},
    {"plant.l_line",     KeyType::F64, "0.0022",  "line inductance to the PCC, H"},
    {"plant.r_line",     KeyType::F64, "0.05",    "line resistance, ohm"},
    {"plant.r_load",     KeyType::F64, "79.35",   "per-phase load resistance at the PCC, ohm"},
    {"plant.v_dc",       KeyType::F64, "700",     "DC link voltage, V"},
    {"plant.dt",         KeyType::F64, "1e-05",   "plant integration step, s"},
    // constant-current device at the PCC
    {"gfli.tau",         KeyType::F64, "0.02",    "current tracking time constant, s"},
    {"gfli.i_d",         KeyType::F64, "0",       "active-axis current reference, A"},
    {"gfli.i_q",         KeyType::F64, "0",       "reactive-axis current reference, A (positive loads the island inductively)"},
    // controller
    {"ctrl.dt",          KeyType::F64, "5e-05",   "control period, s"},
    {"ctrl.k_pvd",       KeyType::F64, "0.187",   "voltage loop d-axis proportional gain"},
    {"ctrl.k_ivd",       KeyType::F64, "0.5",     "voltage loop d-axis integral gain"},
    {"ctrl.k_pvq",       KeyType::F64, "0.52",    "voltage loop q-axis proportional gain"},
    {"ctrl.k_ivq",       KeyType::F64, "1.16",    "voltage loop q-axis integral gain"},
    {"ctrl.k_pid",       KeyType::F64, "6.25",    "current loop d-axis proportional gain"},
    {"ctrl.k_iid",       KeyType::F64, "55",      "current loop d-axis integral gain"},
    {"ctrl.k_piq",       KeyType::F64, "1",       "current loop q-axis proportional gain"},
    {"ctrl.k_iiq",       KeyType::F64, "10",      "current loop q-axis integral gain"},
    {"ctrl.k_drp",       KeyType::F64, "2e-04",   "frequency droop slope, rad/s per W"},
    {"ctrl.k_drq",       KeyType::F64, "0.001",   "voltage droop slope, V per VAr"},
    {"ctrl.f_star",      KeyType::F64, "50",      "nominal frequency, Hz"},
    {"ctrl.v_rms_star",  KeyType::F64, "230",     "nominal phase voltage, V rms"},
    {"ctrl.k_pw",        KeyType::F64, "0.8",     "sync frequency correction proportional gain"},
    {"ctrl.k_iw",        KeyType::F64, "0.8",     "sync frequency correction integral gain"},
    {"ctrl.k_pv",        KeyType::F64, "0.02",    "sync magnitude correction proportional gain"},
    {"ctrl.k_iv",        KeyType::F64, "0.3",     "sync magnitude correction integral gain"},
    {"ctrl.k_fb",        KeyType::F64, "0.7",     "relay feedback gain decaying corrections after connection"},
    {"ctrl.f_c_pq",      KeyType::F64, "10",      "P/Q measurement low-pass cutoff, Hz"},
    {"ctrl.f_c_vfil",    KeyType::F64, "10",      "grid magnitude low-pass cutoff, Hz"},
    {"ctrl.l_v1",        KeyType::F64, "0",       "virtual output inductance, inverter 1, H"},
    {"ctrl.l_v2",        KeyType::F64, "0",       "virtual output inductance, inverter 2, H"},
    {"ctrl.vi_negate",   KeyType::Bool, "false",  "flip the sign of the virtual impedance drop"},
    {"ctrl.vi_line_current", KeyType::Bool, "true", "virtual impedance uses line current (false: inverter-side current)"},
    {"ctrl.v_int_limit", KeyType::F64, "200",     "voltage loop integrator contribution bound, A"},
    {"ctrl.i_int_limit", KeyType::F64, "700",     "current loop integrator contribution bound, V"},
    {"ctrl.sync_w_int_limit", KeyType::F64, "50", "sync frequency integrator bound, rad/s"},
    {"ctrl.sync_v_int_limit", KeyType::F64, "50", "sync magnitude integrator bound, V"},
    {"ctrl.p_star1",     KeyType::F64, "0",       "active power setpoint, inverter 1, W"},
    {"ctrl.q_star1",     KeyType::F64, "0",       "reactive power setpoint, inverter 1, VAr"},
    {"ctrl.p_star2",     KeyType::F64, "0",       "active power setpoint, inverter 2, W"},
    {"ctrl.q_star2",     KeyType::F64, "0",       "reactive power setpoint, inverter 2, VAr"},
    // synchronization criteria
    {"sync.eps_theta",   KeyType::F64, "2",       "phase-match bound on grid v_q in the local frame, V"},
    {"sync.eps_v",       KeyType::F64, "2",       "magnitude-match bound, V"},
    {"sync.t_hold",      KeyType::F64, "0.5",     "continuous time both bounds must hold before closing, s"},
    {"sync.timeout",     KeyType::F64, "30",      "sync attempt timeout, s"},
    // reactive sharing correction
    {"qshare.enabled",   KeyType::Bool, "false",  "sharing correction active from t = 0"},
    {"qshare.k_iq",      KeyType::F64, "0.003",   "correction integral gain, V per VAr-second"},
    {"qshare.rho1",      KeyType::F64, "0.5",     "share weight, inverter 1"},
    {"qshare.rho2",      KeyType::F64, "0.5",     "share weight, inverter 2"},
    {"qshare.q_star1",   KeyType::F64, "0",       "sharing reactive setpoint, inverter 1, VAr"},
    {"qshare.q_star2",   KeyType::F64, "0",       "sharing reactive setpoint, inverter 2, VAr"},
    {"qshare.clamp",     KeyType::F64, "30",      "correction voltage bound, V"},
    {"qshare.ramp_rate", KeyType::F64, "10",      "ramp-out slew rate on disable, V/s"},
    {"qshare.use_local_q", KeyType::Bool, "false", "correction uses live measured Q (true) or the last published value (false)"},
    // message channel (per direction)
    {"chan.rate_hz",     KeyType::F64, "5",       "message emission rate, Hz"},
    {"chan.delay_s",     KeyType::F64, "0",       "one-way delivery delay, s"},
    {"chan.jitter_s",    KeyType::F64, "0",       "uniform +- delay jitter, s"},
    {"chan.loss_prob",   KeyType::F64, "0",       "independent message loss probability"},
    // scenario shape
    {"scenario.preset",  KeyType::Str, "",        "preset this configuration was derived from"},
    {"scenario.t_end",   KeyType::F64, "6",       "simulated duration, s"},
    {"scenario.softstart", KeyType::F64, "0.25",  "voltage/current reference ramp-in time, s"},
    {"scenario.t_event", KeyType::F64, "-1",      "reactive load step time, s (negative: no step)"},
    {"scenario.iq_post", KeyType::F64, "0",       "gfli.i_q applied at the step, A"},
    {"scenario.qshare_on_t", KeyType::F64, "-1",  "time the sharing correction is switched on, s (negative: per qshare.enabled)"},
    {"scenario.sync_start_t", KeyType::F64, "-1", "time inverter 2 starts synchronizing, s (negative: starts connected)"},
    {"scenario.theta0_2", KeyType::F64, "0",      "initial phase of inverter 2, rad"},
    {"scenario.delta_v0_2", KeyType::F64, "0",    "initial magnitude correction preload of inverter 2, V"},
    {"scenario.breaker2_closed", KeyType::Bool, "true", "inverter 2 breaker closed at t = 0"},
    // run control
    {"run.seed",         KeyType::U64, "1",       "master seed; channel and noise streams derive from it"},
    {"run.decimation",   KeyType::I64, "20",      "control periods per emitted sample"},
    {"run.divergence_bound", KeyType::F64, "1e+06", "any state beyond this aborts the run as diverged"},
    {"run.noise_enabled", KeyType::Bool, "false", "add Gaussian measurement noise"},
    {"run.noise_stddev", KeyType::F64, "0",       "measurement noise standard deviation"},
    // metric thresholds
    {"metrics.restore_threshold", KeyType::F64, "20", "sharing restored when |Q1-Q2| falls below this, VAr"},
    {"metrics.restore_hold", KeyType::F64, "0.2", "time below threshold required, s"},
    {"metrics.window",   KeyType::F64, "1",       "final averaging window for settled values, s"},
    {"metrics.class_band_floor", KeyType::F64, "10", "settling band floor for behaviour classification, VAr"},
    {"metrics.class_band_frac", KeyType::F64, "0.02", "settling band as a fraction of the post-event peak"},
    {"metrics.peak_window", KeyType::F64, "1",    "window after the event that defines the initial peak, s"},
    {"metrics.unstable_factor", KeyType::F64, "4", "late excursion beyond factor*peak classifies Unstable"},
    {"metrics.stable_dq", KeyType::F64, "20",     "residual |Q1-Q2| bound for Stable, VAr"},
    {"metrics.degraded_dq", KeyType::F64, "200",  "residual |Q1-Q2| bound beyond which the run is Failed, VAr"},
    {"metrics.stable_dv", KeyType::F64, "2",      "PCC voltage deviation bound for Stable, V"},
    {"metrics.degraded_dv", KeyType::F64, "10",   "PCC voltage deviation beyond which the run is Failed, V"},
    {"metrics.osc_dq_ptp", KeyType::F64, "20",    "final-window |Q1-Q2| peak-to-peak marking persistent oscillation, VAr"},
    {"metrics.osc_dv_ptp", KeyType::F64, "2",     "final-window PCC voltage peak-to-peak marking persistent oscillation, V"},
    // sweep shape
    {"sweep.axis1_key",  KeyType::Str, "",        "config key swept on the first axis"},
    {"sweep.axis1_values", KeyType::Str, "",      "comma-separated values for the first axis"},
    {"sweep.axis2_key",  KeyType::Str, "",        "config key swept on the second axis"},
    {"sweep.axis2_values", KeyType::Str, "",      "comma-separated values for the second axis"},
    {"sweep.jobs",       KeyType::I64, "0",       "worker threads for sweeps (0: hardware concurrency)"},
};
// clang-format on

std::string canonical_f64(double v) { return Config::format_f64(v); }

bool parse_bool(const std::string& s, bool& out) {
    if (s == "true") {
        out = true;
        return true;
    }
    if (s == "false") {
        out = false;
        return true;
    }
    return false;
}

const char* type_name(KeyType t) {
    switch (t) {
        case KeyType::F64: return "float";
        case KeyType::I64: return "integer";
        case KeyType::U64: return "unsigned integer";
        case KeyType::Bool: return "bool";
        case KeyType::Str: return "string";
    }
    return "?";
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::string Config::format_f64(double v) {
    std::array<char, 64> buf;
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    (void)ec;
    return std::string(buf.data(), p);
}

Config::Config() {
    for (const auto& e : kSchema) values_[e.key] = e.def;
}

std::span<const SchemaEntry> Config::schema() { return kSchema; }

const SchemaEntry& Config::entry(const std::string& key) const {
    for (const auto& e : kSchema)
        if (key == e.key) return e;
    throw ConfigError("unknown configuration key '" + key + "'");
}

void Config::set(const std::string& key, const std::string& value, const std::string& context) {
    const SchemaEntry* ent = nullptr;
    for (const auto& e : kSchema)
        if (key == e.key) {
            ent = &e;
            break;
        }
    if (!ent) throw ConfigError(context + "unknown configuration key '" + key + "'");

    const std::string v = trim(value);
    std::string canon;
    switch (ent->type) {
        case KeyType::F64: {
            char* end = nullptr;
            const double d = std::strtod(v.c_str(), &end);
            if (v.empty() || end != v.c_str() + v.size())
                throw ConfigError(context + "key '" + key + "' expects a number, got '" + v + "'");
            canon = canonical_f64(d);
            break;
        }
        case KeyType::I64: {
            std::int64_t x = 0;
            auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
            if (ec != std::errc{} || p != v.data() + v.size())
                throw ConfigError(context + "key '" + key + "' expects an integer, got '" + v + "'");
            canon = std::to_string(x);
            break;
        }
        case KeyType::U64: {
            std::uint64_t x = 0;
            auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
            if (ec != std::errc{} || p != v.data() + v.size())
                throw ConfigError(context + "key '" + key + "' expects an unsigned integer, got '" + v + "'");
            canon = std::to_string(x);
            break;
        }
        case KeyType::Bool: {
            bool b = false;
            if (!parse_bool(v, b))
                throw ConfigError(context + "key '" + key + "' expects true/false, got '" + v + "'");
            canon = b ? "true" : "false";
            break;
        }
        case KeyType::Str:
            canon = v;
            break;
    }
    values_[key] = canon;
}

void Config::set_kv(const std::string& kv) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override '" + kv + "' is not of the form key=value");
    set(trim(kv.substr(0, eq)), kv.substr(eq + 1), "override: ");
}

Config Config::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
    Config cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
        cfg.set(trim(t.substr(0, eq)), t.substr(eq + 1),
                path + ":" + std::to_string(lineno) + ": ");
    }
    return cfg;
}

std::string Config::serialize() const {
    std::ostringstream out;
    for (const auto& e : kSchema) out << e.key << " = " << values_.at(e.key) << "\n";
    return out.str();
}

void Config::save_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write configuration file '" + path + "'");
    out << serialize();
}

namespace {

void require_type(const SchemaEntry& e, KeyType want) {
    if (e.type != want)
        throw ConfigError(std::string("key '") + e.key + "' is " + type_name(e.type) +
                          ", read as " + type_name(want));
}

}  // namespace

double Config::get_f64(const std::string& key) const {
    require_type(entry(key), KeyType::F64);
    return std::strtod(values_.at(key).c_str(), nullptr);
}

std::int64_t Config::get_i64(const std::string& key) const {
    require_type(entry(key), KeyType::I64);
    return std::strtoll(values_.at(key).c_str(), nullptr, 10);
}

std::uint64_t Config::get_u64(const std::string& key) const {
    require_type(entry(key), KeyType::U64);
    return std::strtoull(values_.at(key).c_str(), nullptr, 10);
}

bool Config::get_bool(const std::string& key) const {
    require_type(entry(key), KeyType::Bool);
    return values_.at(key) == "true";
}

const std::string& Config::get_str(const std::string& key) const {
    require_type(entry(key), KeyType::Str);
    return values_.at(key);
}

bool Config::is_default(const std::string& key) const {
    return values_.at(key) == entry(key).def;
}

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    if (trim(text).empty()) return out;
    std::string cur;
    std::istringstream in(text);
    while (std::getline(in, cur, ',')) {
        const std::string t = trim(cur);
        if (t.empty()) throw ConfigError(what + ": empty item in list '" + text + "'");
        char* end = nullptr;
        const double d = std::strtod(t.c_str(), &end);
        if (end != t.c_str() + t.size())
            throw ConfigError(what + ": '" + t + "' is not a number");
        out.push_back(d);
    }
    return out;
}

}  // namespace mgsim
