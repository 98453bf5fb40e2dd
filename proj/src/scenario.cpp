#include "mgsim/scenario.hpp"

#include <cmath>

#include "mgsim/rng.hpp"

namespace mgsim {

void MetricsConfig::validate() const {
    if (!(restore_threshold > 0.0)) throw ConfigError("metrics.restore_threshold must be positive");
    if (!(restore_hold > 0.0)) throw ConfigError("metrics.restore_hold must be positive");
    if (!(window > 0.0)) throw ConfigError("metrics.window must be positive");
    if (!(class_band_floor > 0.0)) throw ConfigError("metrics.class_band_floor must be positive");
    if (!(class_band_frac > 0.0)) throw ConfigError("metrics.class_band_frac must be positive");
    if (!(peak_window > 0.0)) throw ConfigError("metrics.peak_window must be positive");
    if (!(unstable_factor > 1.0)) throw ConfigError("metrics.unstable_factor must exceed 1");
    if (!(stable_dq < degraded_dq))
        throw ConfigError("metrics.stable_dq must be below metrics.degraded_dq");
    if (!(stable_dv < degraded_dv))
        throw ConfigError("metrics.stable_dv must be below metrics.degraded_dv");
}

void Scenario::validate() const {
    plant.validate();
    gfli.validate();
    sync.validate();
    qshare.validate();
    chan_12.validate();
    chan_21.validate();
    metrics.validate();
    for (const auto& g : gains) g.validate(dt_ctrl);

    if (!(dt_ctrl > 0.0)) throw ConfigError("ctrl.dt must be positive");
    const double ratio = dt_ctrl / plant.dt;
    if (std::fabs(ratio - std::round(ratio)) > 1e-9 || ratio < 1.0 - 1e-9)
        throw ConfigError("ctrl.dt must be an integer multiple of plant.dt");
    if (!(t_end > 0.0)) throw ConfigError("scenario.t_end must be positive");
    if (!(softstart >= 0.0)) throw ConfigError("scenario.softstart must be >= 0");
    if (decimation < 1) throw ConfigError("run.decimation must be >= 1");
    if (!(divergence_bound > 0.0)) throw ConfigError("run.divergence_bound must be positive");
    if (sync_start_t >= 0.0 && start_connected[1])
        throw ConfigError("scenario.sync_start_t requires scenario.breaker2_closed = false");
    if (t_event >= 0.0 && t_event < softstart)
        throw ConfigError("scenario.t_event must not fall inside the soft-start ramp");
    if (t_event >= t_end && t_event >= 0.0)
        throw ConfigError("scenario.t_event must lie before scenario.t_end");
}

Scenario make_scenario(const Config& cfg) {
    Scenario sc;

    sc.plant.l_g = cfg.get_f64("plant.l_g");
    sc.plant.c_g = cfg.get_f64("plant.c_g");
    sc.plant.r_f = cfg.get_f64("plant.r_f");
    sc.plant.l_line = cfg.get_f64("plant.l_line");
    sc.plant.r_line = cfg.get_f64("plant.r_line");
    sc.plant.r_load = cfg.get_f64("plant.r_load");
    sc.plant.v_dc = cfg.get_f64("plant.v_dc");
    sc.plant.dt = cfg.get_f64("plant.dt");

    sc.gfli.tau = cfg.get_f64("gfli.tau");
    sc.gfli.i_d_ref = cfg.get_f64("gfli.i_d");
    sc.gfli.i_q_ref = cfg.get_f64("gfli.i_q");
    sc.gfli.w_ff = kTwoPi * cfg.get_f64("ctrl.f_star");

    ControlGains g;
    g.k_pvd = cfg.get_f64("ctrl.k_pvd");
    g.k_ivd = cfg.get_f64("ctrl.k_ivd");
    g.k_pvq = cfg.get_f64("ctrl.k_pvq");
    g.k_ivq = cfg.get_f64("ctrl.k_ivq");
    g.k_pid = cfg.get_f64("ctrl.k_pid");
    g.k_iid = cfg.get_f64("ctrl.k_iid");
    g.k_piq = cfg.get_f64("ctrl.k_piq");
    g.k_iiq = cfg.get_f64("ctrl.k_iiq");
    g.k_drp = cfg.get_f64("ctrl.k_drp");
    g.k_drq = cfg.get_f64("ctrl.k_drq");
    g.w_star = kTwoPi * cfg.get_f64("ctrl.f_star");
    g.v_m_star = std::sqrt(2.0) * cfg.get_f64("ctrl.v_rms_star");
    g.k_pw = cfg.get_f64("ctrl.k_pw");
    g.k_iw = cfg.get_f64("ctrl.k_iw");
    g.k_pv = cfg.get_f64("ctrl.k_pv");
    g.k_iv = cfg.get_f64("ctrl.k_iv");
    g.k_fb = cfg.get_f64("ctrl.k_fb");
    g.w_c_pq = kTwoPi * cfg.get_f64("ctrl.f_c_pq");
    g.w_c_vfil = kTwoPi * cfg.get_f64("ctrl.f_c_vfil");
    g.l_g = sc.plant.l_g;
    g.c_g = sc.plant.c_g;
    g.v_dc = sc.plant.v_dc;
    g.vi_negate = cfg.get_bool("ctrl.vi_negate");
    g.vi_line_current = cfg.get_bool("ctrl.vi_line_current");
    g.v_int_limit = cfg.get_f64("ctrl.v_int_limit");
    g.i_int_limit = cfg.get_f64("ctrl.i_int_limit");
    g.sync_w_int_limit = cfg.get_f64("ctrl.sync_w_int_limit");
    g.sync_v_int_limit = cfg.get_f64("ctrl.sync_v_int_limit");

    sc.gains[0] = g;
    sc.gains[0].l_v = cfg.get_f64("ctrl.l_v1");
    sc.gains[1] = g;
    sc.gains[1].l_v = cfg.get_f64("ctrl.l_v2");

    sc.setpoints[0] = {cfg.get_f64("ctrl.p_star1"), cfg.get_f64("ctrl.q_star1")};
    sc.setpoints[1] = {cfg.get_f64("ctrl.p_star2"), cfg.get_f64("ctrl.q_star2")};

    sc.sync.eps_theta = cfg.get_f64("sync.eps_theta");
    sc.sync.eps_v = cfg.get_f64("sync.eps_v");
    sc.sync.t_hold = cfg.get_f64("sync.t_hold");
    sc.sync.timeout = cfg.get_f64("sync.timeout");

    sc.qshare.k_iq = cfg.get_f64("qshare.k_iq");
    sc.qshare.rho1 = cfg.get_f64("qshare.rho1");
    sc.qshare.rho2 = cfg.get_f64("qshare.rho2");
    sc.qshare.q_star1 = cfg.get_f64("qshare.q_star1");
    sc.qshare.q_star2 = cfg.get_f64("qshare.q_star2");
    sc.qshare.clamp = cfg.get_f64("qshare.clamp");
    sc.qshare.ramp_rate = cfg.get_f64("qshare.ramp_rate");
    sc.qshare.use_local_q = cfg.get_bool("qshare.use_local_q");

    sc.seed = cfg.get_u64("run.seed");
    ChannelParams ch;
    ch.rate_hz = cfg.get_f64("chan.rate_hz");
    ch.delay_s = cfg.get_f64("chan.delay_s");
    ch.jitter_s = cfg.get_f64("chan.jitter_s");
    ch.loss_prob = cfg.get_f64("chan.loss_prob");
    sc.chan_12 = ch;
    sc.chan_12.seed = derive_stream(sc.seed, 1);
    sc.chan_21 = ch;
    sc.chan_21.seed = derive_stream(sc.seed, 2);

    sc.noise.enabled = cfg.get_bool("run.noise_enabled");
    sc.noise.stddev = cfg.get_f64("run.noise_stddev");

    sc.metrics.restore_threshold = cfg.get_f64("metrics.restore_threshold");
    sc.metrics.restore_hold = cfg.get_f64("metrics.restore_hold");
    sc.metrics.window = cfg.get_f64("metrics.window");
    sc.metrics.class_band_floor = cfg.get_f64("metrics.class_band_floor");
    sc.metrics.class_band_frac = cfg.get_f64("metrics.class_band_frac");
    sc.metrics.peak_window = cfg.get_f64("metrics.peak_window");
    sc.metrics.unstable_factor = cfg.get_f64("metrics.unstable_factor");
    sc.metrics.stable_dq = cfg.get_f64("metrics.stable_dq");
    sc.metrics.degraded_dq = cfg.get_f64("metrics.degraded_dq");
    sc.metrics.stable_dv = cfg.get_f64("metrics.stable_dv");
    sc.metrics.degraded_dv = cfg.get_f64("metrics.degraded_dv");
    sc.metrics.osc_dq_ptp = cfg.get_f64("metrics.osc_dq_ptp");
    sc.metrics.osc_dv_ptp = cfg.get_f64("metrics.osc_dv_ptp");

    sc.dt_ctrl = cfg.get_f64("ctrl.dt");
    sc.t_end = cfg.get_f64("scenario.t_end");
    sc.softstart = cfg.get_f64("scenario.softstart");
    sc.t_event = cfg.get_f64("scenario.t_event");
    sc.iq_post = cfg.get_f64("scenario.iq_post");
    sc.qshare_on_t = cfg.get_f64("scenario.qshare_on_t");
    sc.sync_start_t = cfg.get_f64("scenario.sync_start_t");
    sc.theta0_2 = cfg.get_f64("scenario.theta0_2");
    sc.delta_v0_2 = cfg.get_f64("scenario.delta_v0_2");
    sc.start_connected[0] = true;
    sc.start_connected[1] = cfg.get_bool("scenario.breaker2_closed");
    sc.qshare_on_start = cfg.get_bool("qshare.enabled") && sc.qshare_on_t < 0.0;

    sc.decimation = static_cast<int>(cfg.get_i64("run.decimation"));
    sc.divergence_bound = cfg.get_f64("run.divergence_bound");
    sc.preset = cfg.get_str("scenario.preset");

    sc.validate();
    return sc;
}

std::vector<AxisSpec> sweep_axes(const Config& cfg) {
    std::vector<AxisSpec> axes;
    const std::string k1 = cfg.get_str("sweep.axis1_key");
    const std::string k2 = cfg.get_str("sweep.axis2_key");
    if (k1.empty()) throw ConfigError("sweep requires sweep.axis1_key");

    auto split = [](const std::string& text) {
        std::vector<std::string> out;
        std::string cur;
        for (char c : text) {
            if (c == ',') {
                if (!cur.empty()) out.push_back(cur);
                cur.clear();
            } else if (c != ' ' && c != '\t') {
                cur.push_back(c);
            }
        }
        if (!cur.empty()) out.push_back(cur);
        return out;
    };

    AxisSpec a1{k1, split(cfg.get_str("sweep.axis1_values"))};
    if (a1.values.empty()) throw ConfigError("sweep.axis1_values must not be empty");
    axes.push_back(std::move(a1));

    if (!k2.empty()) {
        AxisSpec a2{k2, split(cfg.get_str("sweep.axis2_values"))};
        if (a2.values.empty()) throw ConfigError("sweep.axis2_values must not be empty");
        axes.push_back(std::move(a2));
    }
    return axes;
}

namespace {

/// gfli.i_q that commands the island's inverters to source q_cmd VArs total.
double iq_for_q(double q_cmd) {
    const double v_m = 230.0 * std::sqrt(2.0);
    return q_cmd / (1.5 * v_m);
}

std::string join_iq_list(const std::vector<double>& q_cmds) {
    std::string s;
    for (double q : q_cmds) {
        if (!s.empty()) s += ",";
        s += Config::format_f64(iq_for_q(q));
    }
    return s;
}

}  // namespace

Config preset_config(const std::string& name) {
    Config c;
    c.set("scenario.preset", name);

    if (name == "base") return c;

    if (name == "e1" || name == "e2") {
        // steady reactive load sweep, -6 kVAr .. +4 kVAr
        c.set("scenario.t_end", "6");
        c.set("gfli.i_q", Config::format_f64(iq_for_q(4000.0)));
        c.set("sweep.axis1_key", "gfli.i_q");
        c.set("sweep.axis1_values",
              join_iq_list({-6000, -5000, -4000, -3000, -2000, -1000, 0, 1000, 2000, 3000, 4000}));
        if (name == "e2") c.set("ctrl.l_v2", "0.001");
        return c;
    }

    if (name == "e3") {
        // sharing correction transient: reactive demand steps 1 -> 5 kVAr, ideal channel
        c.set("ctrl.l_v2", "0.001");
        c.set("gfli.i_q", Config::format_f64(iq_for_q(1000.0)));
        c.set("scenario.t_event", "4");
        c.set("scenario.iq_post", Config::format_f64(iq_for_q(5000.0)));
        c.set("scenario.qshare_on_t", "1.5");
        c.set("qshare.enabled", "true");
        c.set("qshare.k_iq", "0.003");
        c.set("scenario.t_end", "14");
        return c;
    }

    if (name == "e4") {
        // gain sensitivity: 0 -> 4 kVAr step swept over the correction gain
        c.set("ctrl.l_v2", "0.001");
        c.set("gfli.i_q", "0");
        c.set("scenario.t_event", "4");
        c.set("scenario.iq_post", Config::format_f64(iq_for_q(4000.0)));
        c.set("scenario.qshare_on_t", "1.5");
        c.set("qshare.enabled", "true");
        c.set("scenario.t_end", "14");
        c.set("sweep.axis1_key", "qshare.k_iq");
        c.set("sweep.axis1_values", "0.001,0.003,0.009,0.03,0.06");
        return c;
    }

    if (name == "e5") {
        // delay/loss robustness grid over gain x one-way delay
        c.set("ctrl.l_v2", "0.001");
        c.set("gfli.i_q", "0");
        c.set("scenario.t_event", "4");
        c.set("scenario.iq_post", Config::format_f64(iq_for_q(4000.0)));
        c.set("scenario.qshare_on_t", "1.5");
        c.set("qshare.enabled", "true");
        c.set("scenario.t_end", "16");
        c.set("chan.loss_prob", "0.03");
        c.set("sweep.axis1_key", "qshare.k_iq");
        c.set("sweep.axis1_values", "0.001,0.003,0.009");
        c.set("sweep.axis2_key", "chan.delay_s");
        c.set("sweep.axis2_values", "0.05,0.06,0.07,0.08,0.09,0.1");
        return c;
    }

    if (name == "sync") {
        // inverter 2 starts on its own island, out of phase and low, then syncs
        c.set("scenario.breaker2_closed", "false");
        c.set("scenario.sync_start_t", "1");
        c.set("scenario.theta0_2", "-0.5");
        c.set("scenario.delta_v0_2", "10");
        c.set("scenario.t_end", "12");
        c.set("gfli.i_q", "0");
        return c;
    }

    throw ConfigError("unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() { return {"base", "e1", "e2", "e3", "e4", "e5", "sync"}; }

bool is_preset(const std::string& name) {
    for (const auto& n : preset_names())
        if (n == name) return true;
    return false;
}

}  // namespace mgsim
