#include "mgsim/harness.hpp"

#include <algorithm>
#include <cmath>

namespace mgsim {

const char* to_string(Behaviour b) {
    switch (b) {
        case Behaviour::Overdamped: return "Overdamped";
        case Behaviour::Underdamped: return "Underdamped";
        case Behaviour::Oscillating: return "Oscillating";
        case Behaviour::Unstable: return "Unstable";
        case Behaviour::NotClassified: return "NotClassified";
    }
    return "?";
}

const char* to_string(Stability s) {
    switch (s) {
        case Stability::Stable: return "Stable";
        case Stability::Degraded: return "Degraded";
        case Stability::Failed: return "Failed";
    }
    return "?";
}

namespace {

std::size_t first_index_at(const std::vector<Sample>& series, double t) {
    std::size_t i = 0;
    while (i < series.size() && series[i].t < t - 1e-9) ++i;
    return i;
}

struct WindowMeans {
    double p1 = 0, p2 = 0, q1 = 0, q2 = 0, vpcc = 0, dq = 0;
    double dq_ptp = 0, vpcc_ptp = 0;
    bool valid = false;
};

WindowMeans final_window(const std::vector<Sample>& series, double window) {
    WindowMeans w;
    if (series.empty()) return w;
    const double t_last = series.back().t;
    const std::size_t begin = first_index_at(series, t_last - window);
    if (begin >= series.size()) return w;
    double dq_min = series[begin].delta_q, dq_max = series[begin].delta_q;
    double v_min = series[begin].vpcc_mag, v_max = series[begin].vpcc_mag;
    std::size_t n = 0;
    for (std::size_t i = begin; i < series.size(); ++i) {
        const Sample& s = series[i];
        w.p1 += s.p1;
        w.p2 += s.p2;
        w.q1 += s.q1;
        w.q2 += s.q2;
        w.vpcc += s.vpcc_mag;
        w.dq += s.delta_q;
        dq_min = std::min(dq_min, s.delta_q);
        dq_max = std::max(dq_max, s.delta_q);
        v_min = std::min(v_min, s.vpcc_mag);
        v_max = std::max(v_max, s.vpcc_mag);
        ++n;
    }
    const double inv = 1.0 / static_cast<double>(n);
    w.p1 *= inv;
    w.p2 *= inv;
    w.q1 *= inv;
    w.q2 *= inv;
    w.vpcc *= inv;
    w.dq *= inv;
    w.dq_ptp = dq_max - dq_min;
    w.vpcc_ptp = v_max - v_min;
    w.valid = true;
    return w;
}

}  // namespace

std::optional<double> restoration_time(const std::vector<Sample>& series, double t_event,
                                       const MetricsConfig& mc) {
    const std::size_t begin = first_index_at(series, t_event);
    double entry = -1.0;
    for (std::size_t i = begin; i < series.size(); ++i) {
        if (series[i].delta_q < mc.restore_threshold) {
            if (entry < 0.0) entry = series[i].t;
            if (series[i].t - entry >= mc.restore_hold - 1e-9) return entry - t_event;
        } else {
            entry = -1.0;
        }
    }
    return std::nullopt;
}

Behaviour classify_behaviour(const std::vector<Sample>& series, double t_event, bool diverged,
                             const MetricsConfig& mc) {
    if (diverged) return Behaviour::Unstable;
    if (series.empty()) return Behaviour::NotClassified;
    const double t_last = series.back().t;
    if (t_last < t_event + mc.peak_window - 1e-9) return Behaviour::NotClassified;

    const std::size_t begin = first_index_at(series, t_event);
    if (begin >= series.size()) return Behaviour::NotClassified;

    double peak0 = 0.0;
    for (std::size_t i = begin; i < series.size() && series[i].t <= t_event + mc.peak_window; ++i)
        peak0 = std::max(peak0, series[i].delta_q);

    const WindowMeans w = final_window(series, mc.window);
    const double settled = w.dq;
    const double band = std::max(mc.class_band_floor, mc.class_band_frac * peak0);
    const double blowup = mc.unstable_factor * std::max(peak0, mc.class_band_floor);

    int entries = 0;
    bool inside = false;
    for (std::size_t i = begin; i < series.size(); ++i) {
        const Sample& s = series[i];
        if (s.t > t_event + mc.peak_window && s.delta_q > blowup) return Behaviour::Unstable;
        const bool now_inside = std::fabs(s.delta_q - settled) <= band;
        if (now_inside && !inside) ++entries;
        inside = now_inside;
    }
    if (entries == 0) return Behaviour::Unstable;  // never reached the settling band
    const int reversals = entries - 1;
    if (reversals == 0) return Behaviour::Overdamped;
    if (reversals <= 2) return Behaviour::Underdamped;
    return Behaviour::Oscillating;
}

RunMetrics compute_metrics(const std::vector<Sample>& series, const Scenario& sc,
                           const RunDiagnostics& diag) {
    RunMetrics m;
    if (series.empty()) {
        m.stability = Stability::Failed;
        return m;
    }

    const double t_ref = sc.t_event >= 0.0 ? sc.t_event : sc.softstart;

    for (std::size_t i = first_index_at(series, t_ref); i < series.size(); ++i)
        m.dq_max = std::max(m.dq_max, series[i].delta_q);

    m.t_restore = restoration_time(series, t_ref, sc.metrics);
    m.behaviour = sc.t_event >= 0.0
                      ? classify_behaviour(series, sc.t_event, diag.diverged, sc.metrics)
                      : Behaviour::NotClassified;

    const WindowMeans w = final_window(series, sc.metrics.window);
    m.final_p1 = w.p1;
    m.final_p2 = w.p2;
    m.final_q1 = w.q1;
    m.final_q2 = w.q2;
    m.final_vpcc = w.vpcc;
    m.final_dq = w.dq;
    m.final_eq = 0.5 * w.dq;
    m.dq_ptp_final = w.dq_ptp;
    m.vpcc_ptp_final = w.vpcc_ptp;

    // droop-consistent PCC voltage from the final operating point: nominal
    // droop law per inverter, the virtual impedance shift at that Q, and the
    // series line drop projected on the voltage axis; averaged over both units
    const double denom = 1.5 * std::max(w.vpcc, 1.0);
    double pred = 0.0;
    const double q_f[2] = {w.q1, w.q2};
    const double p_f[2] = {w.p1, w.p2};
    for (int n = 0; n < 2; ++n) {
        const ControlGains& g = sc.gains[n];
        double v = g.v_m_star - g.k_drq * (q_f[n] - sc.setpoints[n].q_star);
        v -= g.w_star * g.l_v * q_f[n] / denom;
        v -= (sc.plant.r_line * p_f[n] + g.w_star * sc.plant.l_line * q_f[n]) / denom;
        pred += 0.5 * v;
    }
    m.vpcc_pred = pred;
    m.vdev = std::fabs(w.vpcc - pred);

    const bool persistent_osc =
        w.dq_ptp > sc.metrics.osc_dq_ptp || w.vpcc_ptp > sc.metrics.osc_dv_ptp;

    if (diag.diverged || diag.sync_failed || m.final_dq > sc.metrics.degraded_dq ||
        m.vdev > sc.metrics.degraded_dv) {
        m.stability = Stability::Failed;
    } else if (m.t_restore.has_value() && m.final_dq < sc.metrics.stable_dq &&
               m.vdev < sc.metrics.stable_dv && !persistent_osc) {
        m.stability = Stability::Stable;
    } else {
        m.stability = Stability::Degraded;
    }
    return m;
}

RunRecord run_scenario(const Scenario& sc) {
    sc.validate();

    RunRecord rec;
    rec.scenario = sc;

    const int substeps = static_cast<int>(std::llround(sc.dt_ctrl / sc.plant.dt));
    const long long steps = std::llround(sc.t_end / sc.dt_ctrl);

    InverterControl ctrl0(sc.gains[0], sc.setpoints[0], sc.sync, sc.dt_ctrl,
                          sc.start_connected[0], 0.0, 0.0);
    InverterControl ctrl1(sc.gains[1], sc.setpoints[1], sc.sync, sc.dt_ctrl,
                          sc.start_connected[1], sc.theta0_2, sc.delta_v0_2);
    InverterControl* ctrl[2] = {&ctrl0, &ctrl1};

    QShareNode node0(sc.qshare, 0);
    QShareNode node1(sc.qshare, 1);
    QShareNode* node[2] = {&node0, &node1};
    if (sc.qshare_on_start) {
        node0.set_enabled(true);
        node1.set_enabled(true);
    }

    Channel chan_12(sc.chan_12, 0);  // inverter 1 publishes, inverter 2 listens
    Channel chan_21(sc.chan_21, 1);
    Xorshift64Star noise_rng(derive_stream(sc.seed, 3));

    PlantState x{};
    PlantInput in;
    in.breaker = sc.start_connected;
    GfliParams gfli_now = sc.gfli;

    if (sc.start_connected[1]) rec.diag.t_connected = 0.0;

    const long long k_event = sc.t_event >= 0.0 ? std::llround(sc.t_event / sc.dt_ctrl) : -1;
    const long long k_qshare = sc.qshare_on_t >= 0.0 ? std::llround(sc.qshare_on_t / sc.dt_ctrl) : -1;
    const long long k_sync = sc.sync_start_t >= 0.0 ? std::llround(sc.sync_start_t / sc.dt_ctrl) : -1;

    rec.series.reserve(static_cast<std::size_t>(steps / sc.decimation + 2));

    for (long long k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * sc.dt_ctrl;

        if (k == k_event) gfli_now.i_q_ref = sc.iq_post;
        if (k == k_qshare) {
            node0.set_enabled(true);
            node1.set_enabled(true);
        }
        if (k == k_sync) ctrl1.start_sync(t);

        const Measurement meas = sc.noise.enabled
                                     ? measure_noisy(x, in, sc.plant, sc.noise, noise_rng)
                                     : measure(x, in, sc.plant);

        // message exchange: deliveries first, then this period's sends
        for (const QShareMessage& msg : chan_12.deliver_due(t))
            node1.accept(0, msg.q_value, msg.seq, msg.t_send);
        for (const QShareMessage& msg : chan_21.deliver_due(t))
            node0.accept(1, msg.q_value, msg.seq, msg.t_send);
        if (node1.heard_from(0))
            rec.max_staleness[0] = std::max(rec.max_staleness[0], t - node1.last_peer_send_time(0));
        if (node0.heard_from(1))
            rec.max_staleness[1] = std::max(rec.max_staleness[1], t - node0.last_peer_send_time(1));

        for (int i = 0; i < 2; ++i) node[i]->set_local_q(ctrl[i]->q_filt());
        if (auto msg = chan_12.tick_send(t, ctrl0.q_filt())) node0.note_published(msg->q_value);
        if (auto msg = chan_21.tick_send(t, ctrl1.q_filt())) node1.note_published(msg->q_value);
        for (int i = 0; i < 2; ++i) node[i]->update(sc.dt_ctrl);

        const double scale = sc.softstart > 0.0 ? std::min(1.0, t / sc.softstart) : 1.0;

        ControlOutput out[2];
        for (int i = 0; i < 2; ++i) {
            const InverterMeas im{meas.v[i], meas.i_s[i], meas.i_line[i], meas.v_pcc};
            out[i] = ctrl[i]->step(im, node[i]->delta_q(), scale, t);
            if (ctrl[i]->connect_request() && !in.breaker[i]) {
                in.breaker[i] = true;
                rec.diag.t_connected = t;
                if (i == 1) {
                    rec.diag.sync_dw_connect = ctrl1.sync().delta_w;
                    rec.diag.sync_dv_connect = ctrl1.sync().delta_v;
                }
            }
            in.bridge[i] = out[i].bridge;
        }

        if (k % sc.decimation == 0) {
            Sample s;
            s.t = t;
            s.omega1 = ctrl0.omega();
            s.omega2 = ctrl1.omega();
            s.vd1 = ctrl0.v_d_meas();
            s.vd2 = ctrl1.v_d_meas();
            s.p1 = ctrl0.p_filt();
            s.p2 = ctrl1.p_filt();
            s.q1 = ctrl0.q_filt();
            s.q2 = ctrl1.q_filt();
            s.dq1 = node0.delta_q();
            s.dq2 = node1.delta_q();
            s.vpcc_mag = meas.v_pcc.mag();
            s.delta_q = std::fabs(s.q1 - s.q2);
            rec.series.push_back(s);
        }

        if (ctrl0.sync_failed() || ctrl1.sync_failed()) {
            rec.diag.sync_failed = true;
            break;
        }

        GfliParams gfli_eff = gfli_now;
        gfli_eff.i_d_ref *= scale;
        gfli_eff.i_q_ref *= scale;
        for (int s = 0; s < substeps; ++s) x = rk4_step(x, in, gfli_eff, sc.plant);

        if (!all_finite(x) || max_abs(x) > sc.divergence_bound) {
            rec.diag.diverged = true;
            rec.diag.t_diverged = t + sc.dt_ctrl;
            break;
        }
    }

    for (int i = 0; i < 2; ++i) {
        rec.diag.duty_sat[i] = ctrl[i]->duty_sat_count();
        rec.diag.v_clamp[i] = ctrl[i]->v_clamp_count();
        rec.diag.i_clamp[i] = ctrl[i]->i_clamp_count();
        rec.diag.dq_clamp[i] = node[i]->clamp_events();
    }
    rec.diag.sync_dw_final = ctrl1.sync().delta_w;
    rec.diag.sync_dv_final = ctrl1.sync().delta_v;
    rec.chan[0] = chan_12.stats();
    rec.chan[1] = chan_21.stats();
    rec.metrics = compute_metrics(rec.series, sc, rec.diag);
    return rec;
}

}  // namespace mgsim
