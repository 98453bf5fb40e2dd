#include "mgsim/controller.hpp"

#include <cmath>
#include <string>

namespace mgsim {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0)) throw ConfigError(std::string(name) + " must be positive, got " + std::to_string(v));
}

void require_nonneg(double v, const char* name) {
    if (!(v >= 0.0)) throw ConfigError(std::string(name) + " must be >= 0, got " + std::to_string(v));
}

/// Clamp the integrator contribution; counts each step spent at the limit.
double clamp_integ(double z, double limit, std::uint64_t& events) {
    if (z > limit) {
        ++events;
        return limit;
    }
    if (z < -limit) {
        ++events;
        return -limit;
    }
    return z;
}

}  // namespace

void ControlGains::validate(double dt) const {
    require_positive(k_pvd, "ctrl.k_pvd");
    require_positive(k_pid, "ctrl.k_pid");
    require_nonneg(k_drp, "ctrl.k_drp");
    require_nonneg(k_drq, "ctrl.k_drq");
    require_positive(w_star, "ctrl.w_star");
    require_positive(v_m_star, "ctrl.v_m_star");
    require_positive(v_dc, "ctrl.v_dc");
    require_positive(l_g, "ctrl.l_g");
    require_positive(c_g, "ctrl.c_g");
    require_nonneg(l_v, "ctrl.l_v");
    require_positive(v_int_limit, "ctrl.v_int_limit");
    require_positive(i_int_limit, "ctrl.i_int_limit");
    if (!(dt > 0.0)) throw ConfigError("ctrl.dt must be positive");
    if (!(dt * w_c_pq < 1.0)) throw ConfigError("ctrl.w_c_pq too high for the control period");
    if (!(dt * w_c_vfil < 1.0)) throw ConfigError("ctrl.w_c_vfil too high for the control period");
}

void SyncConfig::validate() const {
    require_positive(eps_theta, "sync.eps_theta");
    require_positive(eps_v, "sync.eps_v");
    require_positive(t_hold, "sync.t_hold");
    require_positive(timeout, "sync.timeout");
}

DroopOutput droop(double p_filt, double q_filt, const DroopSetpoints& sp, const ControlGains& g,
                  double delta_w, double delta_v, double delta_q, double v_m_scale) {
    DroopOutput out;
    out.omega = g.w_star - g.k_drp * (p_filt - sp.p_star) - delta_w;
    out.v_ref.d = g.v_m_star * v_m_scale - g.k_drq * (q_filt - sp.q_star) - delta_v - delta_q;
    out.v_ref.q = 0.0;
    return out;
}

DqPair apply_virtual_impedance(const DqPair& v_ref, const DqPair& i, double omega, double l_v,
                               bool negate) {
    if (l_v == 0.0) return v_ref;
    const double s = negate ? -1.0 : 1.0;
    return {v_ref.d + s * omega * l_v * i.q, v_ref.q - s * omega * l_v * i.d};
}

DqPair voltage_loop(const DqPair& v_ref, const DqPair& v, const DqPair& i_line, double omega,
                    const ControlGains& g, double dt, PiPairState& st, std::uint64_t& clamp_events) {
    const double ed = v_ref.d - v.d;
    const double eq = v_ref.q - v.q;
    st.zd = clamp_integ(st.zd + g.k_ivd * ed * dt, g.v_int_limit, clamp_events);
    st.zq = clamp_integ(st.zq + g.k_ivq * eq * dt, g.v_int_limit, clamp_events);
    return {g.k_pvd * ed + st.zd + i_line.d - v.d * g.c_g * omega,
            g.k_pvq * eq + st.zq + i_line.q + v.d * g.c_g * omega};
}

DqPair current_loop(const DqPair& i_ref, const DqPair& i_s, const DqPair& v, double omega,
                    const ControlGains& g, double dt, PiPairState& st, std::uint64_t& clamp_events) {
    const double ed = i_ref.d - i_s.d;
    const double eq = i_ref.q - i_s.q;
    st.zd = clamp_integ(st.zd + g.k_iid * ed * dt, g.i_int_limit, clamp_events);
    st.zq = clamp_integ(st.zq + g.k_iiq * eq * dt, g.i_int_limit, clamp_events);
    return {g.k_pid * ed + st.zd + v.d - i_s.q * g.l_g * omega,
            g.k_piq * eq + st.zq + v.q + i_s.d * g.l_g * omega};
}

DutyResult compute_duty(const DqPair& v_s_ref, double theta, double v_dc) {
    DutyResult r;
    const ThreePhase want = inverse_park_abc(v_s_ref, theta);
    auto norm = [&](double v) {
        double d = v / v_dc;
        if (d > 1.0) {
            r.saturated = true;
            return 1.0;
        }
        if (d < -1.0) {
            r.saturated = true;
            return -1.0;
        }
        return d;
    };
    r.duty = {norm(want.a), norm(want.b), norm(want.c)};
    r.bridge = clarke({r.duty.a * v_dc, r.duty.b * v_dc, r.duty.c * v_dc});
    return r;
}

InverterControl::InverterControl(const ControlGains& gains, const DroopSetpoints& sp,
                                 const SyncConfig& sync, double dt, bool start_connected,
                                 double theta0, double delta_v0)
    : g_(gains),
      sp_(sp),
      sync_cfg_(sync),
      dt_(dt),
      theta_(wrap_angle(theta0)),
      omega_(gains.w_star),
      p_filt_(gains.w_c_pq, dt),
      q_filt_(gains.w_c_pq, dt),
      v_fil_(gains.w_c_vfil, dt),
      v_ref_d_prev_(gains.v_m_star) {
    g_.validate(dt);
    sync_cfg_.validate();
    sync_.phase = start_connected ? SyncPhase::Connected : SyncPhase::Isolated;
    sync_.relay = start_connected ? 1 : 0;
    sync_.delta_v = delta_v0;
    sync_.zv = delta_v0;  // preload lives in the integrator so it can be walked out
}

void InverterControl::start_sync(double t_now) {
    if (sync_.phase != SyncPhase::Isolated) return;
    sync_.phase = SyncPhase::Syncing;
    sync_.relay = 0;
    sync_.t_start = t_now;
    sync_.hold = 0.0;
    sync_.v_fil = v_fil_.value();
}

void InverterControl::sync_step(const TwoPhase& v_grid, const DqPair& v_grid_dq, double t_now) {
    sync_.v_fil = v_fil_.update(v_grid.mag());

    double e_w, e_v;
    if (sync_.relay == 0) {
        // drive the grid vector onto the local d axis and match magnitudes;
        // previous-period reference keeps the magnitude path strictly causal
        e_w = -v_grid_dq.q;
        e_v = v_ref_d_prev_ - sync_.v_fil;
    } else {
        e_w = -g_.k_fb * sync_.delta_w;
        e_v = -g_.k_fb * sync_.delta_v;
    }

    std::uint64_t scratch = 0;
    sync_.zw = clamp_integ(sync_.zw + g_.k_iw * e_w * dt_, g_.sync_w_int_limit, scratch);
    sync_.zv = clamp_integ(sync_.zv + g_.k_iv * e_v * dt_, g_.sync_v_int_limit, scratch);
    sync_.delta_w = g_.k_pw * e_w + sync_.zw;
    sync_.delta_v = g_.k_pv * e_v + sync_.zv;

    if (sync_.phase == SyncPhase::Syncing) {
        const bool phase_ok = std::fabs(v_grid_dq.q) < sync_cfg_.eps_theta;
        const bool mag_ok = std::fabs(sync_.v_fil - v_ref_d_prev_) < sync_cfg_.eps_v;
        sync_.hold = (phase_ok && mag_ok) ? sync_.hold + dt_ : 0.0;
        if (sync_.hold >= sync_cfg_.t_hold) {
            sync_.phase = SyncPhase::Connected;
            sync_.relay = 1;
            connect_request_ = true;
        } else if (t_now - sync_.t_start > sync_cfg_.timeout) {
            sync_.failed = true;
        }
    }
}

ControlOutput InverterControl::step(const InverterMeas& m, double delta_q, double v_m_scale,
                                    double t_now) {
    connect_request_ = false;

    const DqPair v_dq = rotate_to_dq(m.v, theta_);
    const DqPair is_dq = rotate_to_dq(m.i_s, theta_);
    const DqPair il_dq = rotate_to_dq(m.i_line, theta_);
    v_d_meas_ = v_dq.d;

    const PowerSample pq = measure_power(v_dq, il_dq);
    const double p_f = p_filt_.update(pq.p);
    const double q_f = q_filt_.update(pq.q);

    if (sync_.phase != SyncPhase::Isolated) {
        const DqPair vg_dq = rotate_to_dq(m.v_pcc, theta_);
        sync_step(m.v_pcc, vg_dq, t_now);
    }

    const DroopOutput dr =
        droop(p_f, q_f, sp_, g_, sync_.delta_w, sync_.delta_v, delta_q, v_m_scale);
    omega_ = dr.omega;
    v_ref_d_ = dr.v_ref.d;
    v_ref_d_prev_ = dr.v_ref.d;

    DqPair v_ref = dr.v_ref;
    if (g_.l_v > 0.0) {
        const DqPair& i_vi = g_.vi_line_current ? il_dq : is_dq;
        v_ref = apply_virtual_impedance(v_ref, i_vi, omega_, g_.l_v, g_.vi_negate);
    }

    const DqPair i_ref = voltage_loop(v_ref, v_dq, il_dq, omega_, g_, dt_, v_pi_, v_clamp_count_);
    const DqPair v_s_ref = current_loop(i_ref, is_dq, v_dq, omega_, g_, dt_, i_pi_, i_clamp_count_);

    const DutyResult duty = compute_duty(v_s_ref, theta_, g_.v_dc);
    if (duty.saturated) ++duty_sat_count_;

    theta_ = wrap_angle(theta_ + omega_ * dt_);

    return {duty.bridge, duty.duty, duty.saturated};
}

}  // namespace mgsim
