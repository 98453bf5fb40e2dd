#pragma once

#include <array>
#include <cstdint>

#include "mgsim/common.hpp"
#include "mgsim/filters.hpp"
#include "mgsim/frames.hpp"
#include "mgsim/plant.hpp"

namespace mgsim {

/// All control-side constants for one inverter. Defaults are the bench values
/// the experiment presets assume.
struct ControlGains {
    // voltage loop PI (d / q)
    double k_pvd = 0.187;
    double k_ivd = 0.5;
    double k_pvq = 0.52;
    double k_ivq = 1.16;
    // current loop PI (d / q)
    double k_pid = 6.25;
    double k_iid = 55.0;
    double k_piq = 1.0;
    double k_iiq = 10.0;
    // droop
    double k_drp = 2e-4;   // rad/s per W
    double k_drq = 1e-3;   // V per VAr
    double w_star = kTwoPi * 50.0;       // rad/s
    double v_m_star = 230.0 * 1.4142135623730951;  // V peak
    // synchronization PI pair
    double k_pw = 0.8;
    double k_iw = 0.8;
    double k_pv = 0.02;
    double k_iv = 0.3;
    double k_fb = 0.7;     // relay feedback gain for correction decay
    // measurement filters
    double w_c_pq = kTwoPi * 10.0;    // P/Q low-pass, rad/s
    double w_c_vfil = kTwoPi * 10.0;  // grid magnitude low-pass, rad/s
    // plant values the decoupling terms assume
    double l_g = 2.2e-3;
    double c_g = 10e-6;
    double v_dc = 700.0;
    // virtual output impedance
    double l_v = 0.0;            // H
    bool vi_negate = false;      // flip the sign of the injected drop
    bool vi_line_current = true; // drop from line current, else inverter-side current
    // anti-windup limits on integrator contributions
    double v_int_limit = 200.0;      // A
    double i_int_limit = 700.0;      // V
    double sync_w_int_limit = 50.0;  // rad/s
    double sync_v_int_limit = 50.0;  // V

    void validate(double dt) const;
};

struct DroopSetpoints {
    double p_star = 0.0;  // W
    double q_star = 0.0;  // VAr
};

/// Connection criteria for bringing an isolated inverter onto the island.
struct SyncConfig {
    double eps_theta = 2.0;  // V, bound on the q-component of grid voltage in the local frame
    double eps_v = 2.0;      // V, bound on magnitude mismatch
    double t_hold = 0.5;     // s both criteria must hold continuously
    double timeout = 30.0;   // s from sync start until the attempt is declared failed

    void validate() const;
};

enum class SyncPhase { Isolated, Syncing, Connected };

struct DroopOutput {
    double omega = 0.0;  // rad/s
    DqPair v_ref{};      // voltage reference before inner loops
};

/// omega = w* - k_drp (P - P*) - dw ;  v_d* = v_m* - k_drq (Q - Q*) - dv - dq ; v_q* = 0.
DroopOutput droop(double p_filt, double q_filt, const DroopSetpoints& sp, const ControlGains& g,
                  double delta_w, double delta_v, double delta_q, double v_m_scale = 1.0);

/// Inject the virtual inductive drop into the voltage reference:
/// v_d += w Lv i_q ; v_q -= w Lv i_d (signs flipped when negate is set).
DqPair apply_virtual_impedance(const DqPair& v_ref, const DqPair& i, double omega, double l_v,
                               bool negate);

/// PI state storing the integrator contribution directly (gain already applied),
/// clamped symmetrically. clamp_events counts saturation entries.
struct PiPairState {
    double zd = 0.0;
    double zq = 0.0;
};

/// Capacitor-voltage PI with load-current feedforward and cross decoupling.
DqPair voltage_loop(const DqPair& v_ref, const DqPair& v, const DqPair& i_line, double omega,
                    const ControlGains& g, double dt, PiPairState& st, std::uint64_t& clamp_events);

/// Filter-current PI with output-voltage feedforward and cross decoupling.
DqPair current_loop(const DqPair& i_ref, const DqPair& i_s, const DqPair& v, double omega,
                    const ControlGains& g, double dt, PiPairState& st, std::uint64_t& clamp_events);

struct DutyResult {
    ThreePhase duty{};   // each clamped to [-1, 1]
    TwoPhase bridge{};   // averaged bridge voltage implied by the clamped duty
    bool saturated = false;
};

/// Normalize the voltage command by the DC link and clamp.
DutyResult compute_duty(const DqPair& v_s_ref, double theta, double v_dc);

/// Synchronization corrections. S = 0 while matching the live grid, S = 1 after
/// connection (corrections decay through the relay feedback path).
struct SyncState {
    SyncPhase phase = SyncPhase::Connected;
    int relay = 1;          // S
    double delta_w = 0.0;   // rad/s, subtracted from the droop frequency
    double delta_v = 0.0;   // V, subtracted from the droop voltage reference
    double zw = 0.0;        // integrator contributions
    double zv = 0.0;
    double v_fil = 0.0;     // filtered grid voltage magnitude
    double hold = 0.0;      // s the closing criteria have held
    double t_start = 0.0;
    bool failed = false;
};

/// Per-inverter measurement slice.
struct InverterMeas {
    TwoPhase v{};
    TwoPhase i_s{};
    TwoPhase i_line{};
    TwoPhase v_pcc{};
};

struct ControlOutput {
    TwoPhase bridge{};
    ThreePhase duty{};
    bool duty_saturated = false;
};

/// Full cascaded controller for one inverter: droop + sync corrections,
/// virtual impedance, voltage PI, current PI, duty computation. Runs at a
/// fixed period; the plant is integrated separately between calls.
class InverterControl {
  public:
    InverterControl(const ControlGains& gains, const DroopSetpoints& sp, const SyncConfig& sync,
                    double dt, bool start_connected, double theta0 = 0.0, double delta_v0 = 0.0);

    /// One control period. delta_q is the sharing correction voltage,
    /// v_m_scale scales the magnitude setpoint (soft start ramp),
    /// t_now is virtual time (sync timeout bookkeeping).
    ControlOutput step(const InverterMeas& m, double delta_q, double v_m_scale, double t_now);

    /// Begin tracking the live grid (Isolated -> Syncing).
    void start_sync(double t_now);

    double theta() const { return theta_; }
    double omega() const { return omega_; }
    double p_filt() const { return p_filt_.value(); }
    double q_filt() const { return q_filt_.value(); }
    double v_d_meas() const { return v_d_meas_; }
    double v_ref_d() const { return v_ref_d_; }
    const SyncState& sync() const { return sync_; }
    SyncPhase phase() const { return sync_.phase; }
    bool sync_failed() const { return sync_.failed; }
    /// True on the step the closing criteria complete; the harness closes the breaker.
    bool connect_request() const { return connect_request_; }

    std::uint64_t duty_sat_count() const { return duty_sat_count_; }
    std::uint64_t v_clamp_count() const { return v_clamp_count_; }
    std::uint64_t i_clamp_count() const { return i_clamp_count_; }

  private:
    void sync_step(const TwoPhase& v_grid, const DqPair& v_grid_dq, double t_now);

    ControlGains g_;
    DroopSetpoints sp_;
    SyncConfig sync_cfg_;
    double dt_;
    double theta_;
    double omega_;
    LowPass p_filt_;
    LowPass q_filt_;
    LowPass v_fil_;
    SyncState sync_;
    PiPairState v_pi_{};
    PiPairState i_pi_{};
    double v_ref_d_prev_;  // previous-period droop reference, breaks the magnitude-match algebraic loop
    double v_ref_d_ = 0.0;
    double v_d_meas_ = 0.0;
    bool connect_request_ = false;
    std::uint64_t duty_sat_count_ = 0;
    std::uint64_t v_clamp_count_ = 0;
    std::uint64_t i_clamp_count_ = 0;
};

}  // namespace mgsim
