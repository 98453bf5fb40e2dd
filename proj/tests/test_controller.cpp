#include <doctest.h>

#include <cmath>

#include "mgsim/controller.hpp"

using namespace mgsim;

namespace {

ControlGains bench_gains() { return ControlGains{}; }

InverterMeas rotating_meas(double v_mag, double theta) {
    InverterMeas m;
    m.v = {v_mag * std::cos(theta), v_mag * std::sin(theta)};
    m.v_pcc = m.v;
    return m;
}

}  // namespace

TEST_CASE("droop slopes and offsets") {
    const ControlGains g = bench_gains();
    const DroopSetpoints sp{};

    SUBCASE("zero inputs give the nominal point") {
        const DroopOutput d = droop(0, 0, sp, g, 0, 0, 0);
        CHECK(d.omega == doctest::Approx(g.w_star));
        CHECK(d.v_ref.d == doctest::Approx(g.v_m_star));
        CHECK(d.v_ref.q == 0.0);
    }
    SUBCASE("1 kW drops omega by k_drp * 1000") {
        const DroopOutput d = droop(1000, 0, sp, g, 0, 0, 0);
        CHECK(g.w_star - d.omega == doctest::Approx(0.2).epsilon(1e-12));
    }
    SUBCASE("1 kVAr drops the voltage reference by k_drq * 1000") {
        const DroopOutput d = droop(0, 1000, sp, g, 0, 0, 0);
        CHECK(g.v_m_star - d.v_ref.d == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("corrections subtract") {
        const DroopOutput d = droop(0, 0, sp, g, 0.5, 2.0, 3.0);
        CHECK(d.omega == doctest::Approx(g.w_star - 0.5));
        CHECK(d.v_ref.d == doctest::Approx(g.v_m_star - 5.0));
    }
    SUBCASE("setpoints shift the operating point") {
        const DroopOutput d = droop(1000, 500, DroopSetpoints{1000, 500}, g, 0, 0, 0);
        CHECK(d.omega == doctest::Approx(g.w_star));
        CHECK(d.v_ref.d == doctest::Approx(g.v_m_star));
    }
}

TEST_CASE("virtual impedance drop") {
    const DqPair v{325.0, 0.0};
    const double w = kTwoPi * 50.0;

    SUBCASE("zero inductance is bit-identical") {
        const DqPair out = apply_virtual_impedance(v, DqPair{10, -5}, w, 0.0, false);
        CHECK(out.d == v.d);
        CHECK(out.q == v.q);
    }
    SUBCASE("d-axis current pushes the q reference down by w Lv i_d") {
        const DqPair out = apply_virtual_impedance(v, DqPair{10, 0}, w, 1e-3, false);
        CHECK(out.d == doctest::Approx(v.d));
        CHECK(out.q == doctest::Approx(-kPi).epsilon(1e-12));
    }
    SUBCASE("q-axis current raises the d reference by w Lv i_q") {
        const DqPair out = apply_virtual_impedance(v, DqPair{0, 10}, w, 1e-3, false);
        CHECK(out.d == doctest::Approx(v.d + kPi).epsilon(1e-12));
        CHECK(out.q == doctest::Approx(0.0));
    }
    SUBCASE("negate flips both terms") {
        const DqPair a = apply_virtual_impedance(v, DqPair{7, 3}, w, 1e-3, false);
        const DqPair b = apply_virtual_impedance(v, DqPair{7, 3}, w, 1e-3, true);
        CHECK(b.d - v.d == doctest::Approx(-(a.d - v.d)));
        CHECK(b.q - v.q == doctest::Approx(-(a.q - v.q)));
    }
}

TEST_CASE("voltage loop feedforward and decoupling at zero error") {
    const ControlGains g = bench_gains();
    PiPairState st{};
    std::uint64_t clamps = 0;
    const double w = g.w_star;
    const DqPair v{325.27, 0.0};
    const DqPair i_line{10.0, 0.0};

    const DqPair out = voltage_loop(v, v, i_line, w, g, 5e-5, st, clamps);
    const double coupling = v.d * g.c_g * w;  // about 1.02 A
    CHECK(out.d == doctest::Approx(10.0 - coupling).epsilon(1e-12));
    CHECK(out.q == doctest::Approx(coupling).epsilon(1e-12));
    CHECK(clamps == 0);
}

TEST_CASE("voltage loop proportional and integral paths") {
    const ControlGains g = bench_gains();
    PiPairState st{};
    std::uint64_t clamps = 0;
    const DqPair v_ref{100.0, 0.0};
    const DqPair v{99.0, 0.0};  // 1 V error

    // first call: proportional term plus one Euler increment
    const DqPair out = voltage_loop(v_ref, v, DqPair{}, 0.0, g, 5e-5, st, clamps);
    CHECK(out.d == doctest::Approx(g.k_pvd * 1.0 + g.k_ivd * 1.0 * 5e-5).epsilon(1e-12));

    // one second of constant unit error integrates to exactly k_ivd
    PiPairState st2{};
    double acc = 0.0;
    for (int k = 0; k < 20000; ++k) {
        const DqPair o = voltage_loop(v_ref, v, DqPair{}, 0.0, g, 5e-5, st2, clamps);
        acc = o.d;
    }
    CHECK(acc - g.k_pvd == doctest::Approx(g.k_ivd).epsilon(1e-9));
}

TEST_CASE("voltage loop integrator clamps and counts") {
    ControlGains g = bench_gains();
    g.v_int_limit = 0.01;
    PiPairState st{};
    std::uint64_t clamps = 0;
    for (int k = 0; k < 1000; ++k)
        voltage_loop(DqPair{1000, 0}, DqPair{}, DqPair{}, 0.0, g, 5e-5, st, clamps);
    CHECK(st.zd == 0.01);
    CHECK(clamps > 0);
}

TEST_CASE("current loop feedforward and decoupling at zero error") {
    const ControlGains g = bench_gains();
    PiPairState st{};
    std::uint64_t clamps = 0;
    const DqPair i{10.0, 0.0};
    const DqPair v{325.27, 0.0};

    const DqPair out = current_loop(i, i, v, g.w_star, g, 5e-5, st, clamps);
    CHECK(out.d == doctest::Approx(v.d).epsilon(1e-12));  // i_q = 0: no cross term on d
    CHECK(out.q == doctest::Approx(i.d * g.l_g * g.w_star).epsilon(1e-12));
}

TEST_CASE("duty scales by the DC link and saturates symmetrically") {
    SUBCASE("a full-scale command lands exactly at duty 1 on phase a") {
        const DutyResult r = compute_duty(DqPair{700.0, 0.0}, 0.0, 700.0);
        CHECK(r.duty.a == doctest::Approx(1.0));
        CHECK(r.duty.b == doctest::Approx(-0.5));
        CHECK(r.duty.c == doctest::Approx(-0.5));
        CHECK_FALSE(r.saturated);
        CHECK(r.bridge.a == doctest::Approx(700.0));
        CHECK(r.bridge.b == doctest::Approx(0.0).scale(700.0));
    }
    SUBCASE("overmodulation clamps and reports saturation") {
        const DutyResult r = compute_duty(DqPair{1400.0, 0.0}, 0.0, 700.0);
        CHECK(r.saturated);
        CHECK(r.duty.a == 1.0);
        CHECK(r.bridge.a < 1400.0);
    }
    SUBCASE("zero command gives zero duty") {
        const DutyResult r = compute_duty(DqPair{}, 1.234, 700.0);
        CHECK(r.duty.a == 0.0);
        CHECK(r.duty.b == 0.0);
        CHECK(r.duty.c == 0.0);
        CHECK_FALSE(r.saturated);
    }
}

TEST_CASE("theta stays wrapped over long operation") {
    InverterControl ctrl(bench_gains(), DroopSetpoints{}, SyncConfig{}, 5e-5, true);
    const InverterMeas m = rotating_meas(325.0, 0.0);
    for (int k = 0; k < 200000; ++k) {  // 10 s
        ctrl.step(m, 0.0, 1.0, k * 5e-5);
        CHECK(ctrl.theta() >= 0.0);
        CHECK(ctrl.theta() < kTwoPi);
    }
}

TEST_CASE("grid voltage leading the local frame speeds the frame up while syncing") {
    const ControlGains g = bench_gains();
    InverterControl ctrl(g, DroopSetpoints{}, SyncConfig{}, 5e-5, false, 0.0, 0.0);
    ctrl.start_sync(0.0);
    CHECK(ctrl.phase() == SyncPhase::Syncing);

    // local theta = 0; grid vector has a +2 V beta component, i.e. it leads
    InverterMeas m;
    m.v_pcc = {325.0, 2.0};
    ctrl.step(m, 0.0, 1.0, 0.0);

    // one PI step on the phase error: delta_w = -(k_pw * 2 + k_iw * 2 * dt)
    const double want = -(g.k_pw * 2.0 + g.k_iw * 2.0 * 5e-5);
    CHECK(ctrl.sync().delta_w == doctest::Approx(want).epsilon(1e-12));
    CHECK(ctrl.omega() > g.w_star);  // subtracted negative correction: frame accelerates
}

TEST_CASE("after connection the corrections decay through the relay, matching the scalar recurrence") {
    const ControlGains g = bench_gains();
    const double dt = 5e-5;
    const double dv0 = 10.0;
    InverterControl ctrl(g, DroopSetpoints{}, SyncConfig{}, dt, true, 0.0, dv0);
    CHECK(ctrl.sync().relay == 1);
    CHECK(ctrl.sync().delta_v == doctest::Approx(dv0));

    // independent replica of the S = 1 branch for the magnitude correction
    double z = dv0, delta = dv0;
    const InverterMeas m = rotating_meas(325.27, 0.0);
    for (int k = 0; k < 20000; ++k) {  // 1 s
        ctrl.step(m, 0.0, 1.0, k * dt);
        const double e = -g.k_fb * delta;
        z += g.k_iv * e * dt;
        delta = g.k_pv * e + z;
        CHECK(ctrl.sync().delta_v == doctest::Approx(delta).epsilon(1e-12));
    }
    // analytic decay rate k_fb k_iv / (1 + k_pv k_fb) is about 0.207/s
    CHECK(std::fabs(ctrl.sync().delta_v) < dv0);
    CHECK(ctrl.sync().delta_v == doctest::Approx(dv0 * std::exp(-0.207)).epsilon(0.03));
}

TEST_CASE("sync closes after the criteria hold and requests the breaker once") {
    const ControlGains g = bench_gains();
    SyncConfig sc{};
    InverterControl ctrl(g, DroopSetpoints{}, sc, 5e-5, false, 0.0, 0.0);
    ctrl.start_sync(0.0);

    int requests = 0;
    double t_closed = -1.0;
    for (int k = 0; k < 40000; ++k) {  // 2 s
        const double t = k * 5e-5;
        // a grid that tracks the local frame exactly at nominal magnitude
        const InverterMeas m = rotating_meas(g.v_m_star, ctrl.theta());
        ctrl.step(m, 0.0, 1.0, t);
        if (ctrl.connect_request()) {
            ++requests;
            t_closed = t;
        }
    }
    CHECK(requests == 1);
    CHECK(ctrl.phase() == SyncPhase::Connected);
    CHECK(ctrl.sync().relay == 1);
    // the magnitude filter needs ~0.08 s to get within eps; plus the 0.5 s hold
    CHECK(t_closed > sc.t_hold);
    CHECK(t_closed < 1.5);
    CHECK_FALSE(ctrl.sync_failed());
}

TEST_CASE("sync that cannot match magnitude times out as failed") {
    SyncConfig sc{};
    sc.timeout = 0.3;
    InverterControl ctrl(bench_gains(), DroopSetpoints{}, sc, 5e-5, false, 0.0, 0.0);
    ctrl.start_sync(0.0);
    for (int k = 0; k < 10000 && !ctrl.sync_failed(); ++k) {
        const InverterMeas m = rotating_meas(100.0, ctrl.theta());  // far below nominal
        ctrl.step(m, 0.0, 1.0, k * 5e-5);
    }
    CHECK(ctrl.sync_failed());
    CHECK(ctrl.phase() == SyncPhase::Syncing);  // never connected
}

TEST_CASE("isolated controller leaves the sync corrections untouched") {
    InverterControl ctrl(bench_gains(), DroopSetpoints{}, SyncConfig{}, 5e-5, false, 0.3, 0.0);
    const InverterMeas m = rotating_meas(325.0, 1.0);
    for (int k = 0; k < 100; ++k) ctrl.step(m, 0.0, 1.0, k * 5e-5);
    CHECK(ctrl.sync().delta_w == 0.0);
    CHECK(ctrl.sync().delta_v == 0.0);
    CHECK(ctrl.phase() == SyncPhase::Isolated);
}
