#pragma once

#include <array>
#include <cstddef>

#include "mgsim/common.hpp"
#include "mgsim/frames.hpp"
#include "mgsim/rng.hpp"

namespace mgsim {

/// Electrical parameters of the two-inverter island. Both inverters share the
/// same LC output filter and line values; the load at the point of common
/// coupling is resistive and a controllable constant-current device hangs off
/// the same node.
struct PlantParams {
    double l_g = 2.2e-3;     // output filter inductance, H
    double c_g = 10e-6;      // output filter capacitance, F
    double r_f = 0.1;        // filter series resistance, ohm
    double l_line = 2.2e-3;  // line inductance inverter -> PCC, H
    double r_line = 0.05;    // line resistance, ohm
    double r_load = 79.35;   // per-phase load resistance at the PCC, ohm
    double v_dc = 700.0;     // DC link voltage, V
    double dt = 10e-6;       // integration step, s

    void validate() const;
};

/// Constant-current device at the PCC. References are in a frame aligned with
/// the PCC voltage vector and the current tracks them first order in that
/// rotating frame, so the stationary-frame state carries a rotation
/// feedforward at the nominal grid frequency.
struct GfliParams {
    double i_d_ref = 0.0;  // A, active-axis
    double i_q_ref = 0.0;  // A, reactive-axis (positive draws inductive VArs from the island)
    double tau = 0.02;     // tracking time constant, s
    double w_ff = kTwoPi * 50.0;  // tracking-frame rotation rate, rad/s

    void validate() const;
};

/// Continuous state, all stationary-frame vectors.
struct PlantState {
    std::array<TwoPhase, 2> i_s{};     // inverter-side filter currents, A
    std::array<TwoPhase, 2> v{};       // filter capacitor voltages, V
    std::array<TwoPhase, 2> i_line{};  // line currents into the PCC, A
    TwoPhase i_gfli{};                 // constant-current device current, A
};

/// Zero-order-held inputs for one integration interval.
struct PlantInput {
    std::array<TwoPhase, 2> bridge{};            // averaged bridge voltages, V
    std::array<bool, 2> breaker{true, true};     // line breaker closed
};

/// What the controllers can see.
struct Measurement {
    std::array<TwoPhase, 2> v{};
    std::array<TwoPhase, 2> i_s{};
    std::array<TwoPhase, 2> i_line{};
    TwoPhase v_pcc{};
};

struct NoiseParams {
    bool enabled = false;
    double stddev = 0.0;  // additive, same per component
};

/// PCC voltage is algebraic: the resistive load carries the sum of all
/// injected currents. Open breakers contribute nothing.
TwoPhase pcc_voltage(const PlantState& x, const PlantInput& u, const PlantParams& p);

/// Time derivatives of the full state. Throws std::invalid_argument naming the
/// first non-finite input encountered.
PlantState derivatives(const PlantState& x, const PlantInput& u, const GfliParams& g,
                       const PlantParams& p);

/// One classical 4th-order Runge-Kutta step of length p.dt (inputs held).
PlantState rk4_step(const PlantState& x, const PlantInput& u, const GfliParams& g,
                    const PlantParams& p);

Measurement measure(const PlantState& x, const PlantInput& u, const PlantParams& p);
Measurement measure_noisy(const PlantState& x, const PlantInput& u, const PlantParams& p,
                          const NoiseParams& n, Xorshift64Star& rng);

/// Largest absolute state component; drives the divergence check.
double max_abs(const PlantState& x);
bool all_finite(const PlantState& x);

}  // namespace mgsim
