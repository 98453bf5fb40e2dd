#pragma once

#include <cmath>

#include "mgsim/common.hpp"

namespace mgsim {

/// Stationary two-axis quantity (alpha along phase a), amplitude-invariant scaling:
/// a balanced three-phase set of peak V maps to a rotating vector of magnitude V.
struct TwoPhase {
    double a = 0.0;  // alpha
    double b = 0.0;  // beta

    friend TwoPhase operator+(TwoPhase x, TwoPhase y) { return {x.a + y.a, x.b + y.b}; }
    friend TwoPhase operator-(TwoPhase x, TwoPhase y) { return {x.a - y.a, x.b - y.b}; }
    friend TwoPhase operator*(double s, TwoPhase x) { return {s * x.a, s * x.b}; }
    double mag() const { return std::hypot(a, b); }
};

/// Rotating-frame pair, d axis at angle theta in the stationary frame.
struct DqPair {
    double d = 0.0;
    double q = 0.0;
};

/// Instantaneous phase values.
struct ThreePhase {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

struct PowerSample {
    double p = 0.0;  // W
    double q = 0.0;  // VAr, positive = sourcing inductive
};

/// Wrap angle to [0, 2*pi).
inline double wrap_angle(double theta) {
    double t = std::fmod(theta, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    return t;
}

/// abc -> alpha/beta, amplitude-invariant (2/3 scaling).
inline TwoPhase clarke(const ThreePhase& x) {
    return {(2.0 * x.a - x.b - x.c) / 3.0, (x.b - x.c) / std::sqrt(3.0)};
}

/// alpha/beta -> abc for a zero-sequence-free set.
inline ThreePhase inverse_clarke(const TwoPhase& x) {
    const double h = 0.5 * x.a;
    const double s = 0.5 * std::sqrt(3.0) * x.b;
    return {x.a, -h + s, -h - s};
}

/// Rotate a stationary-frame vector into the frame at angle theta.
/// v_d = cos(t)*a + sin(t)*b; v_q = -sin(t)*a + cos(t)*b.
inline DqPair rotate_to_dq(const TwoPhase& x, double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    return {c * x.a + s * x.b, -s * x.a + c * x.b};
}

/// Inverse rotation, dq -> stationary.
inline TwoPhase rotate_to_ab(const DqPair& x, double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    return {c * x.d - s * x.q, s * x.d + c * x.q};
}

inline DqPair park(const TwoPhase& x, double theta) { return rotate_to_dq(x, theta); }
inline DqPair park(const ThreePhase& x, double theta) { return rotate_to_dq(clarke(x), theta); }
inline TwoPhase inverse_park(const DqPair& x, double theta) { return rotate_to_ab(x, theta); }
inline ThreePhase inverse_park_abc(const DqPair& x, double theta) {
    return inverse_clarke(rotate_to_ab(x, theta));
}

/// Instantaneous p/q from synchronous-frame voltage and current (peak scaling).
inline PowerSample measure_power(const DqPair& v, const DqPair& i) {
    return {1.5 * (v.d * i.d + v.q * i.q), 1.5 * (v.q * i.d - v.d * i.q)};
}

/// Same quantities from stationary-frame vectors (rotation invariant).
inline PowerSample measure_power(const TwoPhase& v, const TwoPhase& i) {
    return {1.5 * (v.a * i.a + v.b * i.b), 1.5 * (v.b * i.a - v.a * i.b)};
}

}  // namespace mgsim
