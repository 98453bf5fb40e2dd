#include "mgsim/plant.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mgsim {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0)) throw ConfigError(std::string(name) + " must be positive, got " + std::to_string(v));
}

void check_finite(double v, const char* name) {
    if (!std::isfinite(v))
        throw std::invalid_argument(std::string("non-finite value in ") + name);
}

void check_finite(const TwoPhase& v, const char* name) {
    if (!std::isfinite(v.a) || !std::isfinite(v.b))
        throw std::invalid_argument(std::string("non-finite value in ") + name);
}

}  // namespace

void PlantParams::validate() const {
    require_positive(l_g, "plant.l_g");
    require_positive(c_g, "plant.c_g");
    require_positive(l_line, "plant.l_line");
    require_positive(r_load, "plant.r_load");
    require_positive(v_dc, "plant.v_dc");
    require_positive(dt, "plant.dt");
    if (r_f < 0.0) throw ConfigError("plant.r_f must be >= 0");
    if (r_line < 0.0) throw ConfigError("plant.r_line must be >= 0");
}

void GfliParams::validate() const {
    require_positive(tau, "gfli.tau");
    check_finite(i_d_ref, "gfli.i_d");
    check_finite(i_q_ref, "gfli.i_q");
    check_finite(w_ff, "gfli.w_ff");
}

TwoPhase pcc_voltage(const PlantState& x, const PlantInput& u, const PlantParams& p) {
    TwoPhase i_sum = x.i_gfli;
    for (std::size_t n = 0; n < 2; ++n)
        if (u.breaker[n]) i_sum = i_sum + x.i_line[n];
    return p.r_load * i_sum;
}

PlantState derivatives(const PlantState& x, const PlantInput& u, const GfliParams& g,
                       const PlantParams& p) {
    check_finite(x.i_s[0], "i_s[0]");
    check_finite(x.i_s[1], "i_s[1]");
    check_finite(x.v[0], "v[0]");
    check_finite(x.v[1], "v[1]");
    check_finite(x.i_line[0], "i_line[0]");
    check_finite(x.i_line[1], "i_line[1]");
    check_finite(x.i_gfli, "i_gfli");
    check_finite(u.bridge[0], "bridge[0]");
    check_finite(u.bridge[1], "bridge[1]");

    const TwoPhase v_pcc = pcc_voltage(x, u, p);

    PlantState d;
    for (std::size_t n = 0; n < 2; ++n) {
        d.i_s[n] = (1.0 / p.l_g) * (u.bridge[n] - x.v[n] - p.r_f * x.i_s[n]);
        d.v[n] = (1.0 / p.c_g) * (x.i_s[n] - (u.breaker[n] ? x.i_line[n] : TwoPhase{}));
        // an open breaker freezes the (zeroed) line current
        d.i_line[n] = u.breaker[n]
                          ? (1.0 / p.l_line) * (x.v[n] - v_pcc - p.r_line * x.i_line[n])
                          : TwoPhase{};
    }

    // current target rides the PCC voltage angle; dead island keeps the last angle sense.
    // The lag acts in the rotating frame, so the stationary-frame derivative carries the
    // frame rotation w_ff*J*i (J = 90 degree rotation); without it a 50 Hz target would be
    // tracked with gain 1/|1+jw*tau| instead of unity.
    const double phi = std::atan2(v_pcc.b, v_pcc.a);
    const TwoPhase i_tgt = rotate_to_ab(DqPair{g.i_d_ref, g.i_q_ref}, phi);
    const TwoPhase rot{-g.w_ff * x.i_gfli.b, g.w_ff * x.i_gfli.a};
    d.i_gfli = rot + (1.0 / g.tau) * (i_tgt - x.i_gfli);
    return d;
}

namespace {

PlantState axpy(const PlantState& x, double h, const PlantState& k) {
    PlantState r;
    for (std::size_t n = 0; n < 2; ++n) {
        r.i_s[n] = x.i_s[n] + h * k.i_s[n];
        r.v[n] = x.v[n] + h * k.v[n];
        r.i_line[n] = x.i_line[n] + h * k.i_line[n];
    }
    r.i_gfli = x.i_gfli + h * k.i_gfli;
    return r;
}

}  // namespace

PlantState rk4_step(const PlantState& x, const PlantInput& u, const GfliParams& g,
                    const PlantParams& p) {
    const double h = p.dt;
    const PlantState k1 = derivatives(x, u, g, p);
    const PlantState k2 = derivatives(axpy(x, 0.5 * h, k1), u, g, p);
    const PlantState k3 = derivatives(axpy(x, 0.5 * h, k2), u, g, p);
    const PlantState k4 = derivatives(axpy(x, h, k3), u, g, p);

    PlantState r;
    const double w = h / 6.0;
    for (std::size_t n = 0; n < 2; ++n) {
        r.i_s[n] = x.i_s[n] + w * (k1.i_s[n] + 2.0 * k2.i_s[n] + 2.0 * k3.i_s[n] + k4.i_s[n]);
        r.v[n] = x.v[n] + w * (k1.v[n] + 2.0 * k2.v[n] + 2.0 * k3.v[n] + k4.v[n]);
        r.i_line[n] =
            x.i_line[n] + w * (k1.i_line[n] + 2.0 * k2.i_line[n] + 2.0 * k3.i_line[n] + k4.i_line[n]);
    }
    r.i_gfli = x.i_gfli + w * (k1.i_gfli + 2.0 * k2.i_gfli + 2.0 * k3.i_gfli + k4.i_gfli);
    return r;
}

Measurement measure(const PlantState& x, const PlantInput& u, const PlantParams& p) {
    Measurement m;
    m.v = x.v;
    m.i_s = x.i_s;
    for (std::size_t n = 0; n < 2; ++n)
        m.i_line[n] = u.breaker[n] ? x.i_line[n] : TwoPhase{};
    m.v_pcc = pcc_voltage(x, u, p);
    return m;
}

Measurement measure_noisy(const PlantState& x, const PlantInput& u, const PlantParams& p,
                          const NoiseParams& n, Xorshift64Star& rng) {
    Measurement m = measure(x, u, p);
    if (!n.enabled || n.stddev <= 0.0) return m;
    auto jitter = [&](TwoPhase& t) {
        t.a += n.stddev * rng.gaussian();
        t.b += n.stddev * rng.gaussian();
    };
    for (std::size_t k = 0; k < 2; ++k) {
        jitter(m.v[k]);
        jitter(m.i_s[k]);
        jitter(m.i_line[k]);
    }
    jitter(m.v_pcc);
    return m;
}

double max_abs(const PlantState& x) {
    double m = 0.0;
    auto upd = [&](const TwoPhase& t) {
        m = std::max(m, std::max(std::fabs(t.a), std::fabs(t.b)));
    };
    for (std::size_t n = 0; n < 2; ++n) {
        upd(x.i_s[n]);
        upd(x.v[n]);
        upd(x.i_line[n]);
    }
    upd(x.i_gfli);
    return m;
}

bool all_finite(const PlantState& x) {
    auto ok = [](const TwoPhase& t) { return std::isfinite(t.a) && std::isfinite(t.b); };
    for (std::size_t n = 0; n < 2; ++n)
        if (!ok(x.i_s[n]) || !ok(x.v[n]) || !ok(x.i_line[n])) return false;
    return ok(x.i_gfli);
}

}  // namespace mgsim
