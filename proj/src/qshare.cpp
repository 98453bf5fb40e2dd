#include "mgsim/qshare.hpp"

#include <cmath>
#include <string>

namespace mgsim {

void QShareParams::validate() const {
    if (!(k_iq >= 0.0)) throw ConfigError("qshare.k_iq must be >= 0");
    if (!(rho1 > 0.0 && rho1 <= 1.0)) throw ConfigError("qshare.rho1 must be in (0, 1]");
    if (!(rho2 > 0.0 && rho2 <= 1.0)) throw ConfigError("qshare.rho2 must be in (0, 1]");
    if (std::fabs(rho1 + rho2 - 1.0) > 1e-9)
        throw ConfigError("qshare.rho1 + qshare.rho2 must sum to 1, got " +
                          std::to_string(rho1 + rho2));
    if (!(clamp > 0.0)) throw ConfigError("qshare.clamp must be positive");
    if (!(ramp_rate > 0.0)) throw ConfigError("qshare.ramp_rate must be positive");
}

double sharing_target(std::size_t n, std::span<const double> q_star, double rho_n,
                      std::span<const double> known_q) {
    double excess = 0.0;
    for (std::size_t i = 0; i < known_q.size(); ++i) excess += known_q[i] - q_star[i];
    return q_star[n] + rho_n * excess;
}

double integrate_correction(double delta_q, double q_bar, double q_local, double k_iq, double dt,
                            double clamp, bool& clamped) {
    double d = delta_q + k_iq * (q_local - q_bar) * dt;
    clamped = false;
    if (d > clamp) {
        d = clamp;
        clamped = true;
    } else if (d < -clamp) {
        d = -clamp;
        clamped = true;
    }
    return d;
}

QShareNode::QShareNode(const QShareParams& p, std::size_t index)
    : p_(p), index_(index), known_q_(2, 0.0), last_seq_(2, 0), last_send_t_(2, -1.0) {
    p_.validate();
    if (index > 1) throw ConfigError("qshare node index must be 0 or 1");
    // before the first report a peer is assumed to sit at its setpoint
    known_q_[0] = p_.q_star1;
    known_q_[1] = p_.q_star2;
    known_q_[index_] = 0.0;
}

void QShareNode::accept(std::size_t peer, double q_value, std::uint64_t seq, double t_send) {
    if (peer > 1 || peer == index_) return;
    if (seq <= last_seq_[peer]) return;  // stale or duplicate
    last_seq_[peer] = seq;
    known_q_[peer] = q_value;
    last_send_t_[peer] = t_send;
}

void QShareNode::set_enabled(bool on) {
    if (on) {
        mode_ = QShareMode::Active;  // resumes from the current correction
        return;
    }
    if (mode_ == QShareMode::Active)
        mode_ = (delta_q_ == 0.0) ? QShareMode::Off : QShareMode::RampingOut;
}

double QShareNode::sharing_target_now() const {
    const double q_star[2] = {p_.q_star1, p_.q_star2};
    const double rho = (index_ == 0) ? p_.rho1 : p_.rho2;
    return sharing_target(index_, q_star, rho, known_q_);
}

void QShareNode::update(double dt) {
    switch (mode_) {
        case QShareMode::Off:
            delta_q_ = 0.0;
            return;
        case QShareMode::RampingOut: {
            const double step = p_.ramp_rate * dt;
            if (std::fabs(delta_q_) <= step) {
                delta_q_ = 0.0;
                mode_ = QShareMode::Off;
            } else {
                delta_q_ -= (delta_q_ > 0.0 ? step : -step);
            }
            return;
        }
        case QShareMode::Active: {
            const double q_bar = sharing_target_now();
            const double q_used = p_.use_local_q ? local_q_ : published_q_;
            bool clamped = false;
            delta_q_ = integrate_correction(delta_q_, q_bar, q_used, p_.k_iq, dt, p_.clamp, clamped);
            if (clamped) ++clamp_events_;
            return;
        }
    }
}

}  // namespace mgsim
