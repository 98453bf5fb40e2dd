#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mgsim/common.hpp"

namespace mgsim {

/// Distributed reactive sharing parameters, identical on both nodes.
struct QShareParams {
    double k_iq = 0.003;     // V per VAr-second
    double rho1 = 0.5;       // share weights, must sum to 1
    double rho2 = 0.5;
    double q_star1 = 0.0;    // VAr setpoints
    double q_star2 = 0.0;
    double clamp = 30.0;     // V, symmetric bound on the correction
    double ramp_rate = 10.0; // V/s used when the correction is ramped out
    bool use_local_q = false;  // true: integrand and own target share track the live
                               // measurement every control period; false: both hold the
                               // value last published on the channel, so the correction
                               // marches on the same snapshots the peers exchange

    void validate() const;
};

enum class QShareMode { Off, Active, RampingOut };

/// Target VArs for node n given everyone's last-known outputs:
/// Q_bar = Q*_n + rho_n * sum_i (Q_i - Q*_i).
double sharing_target(std::size_t n, std::span<const double> q_star, double rho_n,
                      std::span<const double> known_q);

/// One Euler update of the correction: delta += k_iq * (q_local - q_bar) * dt,
/// clamped to +-clamp. Sets clamped when the bound is hit.
double integrate_correction(double delta_q, double q_bar, double q_local, double k_iq, double dt,
                            double clamp, bool& clamped);

/// Correction state machine for one inverter. Peer values arrive through the
/// message channel and are held between deliveries; stale sequence numbers are
/// discarded here.
class QShareNode {
  public:
    QShareNode(const QShareParams& p, std::size_t index);

    /// Accept a peer report. Ignored unless seq exceeds the last stored one.
    void accept(std::size_t peer, double q_value, std::uint64_t seq, double t_send);

    void set_local_q(double q) {
        local_q_ = q;
        if (p_.use_local_q) known_q_[index_] = q;
    }

    /// Record the value that actually went out on the wire. In published mode
    /// this is also the own-node entry the sharing target is computed from.
    void note_published(double q) {
        published_q_ = q;
        if (!p_.use_local_q) known_q_[index_] = q;
    }

    void set_enabled(bool on);

    /// One control period. Integrates (Active), ramps toward zero (RampingOut)
    /// or holds zero (Off).
    void update(double dt);

    double delta_q() const { return delta_q_; }
    QShareMode mode() const { return mode_; }
    double sharing_target_now() const;
    double known_q(std::size_t i) const { return known_q_[i]; }
    double last_peer_send_time(std::size_t peer) const { return last_send_t_[peer]; }
    bool heard_from(std::size_t peer) const { return last_seq_[peer] != 0; }
    std::uint64_t clamp_events() const { return clamp_events_; }

  private:
    QShareParams p_;
    std::size_t index_;
    QShareMode mode_ = QShareMode::Off;
    double delta_q_ = 0.0;
    double local_q_ = 0.0;
    double published_q_ = 0.0;
    std::vector<double> known_q_;   // last known Q per node, self included
    std::vector<std::uint64_t> last_seq_;
    std::vector<double> last_send_t_;
    std::uint64_t clamp_events_ = 0;
};

}  // namespace mgsim
