#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mgsim/common.hpp"
#include "mgsim/rng.hpp"

namespace mgsim {

/// One directed channel. Both directions of a link get their own instance with
/// independent random streams so loss patterns never correlate.
struct ChannelParams {
    double rate_hz = 5.0;    // message emission rate
    double delay_s = 0.0;    // one-way latency
    double jitter_s = 0.0;   // uniform +- jitter added to the latency
    double loss_prob = 0.0;  // independent per-message drop probability
    std::uint64_t seed = 1;

    void validate() const;
};

struct QShareMessage {
    int sender = 0;
    std::uint64_t seq = 0;  // strictly increasing per sender, starts at 1
    double t_send = 0.0;
    double q_value = 0.0;   // VAr
};

struct ChannelStats {
    std::uint64_t sent = 0;
    std::uint64_t dropped = 0;
    std::uint64_t delivered = 0;
};

class Channel {
  public:
    Channel(const ChannelParams& p, int sender_id);

    /// Called every control period. Emits at most one message, on the period
    /// boundary of the configured rate. Returns the message if one was sent
    /// (even if the channel then dropped it).
    std::optional<QShareMessage> tick_send(double t_now, double q_value);

    /// All messages whose delivery time has arrived, oldest first. Ties are
    /// impossible within one sender (sequence order breaks them).
    std::vector<QShareMessage> deliver_due(double t_now);

    const ChannelStats& stats() const { return stats_; }
    std::size_t in_flight() const { return queue_.size(); }

  private:
    struct InFlight {
        QShareMessage msg;
        double t_deliver;
    };

    ChannelParams p_;
    int sender_;
    std::uint64_t next_seq_ = 1;
    std::uint64_t next_slot_ = 0;  // send happens when t reaches slot/rate
    std::vector<InFlight> queue_;  // kept sorted by (t_deliver, seq)
    Xorshift64Star rng_;
    ChannelStats stats_;
};

}  // namespace mgsim
